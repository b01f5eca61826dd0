#include "hortimap/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hortimap {

void write_ply(const std::string& path, const PlyCloud& cloud) {
  const std::size_t n = cloud.points.size();
  if (!cloud.cls.empty() && cloud.cls.size() != n)
    throw std::invalid_argument("write_ply: class attribute size mismatch");
  if (!cloud.instance.empty() && cloud.instance.size() != n)
    throw std::invalid_argument("write_ply: instance attribute size mismatch");
  if (!cloud.rgb.empty() && cloud.rgb.size() != n)
    throw std::invalid_argument("write_ply: rgb attribute size mismatch");

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ply: cannot open " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << n << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (!cloud.cls.empty()) out << "property int class\n";
  if (!cloud.instance.empty()) out << "property int instance\n";
  if (!cloud.rgb.empty())
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  out << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  for (std::size_t i = 0; i < n; ++i) {
    out << cloud.points[i].x() << " " << cloud.points[i].y() << " " << cloud.points[i].z();
    if (!cloud.cls.empty()) out << " " << cloud.cls[i];
    if (!cloud.instance.empty()) out << " " << cloud.instance[i];
    if (!cloud.rgb.empty())
      out << " " << int(cloud.rgb[i][0]) << " " << int(cloud.rgb[i][1]) << " "
          << int(cloud.rgb[i][2]);
    out << "\n";
  }
}

PlyCloud read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_ply: cannot open " + path);

  std::string line;
  std::getline(in, line);
  if (line != "ply") throw std::runtime_error("read_ply: not a ply file");
  std::getline(in, line);
  if (line != "format ascii 1.0") throw std::runtime_error("read_ply: unsupported format");

  std::size_t n = 0;
  std::vector<std::string> props;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "element") {
      std::string name;
      ss >> name >> n;
      if (name != "vertex") throw std::runtime_error("read_ply: unsupported element " + name);
    } else if (tok == "property") {
      std::string type, name;
      ss >> type >> name;
      props.push_back(name);
    } else if (tok != "comment") {
      throw std::runtime_error("read_ply: unexpected header line: " + line);
    }
  }

  PlyCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("read_ply: truncated body");
    std::istringstream ss(line);
    Vec3 p = Vec3::Zero();
    std::int32_t cls = 0, inst = 0;
    int r = 0, g = 0, b = 0;
    bool has_cls = false, has_inst = false, has_rgb = false;
    for (const std::string& prop : props) {
      if (prop == "x") ss >> p.x();
      else if (prop == "y") ss >> p.y();
      else if (prop == "z") ss >> p.z();
      else if (prop == "class") { ss >> cls; has_cls = true; }
      else if (prop == "instance") { ss >> inst; has_inst = true; }
      else if (prop == "red") { ss >> r; has_rgb = true; }
      else if (prop == "green") ss >> g;
      else if (prop == "blue") ss >> b;
      else throw std::runtime_error("read_ply: unknown property " + prop);
    }
    if (!ss) throw std::runtime_error("read_ply: malformed vertex line");
    cloud.points.push_back(p);
    if (has_cls) cloud.cls.push_back(cls);
    if (has_inst) cloud.instance.push_back(inst);
    if (has_rgb)
      cloud.rgb.push_back({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                           static_cast<std::uint8_t>(b)});
  }
  return cloud;
}

namespace {
constexpr char kCkptMagic[4] = {'G', 'S', 'C', 'K'};
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const GaussianMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kCkptMagic, 4);
  out.write(reinterpret_cast<const char*>(&kCkptVersion), sizeof(kCkptVersion));
  const std::uint64_t n = map.splats.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const Gaussian3D& g : map.splats) {
    Scalar rec[3 + 1 + 3 + 1 + kNumClasses];
    rec[0] = g.mu.x();
    rec[1] = g.mu.y();
    rec[2] = g.mu.z();
    rec[3] = g.radius;
    rec[4] = g.color.x();
    rec[5] = g.color.y();
    rec[6] = g.color.z();
    rec[7] = g.opacity;
    for (int c = 0; c < kNumClasses; ++c) rec[8 + c] = g.semantic[c];
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
}

GaussianMap load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kCkptVersion) throw std::runtime_error("load_checkpoint: bad version");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));

  GaussianMap map;
  map.splats.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Scalar rec[3 + 1 + 3 + 1 + kNumClasses];
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    if (!in) throw std::runtime_error("load_checkpoint: truncated file");
    Gaussian3D g;
    g.mu = Vec3(rec[0], rec[1], rec[2]);
    g.radius = rec[3];
    g.color = Vec3(rec[4], rec[5], rec[6]);
    g.opacity = rec[7];
    for (int c = 0; c < kNumClasses; ++c) g.semantic[c] = rec[8 + c];
    map.splats.push_back(g);
  }
  return map;
}

void export_splats_ply(const std::string& path, const GaussianMap& map) {
  PlyCloud cloud;
  for (const Gaussian3D& g : map.splats) {
    int arg = 0;
    g.semantic.maxCoeff(&arg);
    cloud.points.push_back(g.mu);
    cloud.cls.push_back(arg);
    const Vec3 c = class_color(static_cast<SemanticClass>(arg)) * 255.0;
    cloud.rgb.push_back({static_cast<std::uint8_t>(c.x()), static_cast<std::uint8_t>(c.y()),
                         static_cast<std::uint8_t>(c.z())});
  }
  write_ply(path, cloud);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace hortimap
