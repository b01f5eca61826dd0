#include "hortimap/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hortimap/rng.hpp"
#include "json.hpp"

namespace hortimap {

namespace {

constexpr Scalar kStemRadius = 0.012;
constexpr Scalar kMinFruitGap = 0.03;  // keeps fruit clusters separable

Isometry translate(const Vec3& t) {
  Isometry iso = Isometry::Identity();
  iso.translation() = t;
  return iso;
}

}  // namespace

void SceneConfig::validate() const {
  if (n_rows < 1 || plants_per_row < 1)
    throw std::invalid_argument("scene config: counts must be >= 1");
  if (row_spacing <= 0 || plant_spacing <= 0)
    throw std::invalid_argument("scene config: spacings must be positive");
  auto check_range = [](auto r, const char* what) {
    if (r.first > r.second) throw std::invalid_argument(std::string("scene config: ") + what);
  };
  check_range(fruit_radius_range, "fruit_radius_range low > high");
  check_range(fruits_per_plant_range, "fruits_per_plant_range low > high");
  check_range(leaf_count_range, "leaf_count_range low > high");
  check_range(plant_height_range, "plant_height_range low > high");
  if (fruit_radius_range.first <= 0) throw std::invalid_argument("scene config: fruit radius <= 0");
  if (fruits_per_plant_range.first < 0 || leaf_count_range.first < 0)
    throw std::invalid_argument("scene config: negative count range");
  if (plant_height_range.first <= 0) throw std::invalid_argument("scene config: plant height <= 0");
}

Scalar FruitCloud::total_volume() const {
  Scalar v = 0;
  for (Scalar x : volumes) v += x;
  return v;
}

Scene generate_scene(const SceneConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);

  Scene scene;
  scene.config = config;
  std::int32_t next_id = 0;

  for (int row = 0; row < config.n_rows; ++row) {
    const Scalar row_y = row * config.row_spacing;
    Scalar row_max_height = 0;

    for (int plant = 0; plant < config.plants_per_row; ++plant) {
      const Scalar px = plant * config.plant_spacing;
      const Scalar height = uniform(rng, config.plant_height_range.first,
                                    config.plant_height_range.second);
      row_max_height = std::max(row_max_height, height);
      const Vec3 base(px, row_y, 0.0);

      Primitive stem;
      stem.shape = ShapeKind::kCylinder;
      stem.world_T_local = translate(base + Vec3(0, 0, height / 2));
      stem.size = Vec3(kStemRadius, height / 2, 0);
      stem.cls = config.stem_class;
      stem.instance_id = next_id++;
      scene.primitives.push_back(stem);

      const int n_leaves = uniform_int(rng, config.leaf_count_range.first,
                                       config.leaf_count_range.second);
      for (int i = 0; i < n_leaves; ++i) {
        const Scalar z = uniform(rng, 0.35 * height, 0.95 * height);
        const Scalar az = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const Scalar rad_off = uniform(rng, 0.02, 0.07);
        const Scalar leaf_r = uniform(rng, 0.03, 0.05);
        const Scalar tilt = uniform(rng, 0.25, 0.9);
        const Scalar tilt_az = uniform(rng, 0.0, 2.0 * std::numbers::pi);

        Primitive leaf;
        leaf.shape = ShapeKind::kDisc;
        Isometry pose = translate(base + Vec3(rad_off * std::cos(az), rad_off * std::sin(az), z));
        pose.linear() = (Eigen::AngleAxis<Scalar>(tilt_az, Vec3::UnitZ()) *
                         Eigen::AngleAxis<Scalar>(tilt, Vec3::UnitX()))
                            .toRotationMatrix();
        leaf.world_T_local = pose;
        leaf.size = Vec3(leaf_r, 0, 0);
        leaf.cls = SemanticClass::kLeaf;
        leaf.instance_id = next_id++;
        scene.primitives.push_back(leaf);
      }

      const int n_fruits = uniform_int(rng, config.fruits_per_plant_range.first,
                                       config.fruits_per_plant_range.second);
      std::vector<std::pair<Vec3, Scalar>> placed;
      for (int i = 0; i < n_fruits; ++i) {
        const Scalar r = uniform(rng, config.fruit_radius_range.first,
                                 config.fruit_radius_range.second);
        bool ok = false;
        Vec3 center = Vec3::Zero();
        for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
          const Scalar az = uniform(rng, 0.0, 2.0 * std::numbers::pi);
          const Scalar rad_off = uniform(rng, kStemRadius + r, 0.09);
          const Scalar z_lo = std::max(0.30 * height, r + 0.01);
          const Scalar z = uniform(rng, z_lo, std::max(z_lo, 0.8 * height));
          center = base + Vec3(rad_off * std::cos(az), rad_off * std::sin(az), z);
          ok = true;
          for (const auto& [c, pr] : placed)
            if ((center - c).norm() < r + pr + kMinFruitGap) ok = false;
        }
        if (!ok) continue;  // crowded plant, drop this fruit
        placed.emplace_back(center, r);

        Primitive fruit;
        fruit.shape = ShapeKind::kSphere;
        fruit.world_T_local = translate(center);
        fruit.size = Vec3(r, 0, 0);
        fruit.cls = SemanticClass::kFruit;
        fruit.instance_id = next_id++;
        scene.primitives.push_back(fruit);
        scene.fruit_instance_ids.push_back(fruit.instance_id);
      }
    }

    RowGeometry geom;
    geom.origin = Vec3(0, row_y, 0);
    geom.axis = Vec3::UnitX();
    geom.length = (config.plants_per_row - 1) * config.plant_spacing;
    geom.height = row_max_height;
    scene.rows.push_back(geom);
  }
  return scene;
}

Scalar primitive_volume(const Primitive& p) {
  constexpr Scalar k = 4.0 / 3.0 * std::numbers::pi;
  switch (p.shape) {
    case ShapeKind::kSphere: return k * std::pow(p.size.x(), 3);
    case ShapeKind::kEllipsoid: return k * p.size.x() * p.size.y() * p.size.z();
    case ShapeKind::kCylinder:
      return std::numbers::pi * p.size.x() * p.size.x() * 2.0 * p.size.y();
    case ShapeKind::kDisc: return 0;
  }
  return 0;
}

FruitCloud ground_truth_fruit_cloud(const Scene& scene, Scalar surface_density) {
  if (surface_density <= 0) throw std::invalid_argument("fruit cloud: density must be positive");

  FruitCloud cloud;
  const Scalar golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (const Primitive& p : scene.primitives) {
    if (p.cls != SemanticClass::kFruit) continue;
    const Scalar r = p.size.x();
    const Vec3 c = p.world_T_local.translation();
    const auto n = std::max<long>(1, std::lround(surface_density * 4.0 * std::numbers::pi * r * r));
    for (long i = 0; i < n; ++i) {
      const Scalar z = 1.0 - 2.0 * (i + 0.5) / static_cast<Scalar>(n);
      const Scalar s = std::sqrt(std::max<Scalar>(0, 1.0 - z * z));
      const Scalar phi = golden * static_cast<Scalar>(i);
      cloud.points.push_back(c + r * Vec3(s * std::cos(phi), s * std::sin(phi), z));
      cloud.instance.push_back(p.instance_id);
    }
    cloud.volumes.push_back(primitive_volume(p));
    ++cloud.count;
  }
  return cloud;
}

std::optional<Scalar> intersect_primitive(const Primitive& prim, const Vec3& origin,
                                          const Vec3& dir, Scalar t_min, Scalar t_max) {
  const Isometry local_T_world = prim.world_T_local.inverse();
  const Vec3 o = local_T_world * origin;
  const Vec3 d = local_T_world.linear() * dir;

  auto pick = [&](Scalar a, Scalar b, Scalar c) -> std::optional<std::pair<Scalar, Scalar>> {
    const Scalar disc = b * b - 4 * a * c;
    if (disc < 0 || a == 0) return std::nullopt;
    const Scalar sq = std::sqrt(disc);
    return std::make_pair((-b - sq) / (2 * a), (-b + sq) / (2 * a));
  };
  auto in_range = [&](Scalar t) { return t > t_min && t < t_max; };

  switch (prim.shape) {
    case ShapeKind::kSphere: {
      const Scalar r = prim.size.x();
      auto ts = pick(d.dot(d), 2 * o.dot(d), o.dot(o) - r * r);
      if (!ts) return std::nullopt;
      if (in_range(ts->first)) return ts->first;
      if (in_range(ts->second)) return ts->second;
      return std::nullopt;
    }
    case ShapeKind::kEllipsoid: {
      const Vec3 os = o.cwiseQuotient(prim.size);
      const Vec3 ds = d.cwiseQuotient(prim.size);
      auto ts = pick(ds.dot(ds), 2 * os.dot(ds), os.dot(os) - 1.0);
      if (!ts) return std::nullopt;
      if (in_range(ts->first)) return ts->first;
      if (in_range(ts->second)) return ts->second;
      return std::nullopt;
    }
    case ShapeKind::kCylinder: {
      const Scalar r = prim.size.x(), hh = prim.size.y();
      auto ts = pick(d.x() * d.x() + d.y() * d.y(), 2 * (o.x() * d.x() + o.y() * d.y()),
                     o.x() * o.x() + o.y() * o.y() - r * r);
      if (!ts) return std::nullopt;
      for (Scalar t : {ts->first, ts->second})
        if (in_range(t) && std::abs(o.z() + t * d.z()) <= hh) return t;
      return std::nullopt;
    }
    case ShapeKind::kDisc: {
      if (d.z() == 0) return std::nullopt;
      const Scalar t = -o.z() / d.z();
      if (!in_range(t)) return std::nullopt;
      const Scalar x = o.x() + t * d.x(), y = o.y() + t * d.y();
      if (x * x + y * y > prim.size.x() * prim.size.x()) return std::nullopt;
      return t;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

using nlohmann::json;

json pose_to_json(const Isometry& iso) {
  const Eigen::Quaternion<Scalar> q(iso.linear());
  const Vec3 t = iso.translation();
  return json{{"t", {t.x(), t.y(), t.z()}}, {"q", {q.w(), q.x(), q.y(), q.z()}}};
}

Isometry pose_from_json(const json& j) {
  const auto& t = j.at("t");
  const auto& q = j.at("q");
  Isometry iso = Isometry::Identity();
  iso.translation() = Vec3(t.at(0), t.at(1), t.at(2));
  iso.linear() =
      Eigen::Quaternion<Scalar>(q.at(0), q.at(1), q.at(2), q.at(3)).toRotationMatrix();
  return iso;
}

json config_json(const SceneConfig& c) {
  return json{{"n_rows", c.n_rows},
              {"plants_per_row", c.plants_per_row},
              {"row_spacing", c.row_spacing},
              {"plant_spacing", c.plant_spacing},
              {"fruit_radius_range", {c.fruit_radius_range.first, c.fruit_radius_range.second}},
              {"fruits_per_plant_range",
               {c.fruits_per_plant_range.first, c.fruits_per_plant_range.second}},
              {"leaf_count_range", {c.leaf_count_range.first, c.leaf_count_range.second}},
              {"plant_height_range", {c.plant_height_range.first, c.plant_height_range.second}},
              {"rng_seed", c.rng_seed},
              {"stem_class", static_cast<int>(c.stem_class)}};
}

SceneConfig config_from(const json& j) {
  SceneConfig c;
  c.n_rows = j.at("n_rows");
  c.plants_per_row = j.at("plants_per_row");
  c.row_spacing = j.at("row_spacing");
  c.plant_spacing = j.at("plant_spacing");
  c.fruit_radius_range = {j.at("fruit_radius_range").at(0), j.at("fruit_radius_range").at(1)};
  c.fruits_per_plant_range = {j.at("fruits_per_plant_range").at(0),
                              j.at("fruits_per_plant_range").at(1)};
  c.leaf_count_range = {j.at("leaf_count_range").at(0), j.at("leaf_count_range").at(1)};
  c.plant_height_range = {j.at("plant_height_range").at(0), j.at("plant_height_range").at(1)};
  c.rng_seed = j.at("rng_seed");
  c.stem_class = static_cast<SemanticClass>(j.at("stem_class").get<int>());
  return c;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json prims = json::array();
  for (const Primitive& p : scene.primitives) {
    prims.push_back(json{{"shape", static_cast<int>(p.shape)},
                         {"pose", pose_to_json(p.world_T_local)},
                         {"size", {p.size.x(), p.size.y(), p.size.z()}},
                         {"cls", static_cast<int>(p.cls)},
                         {"instance", p.instance_id}});
  }
  json rows = json::array();
  for (const RowGeometry& r : scene.rows) {
    rows.push_back(json{{"origin", {r.origin.x(), r.origin.y(), r.origin.z()}},
                        {"axis", {r.axis.x(), r.axis.y(), r.axis.z()}},
                        {"length", r.length},
                        {"height", r.height}});
  }
  json doc{{"format", "hortimap-scene"},
           {"version", 1},
           {"config", config_json(scene.config)},
           {"primitives", prims},
           {"rows", rows},
           {"fruit_instance_ids", scene.fruit_instance_ids}};
  return doc.dump(2);
}

Scene scene_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("format") != "hortimap-scene" || doc.at("version") != 1)
    throw std::invalid_argument("scene_from_json: unrecognized document");

  Scene scene;
  scene.config = config_from(doc.at("config"));
  for (const auto& jp : doc.at("primitives")) {
    Primitive p;
    p.shape = static_cast<ShapeKind>(jp.at("shape").get<int>());
    p.world_T_local = pose_from_json(jp.at("pose"));
    p.size = Vec3(jp.at("size").at(0), jp.at("size").at(1), jp.at("size").at(2));
    p.cls = static_cast<SemanticClass>(jp.at("cls").get<int>());
    p.instance_id = jp.at("instance");
    scene.primitives.push_back(p);
  }
  for (const auto& jr : doc.at("rows")) {
    RowGeometry r;
    r.origin = Vec3(jr.at("origin").at(0), jr.at("origin").at(1), jr.at("origin").at(2));
    r.axis = Vec3(jr.at("axis").at(0), jr.at("axis").at(1), jr.at("axis").at(2));
    r.length = jr.at("length");
    r.height = jr.at("height");
    scene.rows.push_back(r);
  }
  scene.fruit_instance_ids = doc.at("fruit_instance_ids").get<std::vector<std::int32_t>>();
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scene: cannot open " + path);
  out << scene_to_json(scene);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scene: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

}  // namespace hortimap
