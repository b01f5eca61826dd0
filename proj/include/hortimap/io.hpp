#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hortimap/gaussian_map.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

/// ASCII PLY point cloud with the optional attributes this project emits.
/// Doubles are printed with max_digits10 so a write/read cycle is bit-exact.
struct PlyCloud {
  PointCloud points;
  std::vector<std::int32_t> cls;       // empty or per point
  std::vector<std::int32_t> instance;  // empty or per point
  std::vector<std::array<std::uint8_t, 3>> rgb;  // empty or per point
};

void write_ply(const std::string& path, const PlyCloud& cloud);
PlyCloud read_ply(const std::string& path);

/// Versioned binary splat checkpoint (mu, radius, color, opacity, semantic).
void save_checkpoint(const std::string& path, const GaussianMap& map);
GaussianMap load_checkpoint(const std::string& path);

/// Splat means colored by argmax class, for quick visual inspection.
void export_splats_ply(const std::string& path, const GaussianMap& map);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// FNV-1a over a canonical string, hex encoded. Used to key output files to
/// their configuration.
std::string fnv1a_hex(const std::string& text);

}  // namespace hortimap
