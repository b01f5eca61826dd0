#include "hortimap/baseline.hpp"

#include <stdexcept>

namespace hortimap {

void BaselineConfig::validate() const {
  if (resolution <= 0) throw std::invalid_argument("baseline: resolution must be positive");
}

PointCloud baseline_fruit_cloud(const SemanticOctomap& map) {
  return map.occupied_centers(SemanticClass::kFruit);
}

Scalar baseline_cluster_eps(Scalar resolution) { return 2.0 * resolution; }

}  // namespace hortimap
