#pragma once

#include <cstdint>
#include <utility>

#include "hortimap/scene.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

/// Segmentation noise model: each pixel keeps its true label with probability
/// p_correct, otherwise gets one of the other classes uniformly. Confidence is
/// drawn from one range for correct pixels and another for wrong ones.
struct NoiseConfig {
  Scalar p_correct = 0.7;
  std::pair<Scalar, Scalar> conf_correct_range = {0.7, 1.0};
  std::pair<Scalar, Scalar> conf_wrong_range = {0.2, 0.6};
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// What the mapping pipeline consumes: the RGBD frame plus noisy per-pixel
/// labels and confidences from the (simulated) semantic extractor.
struct SemanticObservation {
  CameraModel cam;
  Isometry cam_T_world = Isometry::Identity();
  ColorImage color;
  Image depth;
  LabelImage labels;
  Image confidence;
};

SemanticObservation corrupt_labels(const GroundTruthFrame& frame, const NoiseConfig& cfg);

}  // namespace hortimap
