#pragma once

#include <vector>

#include "hortimap/loss.hpp"
#include "hortimap/rng.hpp"

namespace hortimap {

/// Adam over reparameterized splat parameters: radius through log, opacity
/// through logit, semantics through softmax logits; means and colors raw.
/// Learning rates are per parameter group, tuned at desk scale.
struct OptimConfig {
  int iterations = 60;
  Scalar lr_mu = 1e-4;
  Scalar lr_color = 2.5e-3;
  Scalar lr_semantic = 2.5e-3;
  Scalar lr_opacity = 5e-2;
  Scalar lr_radius = 1e-3;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar adam_eps = 1e-8;
  Scalar silhouette_threshold = 0.9;
};

struct OptimizeStats {
  std::vector<Scalar> loss_trace;  // loss before each step, then final
};

OptimizeStats optimize(GaussianMap& map, const SemanticObservation& obs, const LossWeights& w,
                       const OptimConfig& cfg);

struct DensifyConfig {
  Scalar silhouette_threshold = 0.9;
  Scalar nontarget_keep_fraction = 0.1;
  Scalar depth_error_threshold = 0.05;
  SemanticClass target = SemanticClass::kFruit;
  Scalar init_opacity = 0.5;
  Scalar label_smoothing = 0.15;  // semantic init = smoothed one-hot
};

/// Spawns splats at back-projected depth for pixels the current map explains
/// poorly (silhouette below threshold or depth error above threshold).
/// Target-labeled pixels always spawn; the rest keep with probability
/// nontarget_keep_fraction. Returns the number added.
int densify(GaussianMap& map, const SemanticObservation& obs, const DensifyConfig& cfg, Rng& rng);

/// Drops splats with opacity below min_opacity or radius above max_radius.
int prune(GaussianMap& map, Scalar min_opacity, Scalar max_radius);

}  // namespace hortimap
