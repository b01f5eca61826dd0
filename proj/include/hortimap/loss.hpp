#pragma once

#include <span>
#include <vector>

#include "hortimap/gaussian_map.hpp"
#include "hortimap/perception.hpp"
#include "hortimap/types.hpp"

namespace hortimap {

struct LossWeights {
  Scalar lambda_depth = 1.0;
  Scalar lambda_color = 0.5;
  Scalar lambda_semantic = 0.1;
  Scalar alpha = 0.8;  // balance of L1 vs (1 - SSIM) inside the color term
};

struct SplatGrad {
  Vec3 d_mu = Vec3::Zero();
  Scalar d_radius = 0;
  Vec3 d_color = Vec3::Zero();
  Scalar d_opacity = 0;
  ClassVec d_semantic = ClassVec::Zero();
};

struct LossResult {
  Scalar value = 0;
  std::vector<SplatGrad> grads;
};

/// Mean SSIM map over the three color channels, 11x11 Gaussian window
/// (sigma 1.5), zero padding, C1 = 0.01^2, C2 = 0.03^2 on unit-range data.
Image ssim_map(const ColorImage& x, const ColorImage& y);

/// Mapping loss on an already-rendered frame:
///   sum over masked pixels of
///     lambda_d |D - D_gt| + lambda_c (alpha |C - C_gt|_1 +
///     (1-alpha)(1 - SSIM)) + lambda_s conf^2 |S - S_gt|_1
/// where S_gt is the one-hot encoding of the observed labels and the mask
/// keeps pixels with silhouette > silhouette_threshold and valid depth.
Scalar mapping_loss_value(const RenderedFrame& rendered, const SemanticObservation& obs,
                          const LossWeights& w, Scalar silhouette_threshold);

/// Full loss with analytic gradients for every splat parameter. Renders
/// internally; the returned value equals mapping_loss_value of that render.
LossResult mapping_loss(std::span<const Gaussian3D> splats, const SemanticObservation& obs,
                        const LossWeights& w, Scalar silhouette_threshold);

}  // namespace hortimap
