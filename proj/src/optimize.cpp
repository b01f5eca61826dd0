#include "hortimap/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace hortimap {

namespace {

constexpr int kParamsPerSplat = 11;  // mu 3, color 3, opacity 1, log-radius 1, semantic logits 3

using ParamVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

ParamVec pack(const std::vector<Gaussian3D>& splats) {
  ParamVec theta(kParamsPerSplat * splats.size());
  for (std::size_t i = 0; i < splats.size(); ++i) {
    const Gaussian3D& g = splats[i];
    auto seg = theta.segment(kParamsPerSplat * i, kParamsPerSplat);
    seg.segment<3>(0) = g.mu;
    seg.segment<3>(3) = g.color;
    const Scalar o = std::clamp<Scalar>(g.opacity, 1e-4, 1.0 - 1e-4);
    seg[6] = std::log(o / (1.0 - o));
    seg[7] = std::log(std::max<Scalar>(g.radius, 1e-6));
    ClassVec s = g.semantic.cwiseMax(1e-9);
    seg.segment<kNumClasses>(8) = s.array().log().matrix();
  }
  return theta;
}

void unpack(const ParamVec& theta, std::vector<Gaussian3D>& splats) {
  for (std::size_t i = 0; i < splats.size(); ++i) {
    Gaussian3D& g = splats[i];
    const auto seg = theta.segment(kParamsPerSplat * i, kParamsPerSplat);
    g.mu = seg.segment<3>(0);
    g.color = seg.segment<3>(3);
    g.opacity = 1.0 / (1.0 + std::exp(-seg[6]));
    g.radius = std::exp(seg[7]);
    ClassVec logits = seg.segment<kNumClasses>(8);
    const Scalar m = logits.maxCoeff();
    ClassVec e = (logits.array() - m).exp();
    g.semantic = e / e.sum();
  }
}

// Natural-parameter gradients chained through the reparameterizations.
ParamVec chain(const std::vector<Gaussian3D>& splats, const std::vector<SplatGrad>& grads) {
  ParamVec out(kParamsPerSplat * splats.size());
  for (std::size_t i = 0; i < splats.size(); ++i) {
    const Gaussian3D& g = splats[i];
    const SplatGrad& d = grads[i];
    auto seg = out.segment(kParamsPerSplat * i, kParamsPerSplat);
    seg.segment<3>(0) = d.d_mu;
    seg.segment<3>(3) = d.d_color;
    seg[6] = d.d_opacity * g.opacity * (1.0 - g.opacity);
    seg[7] = d.d_radius * g.radius;
    const Scalar dot = d.d_semantic.dot(g.semantic);
    for (int k = 0; k < kNumClasses; ++k)
      seg[8 + k] = g.semantic[k] * (d.d_semantic[k] - dot);
  }
  return out;
}

Scalar group_lr(const OptimConfig& cfg, int local_index) {
  if (local_index < 3) return cfg.lr_mu;
  if (local_index < 6) return cfg.lr_color;
  if (local_index == 6) return cfg.lr_opacity;
  if (local_index == 7) return cfg.lr_radius;
  return cfg.lr_semantic;
}

}  // namespace

OptimizeStats optimize(GaussianMap& map, const SemanticObservation& obs, const LossWeights& w,
                       const OptimConfig& cfg) {
  OptimizeStats stats;
  if (cfg.iterations <= 0 || map.splats.empty()) return stats;

  ParamVec theta = pack(map.splats);
  ParamVec m = ParamVec::Zero(theta.size());
  ParamVec v = ParamVec::Zero(theta.size());

  for (int it = 0; it < cfg.iterations; ++it) {
    unpack(theta, map.splats);
    const LossResult loss =
        mapping_loss(map.splats, obs, w, cfg.silhouette_threshold);
    stats.loss_trace.push_back(loss.value);

    const ParamVec grad = chain(map.splats, loss.grads);
    const Scalar b1t = 1.0 - std::pow(cfg.beta1, it + 1);
    const Scalar b2t = 1.0 - std::pow(cfg.beta2, it + 1);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
      const Scalar mh = m[j] / b1t;
      const Scalar vh = v[j] / b2t;
      const Scalar lr = group_lr(cfg, static_cast<int>(j % kParamsPerSplat));
      theta[j] -= lr * mh / (std::sqrt(vh) + cfg.adam_eps);
    }
  }

  unpack(theta, map.splats);
  const RenderedFrame final_frame = render(map.splats, obs.cam, obs.cam_T_world);
  stats.loss_trace.push_back(
      mapping_loss_value(final_frame, obs, w, cfg.silhouette_threshold));
  return stats;
}

int densify(GaussianMap& map, const SemanticObservation& obs, const DensifyConfig& cfg, Rng& rng) {
  const CameraModel& cam = obs.cam;
  const RenderedFrame current = render(map.splats, cam, obs.cam_T_world);
  const Isometry world_T_cam = obs.cam_T_world.inverse();

  int added = 0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Scalar d_gt = obs.depth(v, u);
      if (!depth_valid(cam, d_gt)) continue;

      const bool uncovered = current.silhouette(v, u) < cfg.silhouette_threshold;
      const bool depth_off = std::abs(current.depth(v, u) - d_gt) > cfg.depth_error_threshold;
      if (!uncovered && !depth_off) continue;

      const bool is_target = obs.labels(v, u) == static_cast<int>(cfg.target);
      if (!is_target && uniform(rng, 0.0, 1.0) >= cfg.nontarget_keep_fraction) continue;

      Gaussian3D g;
      g.mu = world_T_cam * backproject(cam, u, v, d_gt);
      g.radius = d_gt / cam.fx;  // one-pixel footprint
      g.color = obs.color.at(v, u);
      g.opacity = cfg.init_opacity;
      g.semantic = ClassVec::Constant(cfg.label_smoothing / kNumClasses);
      g.semantic[obs.labels(v, u)] += 1.0 - cfg.label_smoothing;
      map.splats.push_back(g);
      ++added;
    }
  }
  return added;
}

int prune(GaussianMap& map, Scalar min_opacity, Scalar max_radius) {
  const auto before = map.splats.size();
  std::erase_if(map.splats, [&](const Gaussian3D& g) {
    return g.opacity < min_opacity || g.radius > max_radius;
  });
  return static_cast<int>(before - map.splats.size());
}

}  // namespace hortimap
