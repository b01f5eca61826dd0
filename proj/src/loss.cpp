#include "hortimap/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace hortimap {

namespace {

constexpr int kWindow = 11;
constexpr Scalar kSsimSigma = 1.5;
constexpr Scalar kC1 = 0.01 * 0.01;
constexpr Scalar kC2 = 0.03 * 0.03;

const std::array<Scalar, kWindow>& ssim_kernel() {
  static const std::array<Scalar, kWindow> kernel = [] {
    std::array<Scalar, kWindow> k{};
    Scalar sum = 0;
    for (int i = 0; i < kWindow; ++i) {
      const Scalar x = i - kWindow / 2;
      k[i] = std::exp(-x * x / (2 * kSsimSigma * kSsimSigma));
      sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// 'Same'-size separable convolution with zero padding. The kernel is
// symmetric, so this is its own transpose in the backward pass.
Image blur(const Image& img) {
  const auto& k = ssim_kernel();
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  constexpr int r = kWindow / 2;

  Image tmp = Image::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Scalar acc = 0;
      const int lo = std::max(-r, -x), hi = std::min(r, w - 1 - x);
      for (int i = lo; i <= hi; ++i) acc += k[i + r] * img(y, x + i);
      tmp(y, x) = acc;
    }
  Image out = Image::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Scalar acc = 0;
      const int lo = std::max(-r, -y), hi = std::min(r, h - 1 - y);
      for (int i = lo; i <= hi; ++i) acc += k[i + r] * tmp(y + i, x);
      out(y, x) = acc;
    }
  return out;
}

struct SsimChannel {
  Image value;                       // per-pixel SSIM of this channel
  Image mu_x, mu_y, vx, vy, vxy;     // filtered fields, kept for backward
};

SsimChannel ssim_forward(const Image& x, const Image& y) {
  SsimChannel s;
  s.mu_x = blur(x);
  s.mu_y = blur(y);
  s.vx = blur(x * x);
  s.vy = blur(y * y);
  s.vxy = blur(x * y);
  const Image a1 = 2 * s.mu_x * s.mu_y + kC1;
  const Image a2 = 2 * (s.vxy - s.mu_x * s.mu_y) + kC2;
  const Image b1 = s.mu_x.square() + s.mu_y.square() + kC1;
  const Image b2 = (s.vx - s.mu_x.square()) + (s.vy - s.mu_y.square()) + kC2;
  s.value = a1 * a2 / (b1 * b2);
  return s;
}

// Given dL/dssim per pixel, returns dL/dx. y is constant (ground truth).
Image ssim_backward(const SsimChannel& s, const Image& x, const Image& y, const Image& g) {
  const Image a1 = 2 * s.mu_x * s.mu_y + kC1;
  const Image a2 = 2 * (s.vxy - s.mu_x * s.mu_y) + kC2;
  const Image b1 = s.mu_x.square() + s.mu_y.square() + kC1;
  const Image b2 = (s.vx - s.mu_x.square()) + (s.vy - s.mu_y.square()) + kC2;
  const Image denom = b1 * b2;

  const Image d_mu = (2 * s.mu_y * (a2 - a1) - 2 * s.value * s.mu_x * (b2 - b1)) / denom;
  const Image d_vx = -s.value / b2;
  const Image d_vxy = 2 * a1 / denom;

  return blur(Image(g * d_mu)) + 2 * x * blur(Image(g * d_vx)) + y * blur(Image(g * d_vxy));
}

inline Scalar sgn(Scalar v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

struct LossLayer {
  Scalar value = 0;
  std::array<Image, 3> a_color;
  Image a_depth;
  std::array<Image, kNumClasses> a_semantic;
};

LossLayer loss_layer(const RenderedFrame& rendered, const SemanticObservation& obs,
                     const LossWeights& w, Scalar silhouette_threshold) {
  const int h = rendered.height, width = rendered.width;
  const auto shape_ok = [&](const auto& img) {
    return img.rows() == h && img.cols() == width;
  };
  if (h != obs.cam.height || width != obs.cam.width || !shape_ok(obs.depth) ||
      !shape_ok(obs.labels) || !shape_ok(obs.confidence) || !shape_ok(obs.color.ch[0]) ||
      !shape_ok(obs.color.ch[1]) || !shape_ok(obs.color.ch[2]))
    throw std::invalid_argument("mapping loss: frame/observation shape mismatch");

  LossLayer out;
  for (auto& a : out.a_color) a = Image::Zero(h, width);
  out.a_depth = Image::Zero(h, width);
  for (auto& a : out.a_semantic) a = Image::Zero(h, width);

  Image mask(h, width);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < width; ++u)
      mask(v, u) = (rendered.silhouette(v, u) > silhouette_threshold &&
                    depth_valid(obs.cam, obs.depth(v, u)))
                       ? 1.0
                       : 0.0;

  // Depth and semantic L1 terms plus the color L1 part.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < width; ++u) {
      const Scalar m = mask(v, u);
      if (m == 0.0) continue;

      const Scalar rd = rendered.depth(v, u) - obs.depth(v, u);
      out.value += w.lambda_depth * std::abs(rd);
      out.a_depth(v, u) = w.lambda_depth * sgn(rd);

      for (int c = 0; c < 3; ++c) {
        const Scalar rc = rendered.color.ch[c](v, u) - obs.color.ch[c](v, u);
        out.value += w.lambda_color * w.alpha * std::abs(rc);
        out.a_color[c](v, u) = w.lambda_color * w.alpha * sgn(rc);
      }

      const Scalar conf2 = obs.confidence(v, u) * obs.confidence(v, u);
      const int label = obs.labels(v, u);
      for (int k = 0; k < kNumClasses; ++k) {
        const Scalar rs = rendered.semantic.ch[k](v, u) - (k == label ? 1.0 : 0.0);
        out.value += w.lambda_semantic * conf2 * std::abs(rs);
        out.a_semantic[k](v, u) = w.lambda_semantic * conf2 * sgn(rs);
      }
    }
  }

  // Structural part of the color term.
  const Scalar w_ssim = w.lambda_color * (1.0 - w.alpha);
  if (w_ssim != 0.0) {
    const Image g = (-w_ssim / 3.0) * mask;  // dL/dssim_c, equal per channel
    for (int c = 0; c < 3; ++c) {
      const SsimChannel s = ssim_forward(rendered.color.ch[c], obs.color.ch[c]);
      out.value += (w_ssim / 3.0) * (mask * (1.0 - s.value)).sum();
      out.a_color[c] += ssim_backward(s, rendered.color.ch[c], obs.color.ch[c], g);
    }
  }
  return out;
}

}  // namespace

Image ssim_map(const ColorImage& x, const ColorImage& y) {
  Image acc = Image::Zero(x.ch[0].rows(), x.ch[0].cols());
  for (int c = 0; c < 3; ++c) acc += ssim_forward(x.ch[c], y.ch[c]).value;
  return acc / 3.0;
}

Scalar mapping_loss_value(const RenderedFrame& rendered, const SemanticObservation& obs,
                          const LossWeights& w, Scalar silhouette_threshold) {
  return loss_layer(rendered, obs, w, silhouette_threshold).value;
}

LossResult mapping_loss(std::span<const Gaussian3D> splats, const SemanticObservation& obs,
                        const LossWeights& w, Scalar silhouette_threshold) {
  const CameraModel& cam = obs.cam;
  const RenderedFrame rendered = render(splats, cam, obs.cam_T_world);
  const LossLayer layer = loss_layer(rendered, obs, w, silhouette_threshold);

  LossResult result;
  result.value = layer.value;
  result.grads.assign(splats.size(), SplatGrad{});

  const auto projected = detail::project_and_sort(splats, cam, obs.cam_T_world);

  // Active pixels: any nonzero channel adjoint.
  Image active = Image::Zero(cam.height, cam.width);
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u) {
      Scalar any = std::abs(layer.a_depth(v, u));
      for (int c = 0; c < 3; ++c) any += std::abs(layer.a_color[c](v, u));
      for (int k = 0; k < kNumClasses; ++k) any += std::abs(layer.a_semantic[k](v, u));
      active(v, u) = any != 0.0 ? 1.0 : 0.0;
    }

  // Replay compositing front to back, holding the per-pixel transmittance and
  // channel prefix sums; the suffix needed for d/d(alpha) is total - prefix.
  constexpr int kCh = 3 + 1 + kNumClasses;  // color, depth, semantic
  Image transmittance = Image::Constant(cam.height, cam.width, 1.0);
  std::array<Image, kCh> prefix;
  for (auto& p : prefix) p = Image::Zero(cam.height, cam.width);

  struct PixGrad {
    Scalar o = 0, u = 0, v = 0, sigma = 0, z = 0;
    Vec3 color = Vec3::Zero();
    ClassVec semantic = ClassVec::Zero();
  };

  for (const auto& [idx, s] : projected) {
    const Gaussian3D& g = splats[idx];
    PixGrad acc;

    const Scalar fr2 = s.footprint_radius * s.footprint_radius;
    const Scalar inv_2s2 = 1.0 / (2.0 * s.sigma2d * s.sigma2d);
    const int u0 = std::max(0, static_cast<int>(std::floor(s.center.x() - s.footprint_radius)));
    const int u1 = std::min(cam.width - 1,
                            static_cast<int>(std::ceil(s.center.x() + s.footprint_radius)));
    const int v0 = std::max(0, static_cast<int>(std::floor(s.center.y() - s.footprint_radius)));
    const int v1 = std::min(cam.height - 1,
                            static_cast<int>(std::ceil(s.center.y() + s.footprint_radius)));

    std::array<Scalar, kCh> values;
    for (int c = 0; c < 3; ++c) values[c] = g.color[c];
    values[3] = s.z;
    for (int k = 0; k < kNumClasses; ++k) values[4 + k] = g.semantic[k];

    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const Scalar dx = u - s.center.x();
        const Scalar dy = v - s.center.y();
        const Scalar d2 = dx * dx + dy * dy;
        if (d2 > fr2) continue;
        if (active(v, u) == 0.0) continue;

        const Scalar e = std::exp(-d2 * inv_2s2);
        const Scalar raw = g.opacity * e;
        const bool clamped = raw >= kMaxAlpha;
        const Scalar f = clamped ? kMaxAlpha : raw;
        const Scalar t = transmittance(v, u);
        const Scalar wgt = f * t;

        const std::array<Scalar, kCh> adj = {
            layer.a_color[0](v, u), layer.a_color[1](v, u), layer.a_color[2](v, u),
            layer.a_depth(v, u),    layer.a_semantic[0](v, u), layer.a_semantic[1](v, u),
            layer.a_semantic[2](v, u)};

        // Direct channel-value gradients (through w only).
        for (int c = 0; c < 3; ++c) acc.color[c] += adj[c] * wgt;
        acc.z += adj[3] * wgt;
        for (int k = 0; k < kNumClasses; ++k) acc.semantic[k] += adj[4 + k] * wgt;

        // d loss / d f through this pixel: value * T - suffix / (1 - f).
        Scalar dl_df = 0;
        for (int c = 0; c < kCh; ++c) {
          Image& p = prefix[c];
          p(v, u) += wgt * values[c];
          // suffix = total - prefix(now includes this splat)
          Scalar total = 0;
          if (c < 3) total = rendered.color.ch[c](v, u);
          else if (c == 3) total = rendered.depth(v, u);
          else total = rendered.semantic.ch[c - 4](v, u);
          const Scalar suffix = total - p(v, u);
          dl_df += adj[c] * (values[c] * t - suffix / (1.0 - f));
        }

        if (!clamped) {
          acc.o += dl_df * e;
          const Scalar dl_dd2 = dl_df * (-f * inv_2s2);
          acc.u += dl_dd2 * (-2.0 * dx);
          acc.v += dl_dd2 * (-2.0 * dy);
          acc.sigma += dl_df * f * d2 / (s.sigma2d * s.sigma2d * s.sigma2d);
        }

        transmittance(v, u) = t * (1.0 - f);
      }
    }

    // Chain pixel-space gradients back to camera-space position and radius.
    const Vec3 p_cam = obs.cam_T_world * g.mu;
    const Scalar z = p_cam.z();
    Vec3 d_pcam;
    d_pcam.x() = acc.u * cam.fx / z;
    d_pcam.y() = acc.v * cam.fy / z;
    d_pcam.z() = -acc.u * cam.fx * p_cam.x() / (z * z) - acc.v * cam.fy * p_cam.y() / (z * z) -
                 acc.sigma * g.radius * cam.fx / (z * z) + acc.z;

    SplatGrad& out = result.grads[idx];
    out.d_mu = obs.cam_T_world.linear().transpose() * d_pcam;
    out.d_radius = acc.sigma * cam.fx / z;
    out.d_color = acc.color;
    out.d_opacity = acc.o;
    out.d_semantic = acc.semantic;
  }
  return result;
}

}  // namespace hortimap
