#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>

#include "doctest.h"
#include "hortimap/perception.hpp"

using namespace hortimap;

namespace {

GroundTruthFrame synthetic_frame(int w, int h) {
  GroundTruthFrame frame;
  frame.cam.width = w;
  frame.cam.height = h;
  frame.cam.cx = w / 2.0;
  frame.cam.cy = h / 2.0;
  frame.color.resize(h, w);
  frame.depth = Image::Constant(h, w, 0.5);
  frame.true_labels = LabelImage::Zero(h, w);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) frame.true_labels(v, u) = (v * w + u) % kNumClasses;
  frame.instance_ids = LabelImage::Zero(h, w);
  return frame;
}

}  // namespace

TEST_CASE("p_correct = 1 keeps labels and draws confidence from the correct range") {
  const GroundTruthFrame frame = synthetic_frame(64, 48);
  NoiseConfig cfg;
  cfg.p_correct = 1.0;
  cfg.rng_seed = 3;
  const SemanticObservation obs = corrupt_labels(frame, cfg);
  CHECK((obs.labels == frame.true_labels).all());
  CHECK((obs.confidence >= cfg.conf_correct_range.first).all());
  CHECK((obs.confidence <= cfg.conf_correct_range.second).all());
}

TEST_CASE("p_correct = 0 flips every label") {
  const GroundTruthFrame frame = synthetic_frame(64, 48);
  NoiseConfig cfg;
  cfg.p_correct = 0.0;
  cfg.rng_seed = 4;
  const SemanticObservation obs = corrupt_labels(frame, cfg);
  for (int v = 0; v < 48; ++v)
    for (int u = 0; u < 64; ++u) {
      CHECK(obs.labels(v, u) != frame.true_labels(v, u));
      CHECK(obs.labels(v, u) >= 0);
      CHECK(obs.labels(v, u) < kNumClasses);
      CHECK(obs.confidence(v, u) >= cfg.conf_wrong_range.first);
      CHECK(obs.confidence(v, u) <= cfg.conf_wrong_range.second);
    }
}

TEST_CASE("empirical correctness rate concentrates at p_correct") {
  const GroundTruthFrame frame = synthetic_frame(320, 320);  // 102400 pixels
  NoiseConfig cfg;
  cfg.p_correct = 0.7;
  cfg.rng_seed = 11;
  const SemanticObservation obs = corrupt_labels(frame, cfg);

  const Scalar n = 320.0 * 320.0;
  Scalar correct = 0;
  for (int v = 0; v < 320; ++v)
    for (int u = 0; u < 320; ++u)
      if (obs.labels(v, u) == frame.true_labels(v, u)) correct += 1;
  const Scalar rate = correct / n;
  const Scalar sigma = std::sqrt(0.7 * 0.3 / n);
  CHECK(std::abs(rate - 0.7) < 3.0 * sigma);
  CHECK(std::abs(rate - 0.7) < 0.01);
}

TEST_CASE("wrong labels are uniform over the remaining classes") {
  const GroundTruthFrame frame = synthetic_frame(320, 320);
  NoiseConfig cfg;
  cfg.p_correct = 0.5;
  cfg.rng_seed = 21;
  const SemanticObservation obs = corrupt_labels(frame, cfg);

  // For each true class, the two wrong targets should split evenly.
  Scalar chi2 = 0;
  for (int truth = 0; truth < kNumClasses; ++truth) {
    std::array<Scalar, kNumClasses> counts{};
    Scalar wrong_total = 0;
    for (int v = 0; v < 320; ++v)
      for (int u = 0; u < 320; ++u) {
        if (frame.true_labels(v, u) != truth) continue;
        if (obs.labels(v, u) == truth) continue;
        counts[obs.labels(v, u)] += 1;
        wrong_total += 1;
      }
    REQUIRE(wrong_total > 1000);
    const Scalar expected = wrong_total / (kNumClasses - 1);
    for (int c = 0; c < kNumClasses; ++c) {
      if (c == truth) continue;
      chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
    }
  }
  // 3 dof total; 16.27 is the 0.001 quantile.
  CHECK(chi2 < 16.27);
}

TEST_CASE("corruption is deterministic per seed and carries the frame through") {
  const GroundTruthFrame frame = synthetic_frame(32, 24);
  NoiseConfig cfg;
  cfg.p_correct = 0.6;
  cfg.rng_seed = 77;
  const SemanticObservation a = corrupt_labels(frame, cfg);
  const SemanticObservation b = corrupt_labels(frame, cfg);
  CHECK((a.labels == b.labels).all());
  CHECK((a.confidence == b.confidence).all());
  CHECK((a.depth == frame.depth).all());

  cfg.rng_seed = 78;
  const SemanticObservation c = corrupt_labels(frame, cfg);
  CHECK(!(c.labels == a.labels).all());
}

TEST_CASE("noise config validation") {
  NoiseConfig bad;
  bad.p_correct = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  NoiseConfig bad2;
  bad2.conf_correct_range = {0.9, 0.2};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}
