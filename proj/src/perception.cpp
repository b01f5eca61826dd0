#include "hortimap/perception.hpp"

#include <stdexcept>

#include "hortimap/rng.hpp"

namespace hortimap {

void NoiseConfig::validate() const {
  if (p_correct < 0 || p_correct > 1)
    throw std::invalid_argument("noise config: p_correct outside [0,1]");
  auto check = [](std::pair<Scalar, Scalar> r, const char* what) {
    if (r.first > r.second || r.first < 0 || r.second > 1)
      throw std::invalid_argument(std::string("noise config: bad range ") + what);
  };
  check(conf_correct_range, "conf_correct_range");
  check(conf_wrong_range, "conf_wrong_range");
}

SemanticObservation corrupt_labels(const GroundTruthFrame& frame, const NoiseConfig& cfg) {
  cfg.validate();

  SemanticObservation obs;
  obs.cam = frame.cam;
  obs.cam_T_world = frame.cam_T_world;
  obs.color = frame.color;
  obs.depth = frame.depth;
  obs.labels = frame.true_labels;
  obs.confidence = Image::Zero(frame.cam.height, frame.cam.width);

  Rng rng(cfg.rng_seed);
  for (int v = 0; v < frame.cam.height; ++v) {
    for (int u = 0; u < frame.cam.width; ++u) {
      const bool correct = uniform(rng, 0.0, 1.0) < cfg.p_correct;
      if (!correct) {
        // uniform over the other |S|-1 classes
        const int truth = frame.true_labels(v, u);
        const int shift = 1 + uniform_int(rng, 0, kNumClasses - 2);
        obs.labels(v, u) = (truth + shift) % kNumClasses;
      }
      const auto& range = correct ? cfg.conf_correct_range : cfg.conf_wrong_range;
      obs.confidence(v, u) = uniform(rng, range.first, range.second);
    }
  }
  return obs;
}

}  // namespace hortimap
