#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "hortimap/types.hpp"

namespace hortimap {

/// Raised when a metric has no defined value (empty cloud, zero ground truth).
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalConfig {
  Scalar tau = 0.015;                 // inlier distance threshold
  Scalar gt_surface_density = 1e5;    // points per m^2 for the GT fruit cloud

  void validate() const;
};

/// Symmetric mean nearest-neighbor distance. Exact; a uniform grid accelerates
/// the NN queries with a brute-force fallback for degenerate extents.
Scalar chamfer_distance(std::span<const Vec3> p, std::span<const Vec3> q);

struct PrecisionRecall {
  Scalar precision = 0;
  Scalar recall = 0;
  Scalar f1 = 0;
};

PrecisionRecall precision_recall_f1(std::span<const Vec3> p, std::span<const Vec3> q, Scalar tau);

Scalar volume_accuracy(Scalar v_est, Scalar v_gt);  // percent, 100 * est / gt
Scalar count_accuracy(int n_est, int n_gt);         // percent

struct MetricsReport {
  bool defined = false;  // false when the row had no ground-truth fruit
  Scalar chamfer = 0;
  Scalar precision = 0;
  Scalar recall = 0;
  Scalar f1 = 0;
  Scalar volume_accuracy_pct = 0;        // against analytic GT volumes
  Scalar volume_accuracy_hull_pct = 0;   // against hull-of-GT-samples volumes
  Scalar count_accuracy_pct = 0;
  int fruit_count_est = 0;
  int fruit_count_gt = 0;
  Scalar volume_est = 0;
  Scalar volume_gt_analytic = 0;
  Scalar volume_gt_hull = 0;
  // Wall-clock seconds per phase; excluded from the deterministic metrics
  // serialization and written to the timing report instead.
  std::map<std::string, Scalar> runtime;
};

}  // namespace hortimap
