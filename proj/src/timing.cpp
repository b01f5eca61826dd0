#include "hortimap/timing.hpp"

#include <algorithm>

namespace hortimap {

RuntimeBreakdown runtime_report(const std::vector<TimeSpan>& spans) {
  RuntimeBreakdown out;
  out.per_phase = {{phase_name(Phase::kOctomapMapping), 0.0},
                   {phase_name(Phase::kGsMapping), 0.0},
                   {phase_name(Phase::kPlanning), 0.0},
                   {phase_name(Phase::kExecution), 0.0}};

  std::vector<std::pair<Scalar, Scalar>> others;
  for (const TimeSpan& s : spans) {
    const Scalar len = std::max<Scalar>(0, s.end - s.begin);
    out.per_phase[phase_name(s.phase)] += len;
    out.total += len;
    if (s.phase == Phase::kGsMapping)
      out.gs_mapping_raw += len;
    else
      others.emplace_back(s.begin, s.end);
  }

  // Critical-path share of splat optimization: its spans minus the union of
  // every other phase's spans (those run regardless; gs can overlap them).
  std::sort(others.begin(), others.end());
  std::vector<std::pair<Scalar, Scalar>> merged;
  for (const auto& iv : others) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  for (const TimeSpan& s : spans) {
    if (s.phase != Phase::kGsMapping) continue;
    Scalar remaining = std::max<Scalar>(0, s.end - s.begin);
    for (const auto& [b, e] : merged) {
      const Scalar lo = std::max(s.begin, b), hi = std::min(s.end, e);
      if (hi > lo) remaining -= hi - lo;
    }
    out.gs_mapping_critical_path += std::max<Scalar>(0, remaining);
  }
  return out;
}

}  // namespace hortimap
