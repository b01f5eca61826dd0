#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "hortimap/types.hpp"

namespace hortimap {

enum class Phase : int { kOctomapMapping = 0, kGsMapping = 1, kPlanning = 2, kExecution = 3 };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kOctomapMapping: return "octomap_mapping";
    case Phase::kGsMapping: return "gs_mapping";
    case Phase::kPlanning: return "planning";
    case Phase::kExecution: return "execution";
  }
  return "invalid";
}

struct TimeSpan {
  Phase phase;
  Scalar begin = 0;  // seconds since log start
  Scalar end = 0;
};

class TimingLog {
 public:
  TimingLog() : t0_(Clock::now()) {}

  void record(Phase phase, Scalar begin_s, Scalar end_s) { spans_.push_back({phase, begin_s, end_s}); }
  Scalar now() const { return std::chrono::duration<Scalar>(Clock::now() - t0_).count(); }
  const std::vector<TimeSpan>& spans() const { return spans_; }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point t0_;
  std::vector<TimeSpan> spans_;
};

/// RAII span. Records on destruction.
class ScopedPhase {
 public:
  ScopedPhase(TimingLog& log, Phase phase) : log_(log), phase_(phase), begin_(log.now()) {}
  ~ScopedPhase() { log_.record(phase_, begin_, log_.now()); }
  ScopedPhase(const ScopedPhase&) = delete;
  ScopedPhase& operator=(const ScopedPhase&) = delete;

 private:
  TimingLog& log_;
  Phase phase_;
  Scalar begin_;
};

struct RuntimeBreakdown {
  std::map<std::string, Scalar> per_phase;  // raw wall-clock sums
  Scalar gs_mapping_raw = 0;
  // Splat optimization can run concurrently with the rest of the pipeline;
  // this is the part of its spans not overlapped by any other phase.
  Scalar gs_mapping_critical_path = 0;
  Scalar total = 0;
};

RuntimeBreakdown runtime_report(const std::vector<TimeSpan>& spans);

}  // namespace hortimap
