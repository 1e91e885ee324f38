#pragma once

#include <cstdint>
#include <vector>

#include "frsim/sim_runtime.hpp"

namespace frsim {

struct SamplerConfig {
  std::uint64_t period_ns = 1'000'000;
  std::uint64_t warmup_ns = 50'000'000;  // cold-miss window
  double threshold = 0.5;
  double decision_fraction = 0.8;

  void validate() const;
};

// Counter deltas over one sampling period ending at t_ns.
struct PmcSample {
  std::uint64_t t_ns;
  std::uint64_t d_misses;
  std::uint64_t d_loads;

  bool operator==(const PmcSample&) const = default;
};

// L3 misses per 1000 load instructions.
struct MetricPoint {
  std::uint64_t t_ns;
  double value;
};

struct Verdict {
  bool attack_detected = false;
  double fraction_above_threshold = 0.0;
  std::size_t samples_total = 0;
  std::size_t samples_post_warmup = 0;
};

// Periodic sampler of the victim counters. Attach via
// Simulation::add_observer, then finish() to close the trailing partial
// window so deltas telescope to the final totals.
class PmcSampler {
 public:
  explicit PmcSampler(SamplerConfig cfg);

  void observe(std::uint64_t now_ns, const PmcCounters& counters);
  void finish(std::uint64_t now_ns, const PmcCounters& counters);

  const std::vector<PmcSample>& samples() const { return samples_; }
  const SamplerConfig& config() const { return cfg_; }

 private:
  void emit(std::uint64_t t_ns, const PmcCounters& counters);

  SamplerConfig cfg_;
  std::uint64_t next_boundary_ns_;
  PmcCounters last_;
  std::vector<PmcSample> samples_;
};

MetricPoint compute_metric(const PmcSample& sample);
std::vector<MetricPoint> compute_metrics(const std::vector<PmcSample>& samples);

// Drops samples inside the warm-up window, then flags an attack when the
// fraction of samples at or above the threshold reaches the decision
// fraction. The fraction itself is always reported.
Verdict classify(const std::vector<MetricPoint>& metrics, const SamplerConfig& cfg);

}  // namespace frsim
