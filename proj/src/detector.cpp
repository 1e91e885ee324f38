#include "frsim/detector.hpp"

#include <stdexcept>

namespace frsim {

void SamplerConfig::validate() const {
  if (period_ns == 0) throw std::invalid_argument("sampler period must be > 0");
  if (threshold <= 0) throw std::invalid_argument("detection threshold must be > 0");
  if (decision_fraction < 0 || decision_fraction > 1)
    throw std::invalid_argument("decision fraction must be in [0,1]");
}

PmcSampler::PmcSampler(SamplerConfig cfg) : cfg_(cfg), next_boundary_ns_(cfg.period_ns) {
  cfg_.validate();
}

void PmcSampler::emit(std::uint64_t t_ns, const PmcCounters& counters) {
  samples_.push_back(PmcSample{t_ns, counters.l3_misses - last_.l3_misses,
                               counters.load_instructions - last_.load_instructions});
  last_ = counters;
}

void PmcSampler::observe(std::uint64_t now_ns, const PmcCounters& counters) {
  while (next_boundary_ns_ <= now_ns) {
    emit(next_boundary_ns_, counters);
    next_boundary_ns_ += cfg_.period_ns;
  }
}

void PmcSampler::finish(std::uint64_t now_ns, const PmcCounters& counters) {
  observe(now_ns, counters);
  // Trailing partial window, so the sample deltas sum to the totals.
  if (now_ns + cfg_.period_ns != next_boundary_ns_) emit(now_ns, counters);
}

MetricPoint compute_metric(const PmcSample& sample) {
  const double value =
      sample.d_loads == 0
          ? 0.0
          : 1000.0 * static_cast<double>(sample.d_misses) / static_cast<double>(sample.d_loads);
  return MetricPoint{sample.t_ns, value};
}

std::vector<MetricPoint> compute_metrics(const std::vector<PmcSample>& samples) {
  std::vector<MetricPoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(compute_metric(s));
  return out;
}

Verdict classify(const std::vector<MetricPoint>& metrics, const SamplerConfig& cfg) {
  cfg.validate();
  Verdict v;
  v.samples_total = metrics.size();
  std::size_t above = 0;
  for (const auto& m : metrics) {
    if (m.t_ns < cfg.warmup_ns) continue;
    v.samples_post_warmup += 1;
    if (m.value >= cfg.threshold) above += 1;
  }
  if (v.samples_post_warmup == 0)
    throw std::logic_error("no samples past the warm-up window");
  v.fraction_above_threshold =
      static_cast<double>(above) / static_cast<double>(v.samples_post_warmup);
  v.attack_detected = v.fraction_above_threshold >= cfg.decision_fraction;
  return v;
}

}  // namespace frsim
