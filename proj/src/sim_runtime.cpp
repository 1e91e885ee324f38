#include "frsim/sim_runtime.hpp"

#include <stdexcept>

namespace frsim {

namespace {

NoiseConfig make_noise_config(const SimConfig& cfg) {
  NoiseConfig nc;
  nc.eviction_rate_per_ms = cfg.noise_rate_per_ms;
  nc.seed = mix_seed(cfg.seed, 0x6e6f6973);  // noise stream
  nc.region_base = cfg.table_base;
  nc.region_lines = TTables::kRegionBytes / cfg.cache.line_size;
  return nc;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed ^ (tag * 0x9e3779b97f4a7c15ull);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Simulation::Simulation(const SimConfig& cfg)
    : cache_(cfg.cache),
      noise_(make_noise_config(cfg), cfg.cache.line_size),
      requests_(mix_seed(cfg.seed, 0x72657175)),
      ttables_(derive_ttables()) {
  if (cfg.table_base % 4096 != 0)
    throw std::invalid_argument("table_base must be page aligned");
  if (cfg.cache.line_size != 64)
    throw std::invalid_argument("the table layout assumes 64-byte lines");
  if (cfg.cache.sets < 64)
    throw std::invalid_argument("need >= 64 sets so the table region maps conflict-free");
  victim_.key = cfg.key;
  victim_.round_keys = key_expand(cfg.key);
  victim_.table_base = cfg.table_base;
  victim_.baseline_loads_per_encryption = cfg.baseline_loads_per_encryption;
  victim_.compute_cost_ns = cfg.compute_cost_ns;
  victim_.dedup.threshold_encryptions = cfg.dedup_threshold;
}

void Simulation::notify() {
  for (auto& obs : observers_) obs(clock_.now_ns, victim_.counters);
}

std::vector<std::uint64_t> Simulation::advance(std::uint64_t dt_ns) {
  clock_.now_ns += dt_ns;
  auto evicted = noise_.advance(cache_, clock_.now_ns);
  notify();
  return evicted;
}

std::vector<std::uint64_t> Simulation::idle(std::uint64_t dt_ns) { return advance(dt_ns); }

Simulation::EncryptionResult Simulation::run_encryption() {
  const std::uint64_t start = clock_.now_ns;
  advance(victim_.compute_cost_ns);

  const Block pt = requests_.next_plaintext();
  const Block ct = encrypt_block(pt, victim_.round_keys, [this](const AccessEvent& ev) {
    const AccessOutcome out = cache_.access(victim_.table_base + ev.byte_offset);
    victim_.counters.load_instructions += 1;
    if (!out.hit) victim_.counters.l3_misses += 1;
    advance(out.latency_ns);
  });

  victim_.counters.load_instructions += victim_.baseline_loads_per_encryption;
  victim_.completed_encryptions += 1;
  notify();
  return {ct, clock_.now_ns - start};
}

}  // namespace frsim
