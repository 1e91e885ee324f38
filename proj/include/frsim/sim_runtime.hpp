#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "frsim/aes_ttable.hpp"
#include "frsim/cache_sim.hpp"

namespace frsim {

struct SimClock {
  std::uint64_t now_ns = 0;
};

// Victim-attributed counters. Only victim memory activity moves these;
// attacker flushes and probes never do.
struct PmcCounters {
  std::uint64_t l3_misses = 0;
  std::uint64_t load_instructions = 0;

  bool operator==(const PmcCounters&) const = default;
};

// Page-sharing warm-up: attacker flushes on the table region are
// meaningless until the victim has served this many encryptions.
struct DedupModel {
  std::uint64_t threshold_encryptions = 300;
};

class RequestGenerator {
 public:
  explicit RequestGenerator(std::uint64_t seed) : rng_(seed) {}

  Block next_plaintext() {
    Block b;
    for (int half = 0; half < 2; ++half) {
      const std::uint64_t r = rng_();
      for (int i = 0; i < 8; ++i)
        b.bytes[8 * half + i] = static_cast<std::uint8_t>(r >> (8 * i));
    }
    return b;
  }

 private:
  std::mt19937_64 rng_;
};

struct VictimProcess {
  AesKey key;
  RoundKeys round_keys;
  std::uint64_t table_base = 0x100000;  // page aligned
  PmcCounters counters;
  std::uint64_t baseline_loads_per_encryption = 340;
  std::uint64_t compute_cost_ns = 2000;
  DedupModel dedup;
  std::uint64_t completed_encryptions = 0;
};

struct SimConfig {
  CacheConfig cache;
  double noise_rate_per_ms = 10.0;
  AesKey key;
  std::uint64_t table_base = 0x100000;
  std::uint64_t baseline_loads_per_encryption = 340;
  std::uint64_t compute_cost_ns = 2000;
  std::uint64_t dedup_threshold = 300;
  std::uint64_t seed = 1;
};

// One logical timeline hosting the victim encryption service, the shared
// cache, and the background noise process. Attacker and detector code
// drive it through advance()/idle().
class Simulation {
 public:
  using TimeObserver = std::function<void(std::uint64_t now_ns, const PmcCounters&)>;

  explicit Simulation(const SimConfig& cfg);

  struct EncryptionResult {
    Block ciphertext;
    std::uint64_t duration_ns;
  };

  // Serves one random encryption request: every table lookup becomes a
  // victim cache access, loads grow by 160 + baseline, misses by the
  // cache outcomes, and the clock by compute cost plus latencies.
  EncryptionResult run_encryption();

  // Advances time with no victim work; returns noise-evicted lines.
  std::vector<std::uint64_t> idle(std::uint64_t dt_ns);

  // Advances the clock, runs noise over the window, notifies observers.
  std::vector<std::uint64_t> advance(std::uint64_t dt_ns);

  PmcCounters snapshot_counters() const { return victim_.counters; }
  bool dedup_ready() const {
    return victim_.completed_encryptions >= victim_.dedup.threshold_encryptions;
  }

  void add_observer(TimeObserver obs) { observers_.push_back(std::move(obs)); }

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }
  Cache& cache() { return cache_; }
  VictimProcess& victim() { return victim_; }
  const VictimProcess& victim() const { return victim_; }
  const TTables& ttables() const { return ttables_; }

 private:
  void notify();

  SimClock clock_;
  Cache cache_;
  NoiseProcess noise_;
  VictimProcess victim_;
  RequestGenerator requests_;
  TTables ttables_;
  std::vector<TimeObserver> observers_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace frsim
