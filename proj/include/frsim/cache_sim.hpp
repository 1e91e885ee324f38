#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace frsim {

struct CacheConfig {
  std::uint64_t line_size = 64;
  int ways = 11;
  std::uint64_t sets = 64;
  std::uint64_t hit_latency_ns = 40;
  std::uint64_t miss_latency_ns = 200;
  std::uint64_t flush_latency_ns = 100;

  void validate() const;
  std::uint64_t classify_threshold_ns() const {
    return (hit_latency_ns + miss_latency_ns) / 2;
  }
};

struct AccessOutcome {
  bool hit;
  std::uint64_t latency_ns;
};

// Set-associative LRU cache over line addresses. One shared level; flush
// removes the line everywhere, which is all the channel needs.
class Cache {
 public:
  explicit Cache(CacheConfig cfg);

  AccessOutcome access(std::uint64_t addr);

  // Same state transition as access, kept separate because the caller is
  // the attacker and must not be attributed to victim counters.
  AccessOutcome probe_reload(std::uint64_t addr);

  void flush(std::uint64_t addr);

  // Pure observation, does not touch LRU state.
  bool is_cached(std::uint64_t addr) const;
  bool line_resident(std::uint64_t line) const;

  // Drops a line by line number; returns whether it was resident.
  bool evict_line(std::uint64_t line);

  // Clears all contents, keeps the configuration.
  void reset();

  std::uint64_t line_of(std::uint64_t addr) const { return addr / cfg_.line_size; }
  const CacheConfig& config() const { return cfg_; }

 private:
  struct Set {
    std::vector<std::uint64_t> lines;  // front = most recently used
  };

  Set& set_of_line(std::uint64_t line) { return sets_[line % cfg_.sets]; }
  const Set& set_of_line(std::uint64_t line) const { return sets_[line % cfg_.sets]; }

  CacheConfig cfg_;
  std::vector<Set> sets_;
};

// Background evictions of victim-region lines, modelling lines dropped by
// the rest of the system. Poisson process with exponential inter-arrival
// times; fully determined by the seed.
struct NoiseConfig {
  double eviction_rate_per_ms = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t region_base = 0;   // byte address, line aligned
  std::uint64_t region_lines = 64;
};

class NoiseProcess {
 public:
  explicit NoiseProcess(NoiseConfig cfg, std::uint64_t line_size);

  // Advances the process to absolute time `to_ns`, evicting one resident
  // region line per event. Returns the evicted line numbers.
  std::vector<std::uint64_t> advance(Cache& cache, std::uint64_t to_ns);

  const NoiseConfig& config() const { return cfg_; }

 private:
  std::uint64_t draw_gap_ns();

  NoiseConfig cfg_;
  std::uint64_t first_region_line_;
  std::uint64_t next_event_ns_;
  std::mt19937_64 rng_;
};

}  // namespace frsim
