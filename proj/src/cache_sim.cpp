#include "frsim/cache_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace frsim {

void CacheConfig::validate() const {
  if (line_size == 0 || (line_size & (line_size - 1)) != 0)
    throw std::invalid_argument("cache line_size must be a power of two");
  if (ways < 1) throw std::invalid_argument("cache ways must be >= 1");
  if (sets == 0) throw std::invalid_argument("cache sets must be >= 1");
  if (miss_latency_ns <= hit_latency_ns)
    throw std::invalid_argument("miss latency must exceed hit latency");
}

Cache::Cache(CacheConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  sets_.resize(cfg_.sets);
  for (auto& s : sets_) s.lines.reserve(static_cast<std::size_t>(cfg_.ways));
}

AccessOutcome Cache::access(std::uint64_t addr) {
  const std::uint64_t line = line_of(addr);
  auto& lines = set_of_line(line).lines;
  auto it = std::find(lines.begin(), lines.end(), line);
  if (it != lines.end()) {
    std::rotate(lines.begin(), it, it + 1);  // promote to MRU
    return {true, cfg_.hit_latency_ns};
  }
  if (lines.size() == static_cast<std::size_t>(cfg_.ways)) lines.pop_back();
  lines.insert(lines.begin(), line);
  return {false, cfg_.miss_latency_ns};
}

AccessOutcome Cache::probe_reload(std::uint64_t addr) { return access(addr); }

void Cache::flush(std::uint64_t addr) {
  const std::uint64_t line = line_of(addr);
  auto& lines = set_of_line(line).lines;
  auto it = std::find(lines.begin(), lines.end(), line);
  if (it != lines.end()) lines.erase(it);
}

bool Cache::is_cached(std::uint64_t addr) const { return line_resident(line_of(addr)); }

bool Cache::line_resident(std::uint64_t line) const {
  const auto& lines = set_of_line(line).lines;
  return std::find(lines.begin(), lines.end(), line) != lines.end();
}

bool Cache::evict_line(std::uint64_t line) {
  auto& lines = set_of_line(line).lines;
  auto it = std::find(lines.begin(), lines.end(), line);
  if (it == lines.end()) return false;
  lines.erase(it);
  return true;
}

void Cache::reset() {
  for (auto& s : sets_) s.lines.clear();
}

NoiseProcess::NoiseProcess(NoiseConfig cfg, std::uint64_t line_size)
    : cfg_(cfg), first_region_line_(cfg.region_base / line_size), rng_(cfg.seed) {
  if (cfg_.eviction_rate_per_ms < 0)
    throw std::invalid_argument("noise eviction rate must be >= 0");
  next_event_ns_ = (cfg_.eviction_rate_per_ms > 0)
                       ? draw_gap_ns()
                       : std::numeric_limits<std::uint64_t>::max();
}

std::uint64_t NoiseProcess::draw_gap_ns() {
  // u in (0,1]; mean gap = 1e6 / rate_per_ms nanoseconds.
  const double u = 1.0 - static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const double gap = -std::log(u) * (1e6 / cfg_.eviction_rate_per_ms);
  const double clamped = std::max(1.0, gap);
  return static_cast<std::uint64_t>(clamped);
}

std::vector<std::uint64_t> NoiseProcess::advance(Cache& cache, std::uint64_t to_ns) {
  std::vector<std::uint64_t> evicted;
  while (next_event_ns_ <= to_ns) {
    std::uint64_t resident[256];
    std::size_t n = 0;
    const std::uint64_t span = std::min<std::uint64_t>(cfg_.region_lines, 256);
    for (std::uint64_t k = 0; k < span; ++k) {
      const std::uint64_t line = first_region_line_ + k;
      if (cache.line_resident(line)) resident[n++] = line;
    }
    if (n > 0) {
      const std::uint64_t pick = rng_() % n;
      cache.evict_line(resident[pick]);
      evicted.push_back(resident[pick]);
    }
    next_event_ns_ += draw_gap_ns();
  }
  return evicted;
}

}  // namespace frsim
