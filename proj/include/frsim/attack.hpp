#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frsim/aes_ttable.hpp"
#include "frsim/sim_runtime.hpp"

namespace frsim {

// Which line of each table the attacker watches (0..15 per table).
struct MonitoredLines {
  std::array<int, 4> line{0, 0, 0, 0};

  void validate() const;
};

// X[t][j] == 1 iff the monitored line of table j was in cache when the
// t-th encryption completed.
struct ObservationMatrix {
  std::vector<std::array<std::uint8_t, 4>> rows;
};

struct CiphertextLog {
  std::vector<Block> blocks;
};

// Per key-byte candidate counters. counts[p][c] accumulates evidence
// against candidate c for block byte position p (= 4*j + i for state row
// i, column j). Higher count = seen absent more often = less likely.
struct LrkScores {
  std::array<std::array<std::uint32_t, 256>, 16> counts{};
  std::uint64_t num_encryptions = 0;
};

struct LrkSelection {
  std::array<std::uint8_t, 16> bytes{};
  // False where several candidates tied for the minimum (tie broken by
  // lowest byte value).
  std::array<bool, 16> unique_min{};
};

struct AttackSchedule {
  std::uint64_t packet_size = 50'000;
  std::uint64_t interval_ns = 0;
  std::uint64_t total = 50'000;

  // Rounds total up to a whole number of packets.
  AttackSchedule normalized() const;
  void validate() const;
};

// Attacker-side state decay. While the attacker sleeps between packets,
// background activity also trashes its own measurement apparatus; after
// waking, reload probes read as misses until that state is re-faulted.
// The window grows with the number of background evictions observed
// during the idle.
struct AttackerConfig {
  MonitoredLines lines;
  std::uint64_t rewarm_per_eviction_ns = 1500;
  std::uint64_t rewarm_cap_ns = 150'000;
};

struct AttackRoundResult {
  std::array<std::uint8_t, 4> x_row;
  Block ciphertext;
};

struct AttackResult {
  ObservationMatrix x;
  CiphertextLog s;
  LrkScores scores;
  LrkSelection selection;
  AesKey recovered;
};

std::uint64_t monitored_line_addr(const VictimProcess& victim, int table, int line);

// Flushes the four monitored lines; costs flush latency per line. Throws
// if page sharing has not been established yet.
void flush_monitored(Simulation& sim, const MonitoredLines& lines);

// One flush -> encrypt -> reload cycle. Probes issued before
// cold_until_ns read as misses regardless of residency.
AttackRoundResult run_attack_round(Simulation& sim, const MonitoredLines& lines,
                                   std::uint64_t cold_until_ns = 0);

// Candidate scoring over the observation matrix: whenever the monitored
// line of table (i+2) % 4 was absent after encryption t, every candidate
// implied by that line's 16 entries is counted against, for all four
// state columns of row i. The true byte is never implicated by a genuine
// absence, so it ends with the minimum count.
LrkScores score_lrk(const ObservationMatrix& x, const CiphertextLog& s,
                    const TTables& tt, const MonitoredLines& lines);

LrkSelection select_lrk(const LrkScores& scores);

AesKey recover_master_key(const LrkScores& scores);

// Runs ceil(total/packet_size) packets of back-to-back rounds separated
// by idle(interval_ns), after driving the victim past the page-sharing
// threshold. interval 0 degenerates to the unfragmented attack.
AttackResult run_fragmented_attack(Simulation& sim, const AttackSchedule& schedule,
                                   const AttackerConfig& cfg = {});

}  // namespace frsim
