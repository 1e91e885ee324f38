#include "frsim/attack.hpp"

#include <algorithm>
#include <stdexcept>

namespace frsim {

void MonitoredLines::validate() const {
  for (int t = 0; t < 4; ++t)
    if (line[t] < 0 || line[t] >= TTables::kLinesPerTable)
      throw std::invalid_argument("monitored line index out of range");
}

AttackSchedule AttackSchedule::normalized() const {
  validate();
  AttackSchedule s = *this;
  const std::uint64_t rem = s.total % s.packet_size;
  if (rem != 0) s.total += s.packet_size - rem;
  return s;
}

void AttackSchedule::validate() const {
  if (packet_size < 1) throw std::invalid_argument("packet_size must be >= 1");
  if (total < 1) throw std::invalid_argument("total encryptions must be >= 1");
}

std::uint64_t monitored_line_addr(const VictimProcess& victim, int table, int line) {
  return victim.table_base + static_cast<std::uint64_t>(table) * 1024 +
         static_cast<std::uint64_t>(line) * 64;
}

void flush_monitored(Simulation& sim, const MonitoredLines& lines) {
  lines.validate();
  if (!sim.dedup_ready())
    throw std::logic_error("flush before page de-duplication has no target");
  for (int t = 0; t < 4; ++t) {
    sim.cache().flush(monitored_line_addr(sim.victim(), t, lines.line[t]));
    sim.advance(sim.cache().config().flush_latency_ns);
  }
}

AttackRoundResult run_attack_round(Simulation& sim, const MonitoredLines& lines,
                                   std::uint64_t cold_until_ns) {
  flush_monitored(sim, lines);
  const auto enc = sim.run_encryption();

  AttackRoundResult res;
  res.ciphertext = enc.ciphertext;
  const std::uint64_t threshold = sim.cache().config().classify_threshold_ns();
  const std::uint64_t miss = sim.cache().config().miss_latency_ns;
  for (int t = 0; t < 4; ++t) {
    const bool cold = sim.clock().now_ns < cold_until_ns;
    const AccessOutcome out =
        sim.cache().probe_reload(monitored_line_addr(sim.victim(), t, lines.line[t]));
    sim.advance(out.latency_ns);
    const std::uint64_t observed = out.latency_ns + (cold ? miss : 0);
    res.x_row[t] = observed < threshold ? 1 : 0;
  }
  return res;
}

LrkScores score_lrk(const ObservationMatrix& x, const CiphertextLog& s,
                    const TTables& tt, const MonitoredLines& lines) {
  lines.validate();
  if (x.rows.empty()) throw std::invalid_argument("empty observation matrix");
  if (x.rows.size() != s.blocks.size())
    throw std::invalid_argument("observation/ciphertext length mismatch");

  LrkScores scores;
  scores.num_encryptions = x.rows.size();
  for (std::size_t t = 0; t < x.rows.size(); ++t) {
    for (int i = 0; i < 4; ++i) {
      const int table = (i + 2) & 3;
      if (x.rows[t][table] != 0) continue;  // line was present: no evidence
      const int base_entry = lines.line[table] * TTables::kEntriesPerLine;
      for (int j = 0; j < 4; ++j) {
        const std::uint8_t ct_byte = s.blocks[t].bytes[4 * j + i];
        auto& row = scores.counts[4 * j + i];
        for (int l = 0; l < TTables::kEntriesPerLine; ++l) {
          const std::uint8_t tbyte = word_lane(tt.tables[table][base_entry + l], i);
          row[ct_byte ^ tbyte] += 1;
        }
      }
    }
  }
  return scores;
}

LrkSelection select_lrk(const LrkScores& scores) {
  LrkSelection sel;
  for (int p = 0; p < 16; ++p) {
    const auto& row = scores.counts[p];
    int best = 0;
    int min_count_hits = 1;
    for (int c = 1; c < 256; ++c) {
      if (row[c] < row[best]) {
        best = c;
        min_count_hits = 1;
      } else if (row[c] == row[best]) {
        min_count_hits += 1;
      }
    }
    sel.bytes[p] = static_cast<std::uint8_t>(best);
    sel.unique_min[p] = (min_count_hits == 1);
  }
  return sel;
}

AesKey recover_master_key(const LrkScores& scores) {
  return invert_key_schedule(select_lrk(scores).bytes);
}

AttackResult run_fragmented_attack(Simulation& sim, const AttackSchedule& schedule,
                                   const AttackerConfig& cfg) {
  const AttackSchedule sched = schedule.normalized();
  cfg.lines.validate();

  // KSM needs the victim to serve a batch of requests before the table
  // pages are shared; the attacker just generates load until then.
  while (!sim.dedup_ready()) sim.run_encryption();

  AttackResult res;
  res.x.rows.reserve(sched.total);
  res.s.blocks.reserve(sched.total);

  std::uint64_t cold_until = 0;
  std::uint64_t remaining = sched.total;
  while (remaining > 0) {
    const std::uint64_t n = std::min(sched.packet_size, remaining);
    for (std::uint64_t k = 0; k < n; ++k) {
      const AttackRoundResult round = run_attack_round(sim, cfg.lines, cold_until);
      res.x.rows.push_back(round.x_row);
      res.s.blocks.push_back(round.ciphertext);
    }
    remaining -= n;
    if (remaining > 0) {
      const auto evicted = sim.idle(sched.interval_ns);
      const std::uint64_t rewarm = std::min<std::uint64_t>(
          cfg.rewarm_cap_ns, evicted.size() * cfg.rewarm_per_eviction_ns);
      cold_until = sim.clock().now_ns + rewarm;
    }
  }

  res.scores = score_lrk(res.x, res.s, sim.ttables(), cfg.lines);
  res.selection = select_lrk(res.scores);
  res.recovered = invert_key_schedule(res.selection.bytes);
  return res;
}

}  // namespace frsim
