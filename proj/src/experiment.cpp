#include "frsim/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace frsim {

namespace {

constexpr std::uint64_t kKeyTag = 0x6b657931;

AesKey key_from_seed(std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, kKeyTag));
  AesKey key;
  for (int half = 0; half < 2; ++half) {
    const std::uint64_t r = rng();
    for (int i = 0; i < 8; ++i)
      key.bytes[8 * half + i] = static_cast<std::uint8_t>(r >> (8 * i));
  }
  return key;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return out;
}

double parse_f64(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("bad number for " + key + ": '" + v + "'");
  return out;
}

std::string period_label(std::uint64_t period_ns) {
  if (period_ns % 1'000'000 == 0) return std::to_string(period_ns / 1'000'000) + "ms";
  if (period_ns % 1'000 == 0) return std::to_string(period_ns / 1'000) + "us";
  return std::to_string(period_ns) + "ns";
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::attack: return "attack";
    case Scenario::no_attack: return "no-attack";
    case Scenario::fragmented: return "fragmented";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "attack") return Scenario::attack;
  if (name == "no-attack" || name == "no_attack") return Scenario::no_attack;
  if (name == "fragmented") return Scenario::fragmented;
  throw ConfigError("unknown scenario '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (total_encryptions == 0) throw ConfigError("total must be >= 1");
  if (scenario == Scenario::fragmented && packet_size == 0)
    throw ConfigError("fragmented scenario requires packet_size");
  if (period_ns == 0) throw ConfigError("period_ns must be > 0");
  if (threshold <= 0) throw ConfigError("threshold must be > 0");
  if (decision_fraction < 0 || decision_fraction > 1)
    throw ConfigError("decision_fraction must be in [0,1]");
  if (noise_rate_per_ms < 0) throw ConfigError("noise_rate must be >= 0");
}

SamplerConfig ExperimentConfig::sampler_config() const {
  return SamplerConfig{period_ns, warmup_ns, threshold, decision_fraction};
}

AttackSchedule ExperimentConfig::schedule() const {
  AttackSchedule s;
  if (scenario == Scenario::attack) {
    s.packet_size = total_encryptions;
    s.interval_ns = 0;
  } else {
    s.packet_size = packet_size == 0 ? total_encryptions : packet_size;
    s.interval_ns = interval_ns;
  }
  s.total = total_encryptions;
  return s.normalized();
}

void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value) {
  if (key == "scenario") cfg.scenario = parse_scenario(value);
  else if (key == "packet_size") cfg.packet_size = parse_u64(value, key);
  else if (key == "interval_ns") cfg.interval_ns = parse_u64(value, key);
  else if (key == "total") cfg.total_encryptions = parse_u64(value, key);
  else if (key == "period_ns") cfg.period_ns = parse_u64(value, key);
  else if (key == "warmup_ns") cfg.warmup_ns = parse_u64(value, key);
  else if (key == "threshold") cfg.threshold = parse_f64(value, key);
  else if (key == "decision_fraction") cfg.decision_fraction = parse_f64(value, key);
  else if (key == "noise_rate") cfg.noise_rate_per_ms = parse_f64(value, key);
  else if (key == "seed") cfg.seed = parse_u64(value, key);
  else if (key == "out") cfg.out_path = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string trimmed = line.substr(first, last - first + 1);
    if (trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_config_kv(base, trimmed.substr(0, eq), trimmed.substr(eq + 1));
  }
  return base;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  SimConfig sc;
  sc.noise_rate_per_ms = cfg.noise_rate_per_ms;
  sc.key = key_from_seed(cfg.seed);
  sc.seed = cfg.seed;
  Simulation sim(sc);

  PmcSampler sampler(cfg.sampler_config());
  sim.add_observer([&sampler](std::uint64_t now, const PmcCounters& c) {
    sampler.observe(now, c);
  });

  RunRecord rec;
  rec.config = cfg;
  rec.true_key = sc.key;

  const AttackSchedule sched = cfg.schedule();
  if (cfg.scenario == Scenario::no_attack) {
    // Same request stream and packet/interval cadence, attacker absent.
    std::uint64_t remaining = sched.total;
    while (remaining > 0) {
      const std::uint64_t n = std::min(sched.packet_size, remaining);
      for (std::uint64_t k = 0; k < n; ++k) sim.run_encryption();
      remaining -= n;
      if (remaining > 0) sim.idle(sched.interval_ns);
    }
  } else {
    const AttackResult atk = run_fragmented_attack(sim, sched);
    rec.has_recovery = true;
    rec.recovered_key = atk.recovered;
    rec.success = (atk.recovered == rec.true_key);
  }

  sampler.finish(sim.clock().now_ns, sim.victim().counters);
  rec.samples = sampler.samples();
  rec.metrics = compute_metrics(rec.samples);
  rec.final_counters = sim.victim().counters;
  try {
    rec.verdict = classify(rec.metrics, cfg.sampler_config());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("cannot classify: ") + e.what());
  }

  if (!cfg.out_path.empty()) write_csv(cfg.out_path, rec.samples, rec.metrics);
  return rec;
}

std::string csv_text(const std::vector<PmcSample>& samples,
                     const std::vector<MetricPoint>& metrics) {
  std::string out = "t_ns,d_misses,d_loads,metric\n";
  char buf[128];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f\n",
                  samples[i].t_ns, samples[i].d_misses, samples[i].d_loads,
                  metrics[i].value);
    out += buf;
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<PmcSample>& samples,
               const std::vector<MetricPoint>& metrics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << csv_text(samples, metrics);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "t_ns,d_misses,d_loads,metric")
    throw IoError("bad CSV header in '" + path + "'");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CsvRow row;
    char trailing;
    if (std::sscanf(line.c_str(), "%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%lf%c",
                    &row.t_ns, &row.d_misses, &row.d_loads, &row.metric,
                    &trailing) != 4)
      throw IoError("bad CSV row in '" + path + "': " + line);
    rows.push_back(row);
  }
  return rows;
}

std::vector<PresetPanel> preset_panels(const std::string& preset, std::uint64_t seed,
                                       const std::string& out_dir) {
  struct Grid {
    std::vector<std::uint64_t> periods;
    std::vector<Scenario> scenarios;
    std::uint64_t packet_size;  // 0 = continuous
    std::uint64_t interval_ns;
  };

  const std::uint64_t us100 = 100'000, ms1 = 1'000'000, ms10 = 10'000'000;
  Grid grid;
  if (preset == "fig1" || preset == "fig2") {
    grid = {{us100, ms1, ms10}, {Scenario::attack, Scenario::no_attack}, 0, 0};
  } else if (preset == "fig3") {
    grid = {{ms1, ms10}, {Scenario::attack, Scenario::no_attack}, 500, ms10};
  } else if (preset == "fig4") {
    grid = {{ms1, ms10}, {Scenario::attack, Scenario::no_attack}, 50, ms10};
  } else if (preset == "fig5") {
    grid = {{ms1, ms10}, {Scenario::attack, Scenario::no_attack}, 5, ms1};
  } else if (preset == "fig6") {
    // Zoomed-in single panel: the fragmented attack of fig4 at 1 ms.
    grid = {{ms1}, {Scenario::attack}, 50, ms10};
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }

  std::vector<PresetPanel> panels;
  std::uint64_t panel_idx = 0;
  for (const Scenario scen : grid.scenarios) {
    for (const std::uint64_t period : grid.periods) {
      ExperimentConfig cfg;
      cfg.period_ns = period;
      cfg.total_encryptions = 50'000;
      cfg.seed = mix_seed(seed, 0xf16 + panel_idx);
      if (grid.packet_size == 0) {
        cfg.scenario = scen;
      } else {
        cfg.scenario = scen == Scenario::attack ? Scenario::fragmented : Scenario::no_attack;
        cfg.packet_size = grid.packet_size;
        cfg.interval_ns = grid.interval_ns;
      }
      const std::string scen_label =
          scen == Scenario::attack ? "attack" : "noattack";
      std::string stem = preset + "_" + scen_label + "_" + period_label(period);
      cfg.out_path = (std::filesystem::path(out_dir) / (stem + ".csv")).string();
      panels.push_back(PresetPanel{stem, cfg});
      ++panel_idx;
    }
  }
  return panels;
}

PresetOutcome run_preset(const std::string& preset, std::uint64_t seed,
                         const std::string& out_dir) {
  PresetOutcome out;
  out.panels = preset_panels(preset, seed, out_dir);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

  std::string summary = "panel,scenario,packet_size,interval_ns,period_ns,"
                        "fraction_above_threshold,attack_detected,key_recovered\n";
  char buf[256];
  for (const auto& panel : out.panels) {
    RunRecord rec = run_experiment(panel.config);
    const std::string recovered =
        rec.has_recovery ? (rec.success ? "yes" : "no") : "-";
    std::snprintf(buf, sizeof(buf), "%s,%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f,%d,%s\n",
                  panel.name.c_str(), scenario_name(rec.config.scenario).c_str(),
                  rec.config.packet_size, rec.config.interval_ns, rec.config.period_ns,
                  rec.verdict.fraction_above_threshold,
                  rec.verdict.attack_detected ? 1 : 0, recovered.c_str());
    summary += buf;
    out.records.push_back(std::move(rec));
  }

  out.summary_path =
      (std::filesystem::path(out_dir) / (preset + "_summary.csv")).string();
  std::ofstream sf(out.summary_path, std::ios::binary);
  if (!sf) throw IoError("cannot open '" + out.summary_path + "'");
  sf << summary;
  return out;
}

std::vector<SweepCell> run_sweep(const std::vector<std::uint64_t>& packet_sizes,
                                 const std::vector<std::uint64_t>& intervals_ns,
                                 const std::vector<std::uint64_t>& periods_ns,
                                 std::uint64_t seed) {
  if (packet_sizes.empty() || intervals_ns.empty() || periods_ns.empty())
    throw ConfigError("sweep lists must be non-empty");

  std::vector<SweepCell> cells;
  for (const std::uint64_t packet : packet_sizes) {
    for (const std::uint64_t interval : intervals_ns) {
      for (const std::uint64_t period : periods_ns) {
        ExperimentConfig cfg;
        cfg.scenario = Scenario::fragmented;
        cfg.packet_size = packet;
        cfg.interval_ns = interval;
        cfg.period_ns = period;
        cfg.seed = seed;
        const RunRecord rec = run_experiment(cfg);
        cells.push_back(SweepCell{packet, interval, period,
                                  rec.verdict.fraction_above_threshold, rec.success});
      }
    }
  }
  return cells;
}

std::string sweep_summary_csv(const std::vector<SweepCell>& cells) {
  std::string out =
      "packet_size,interval_ns,period_ns,fraction_above_threshold,key_recovered\n";
  char buf[160];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f,%d\n",
                  c.packet_size, c.interval_ns, c.period_ns,
                  c.fraction_above_threshold, c.key_recovered ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string key_hex(const AesKey& key) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (const std::uint8_t b : key.bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace frsim
