#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "frsim/attack.hpp"
#include "frsim/detector.hpp"
#include "frsim/sim_runtime.hpp"

namespace frsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scenario { attack, no_attack, fragmented };

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ExperimentConfig {
  Scenario scenario = Scenario::attack;
  std::uint64_t packet_size = 0;  // 0 = one packet of `total`
  std::uint64_t interval_ns = 0;
  std::uint64_t total_encryptions = 50'000;
  std::uint64_t period_ns = 1'000'000;
  std::uint64_t warmup_ns = 50'000'000;
  double threshold = 0.5;
  double decision_fraction = 0.8;
  double noise_rate_per_ms = 10.0;
  std::uint64_t seed = 1;
  std::string out_path;  // empty = no CSV

  void validate() const;
  SamplerConfig sampler_config() const;
  AttackSchedule schedule() const;
};

// Applies one key=value setting; throws ConfigError on unknown keys or
// malformed values. Shared by the config-file parser and the CLI flags.
void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct RunRecord {
  ExperimentConfig config;
  AesKey true_key;
  std::vector<PmcSample> samples;
  std::vector<MetricPoint> metrics;
  Verdict verdict;
  PmcCounters final_counters;
  bool has_recovery = false;
  AesKey recovered_key;
  bool success = false;
};

RunRecord run_experiment(const ExperimentConfig& cfg);

std::string csv_text(const std::vector<PmcSample>& samples,
                     const std::vector<MetricPoint>& metrics);
void write_csv(const std::string& path, const std::vector<PmcSample>& samples,
               const std::vector<MetricPoint>& metrics);

struct CsvRow {
  std::uint64_t t_ns;
  std::uint64_t d_misses;
  std::uint64_t d_loads;
  double metric;
};
std::vector<CsvRow> read_csv(const std::string& path);

struct PresetPanel {
  std::string name;  // also the CSV file stem
  ExperimentConfig config;
};

// Panel grid for a named figure preset; throws ConfigError on unknown
// names. Panels get seeds derived from `seed` so a rerun reproduces the
// exact same files.
std::vector<PresetPanel> preset_panels(const std::string& preset, std::uint64_t seed,
                                       const std::string& out_dir);

struct PresetOutcome {
  std::vector<PresetPanel> panels;
  std::vector<RunRecord> records;
  std::string summary_path;
};
PresetOutcome run_preset(const std::string& preset, std::uint64_t seed,
                         const std::string& out_dir);

struct SweepCell {
  std::uint64_t packet_size;
  std::uint64_t interval_ns;
  std::uint64_t period_ns;
  double fraction_above_threshold;
  bool key_recovered;
};

std::vector<SweepCell> run_sweep(const std::vector<std::uint64_t>& packet_sizes,
                                 const std::vector<std::uint64_t>& intervals_ns,
                                 const std::vector<std::uint64_t>& periods_ns,
                                 std::uint64_t seed);
std::string sweep_summary_csv(const std::vector<SweepCell>& cells);

std::string key_hex(const AesKey& key);

}  // namespace frsim
