// Command-line front end: seeded attack/no-attack/fragmented experiment
// runs, figure presets, and packet/interval/rate sweeps with CSV output.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frsim/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

std::vector<std::uint64_t> parse_u64_list(const std::string& csv, const char* what) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string item =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw frsim::ConfigError(std::string("empty entry in ") + what);
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size())
      throw frsim::ConfigError(std::string("bad entry '") + item + "' in " + what);
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void print_record(const frsim::RunRecord& rec) {
  std::printf("scenario=%s packet_size=%" PRIu64 " interval_ns=%" PRIu64
              " total=%" PRIu64 " period_ns=%" PRIu64 " noise_rate=%g seed=%" PRIu64 "\n",
              frsim::scenario_name(rec.config.scenario).c_str(), rec.config.packet_size,
              rec.config.interval_ns, rec.config.total_encryptions, rec.config.period_ns,
              rec.config.noise_rate_per_ms, rec.config.seed);
  std::printf("samples=%zu post_warmup=%zu fraction_above_threshold=%.6f detected=%s\n",
              rec.verdict.samples_total, rec.verdict.samples_post_warmup,
              rec.verdict.fraction_above_threshold,
              rec.verdict.attack_detected ? "yes" : "no");
  if (rec.has_recovery) {
    std::printf("true_key=%s\n", frsim::key_hex(rec.true_key).c_str());
    std::printf("recovered_key=%s success=%s\n", frsim::key_hex(rec.recovered_key).c_str(),
                rec.success ? "yes" : "no");
  }
  if (!rec.config.out_path.empty())
    std::printf("csv=%s\n", rec.config.out_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flush+Reload attack and PMC detection simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run one experiment");
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string scenario, out_path;
  std::uint64_t packet_size = 0, interval_ns = 0, total = 0, period_ns = 0, warmup_ns = 0,
                seed = 0;
  double threshold = 0, decision_fraction = 0, noise_rate = 0;
  run->add_option("--config", config_path, "key=value config file");
  auto* o_scenario = run->add_option("--scenario", scenario, "attack|no-attack|fragmented");
  auto* o_packet = run->add_option("--packet-size", packet_size);
  auto* o_interval = run->add_option("--interval-ns", interval_ns);
  auto* o_total = run->add_option("--total", total);
  auto* o_period = run->add_option("--period-ns", period_ns);
  auto* o_warmup = run->add_option("--warmup-ns", warmup_ns);
  auto* o_threshold = run->add_option("--threshold", threshold);
  auto* o_fraction = run->add_option("--decision-fraction", decision_fraction);
  auto* o_noise = run->add_option("--noise-rate", noise_rate, "evictions per ms");
  auto* o_seed = run->add_option("--seed", seed);
  auto* o_out = run->add_option("--out", out_path, "CSV output path");

  // preset
  auto* preset = app.add_subcommand("preset", "run a figure preset grid");
  std::string preset_name;
  std::string preset_dir = ".";
  std::uint64_t preset_seed = 1;
  preset->add_option("name", preset_name, "fig1|fig2|fig3|fig4|fig5|fig6")->required();
  preset->add_option("--out", preset_dir, "output directory");
  preset->add_option("--seed", preset_seed);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "packet size x interval x rate grid");
  std::string sizes_csv = "5000,500,50,5";
  std::string intervals_csv = "10000,100000,1000000,10000000";
  std::string periods_csv = "100000,1000000,10000000";
  std::string sweep_out = "sweep_summary.csv";
  std::uint64_t sweep_seed = 1;
  sweep->add_option("--packet-sizes", sizes_csv, "comma list");
  sweep->add_option("--intervals-ns", intervals_csv, "comma list");
  sweep->add_option("--periods-ns", periods_csv, "comma list");
  sweep->add_option("--out", sweep_out, "summary CSV path");
  sweep->add_option("--seed", sweep_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) {
      frsim::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = frsim::load_config_file(config_path, cfg);
      if (o_scenario->count()) frsim::apply_config_kv(cfg, "scenario", scenario);
      if (o_packet->count()) cfg.packet_size = packet_size;
      if (o_interval->count()) cfg.interval_ns = interval_ns;
      if (o_total->count()) cfg.total_encryptions = total;
      if (o_period->count()) cfg.period_ns = period_ns;
      if (o_warmup->count()) cfg.warmup_ns = warmup_ns;
      if (o_threshold->count()) cfg.threshold = threshold;
      if (o_fraction->count()) cfg.decision_fraction = decision_fraction;
      if (o_noise->count()) cfg.noise_rate_per_ms = noise_rate;
      if (o_seed->count()) cfg.seed = seed;
      if (o_out->count()) cfg.out_path = out_path;
      if (cfg.out_path.empty()) cfg.out_path = "run.csv";
      print_record(frsim::run_experiment(cfg));
    } else if (preset->parsed()) {
      const auto outcome = frsim::run_preset(preset_name, preset_seed, preset_dir);
      std::printf("preset %s: %zu panels\n", preset_name.c_str(), outcome.panels.size());
      for (std::size_t i = 0; i < outcome.panels.size(); ++i) {
        const auto& rec = outcome.records[i];
        std::printf("%-24s fraction=%.6f detected=%s%s\n", outcome.panels[i].name.c_str(),
                    rec.verdict.fraction_above_threshold,
                    rec.verdict.attack_detected ? "yes" : "no",
                    rec.has_recovery ? (rec.success ? " key=recovered" : " key=wrong") : "");
      }
      std::printf("summary=%s\n", outcome.summary_path.c_str());
    } else if (sweep->parsed()) {
      const auto sizes = parse_u64_list(sizes_csv, "--packet-sizes");
      const auto intervals = parse_u64_list(intervals_csv, "--intervals-ns");
      const auto periods = parse_u64_list(periods_csv, "--periods-ns");
      const auto cells = frsim::run_sweep(sizes, intervals, periods, sweep_seed);
      const std::string summary = frsim::sweep_summary_csv(cells);
      std::ofstream out(sweep_out, std::ios::binary);
      if (!out) throw frsim::IoError("cannot open '" + sweep_out + "'");
      out << summary;
      std::fputs(summary.c_str(), stdout);
    }
  } catch (const frsim::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const frsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
