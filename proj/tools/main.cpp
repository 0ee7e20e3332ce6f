#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "farsim/baselines.hpp"
#include "farsim/channel.hpp"
#include "farsim/config.hpp"
#include "farsim/experiments.hpp"
#include "farsim/selfcheck.hpp"
#include "farsim/solver.hpp"
#include "farsim/version.hpp"

namespace {

struct SweepOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 100;
  std::vector<double> grid;
  std::string out_path;
  int workers = 1;
  bool timings = false;
};

void add_sweep_flags(CLI::App* cmd, SweepOptions& opts) {
  cmd->add_option("--config", opts.config_path, "config file (flat key = value)");
  cmd->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--trials", opts.trials, "Monte Carlo trials per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid", opts.grid,
                  "sweep values, comma separated (use --grid=-5,0,... for "
                  "negative values)")
      ->delimiter(',');
  cmd->add_option("--out", opts.out_path, "output CSV path")->required();
  cmd->add_option("--workers", opts.workers, "concurrent trial workers")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timings", opts.timings,
                "record wall times in the CSV (breaks byte-for-byte "
                "reproducibility of the output)");
}

int run_sweep_command(farsim::SweepKind kind, const SweepOptions& opts) {
  farsim::SweepSpec spec;
  spec.kind = kind;
  if (!opts.config_path.empty()) {
    spec.base = farsim::load_config(opts.config_path);
  }
  if (opts.seed_set) spec.base.seed = opts.seed;
  spec.trials = opts.trials;
  spec.workers = opts.workers;
  spec.measure_time = opts.timings;
  if (!opts.grid.empty()) {
    spec.grid = opts.grid;
  } else if (kind == farsim::SweepKind::Snr) {
    spec.grid = {-5.0, 0.0, 5.0, 10.0, 15.0};
  } else {
    spec.grid = {1.0, 2.0, 3.0, 4.0, 5.0};
  }

  farsim::SweepResult result = farsim::run_sweep(spec);
  farsim::write_run_files(result, opts.out_path);
  std::cout << farsim::format_summary(farsim::summarize(result.rows));
  std::cout << "wrote " << opts.out_path << " and " << opts.out_path
            << ".meta\n";
  return 0;
}

int run_single(const std::string& config_path, std::uint64_t seed,
               bool seed_set, std::uint64_t trial, const std::string& scheme,
               double snr_db, bool snr_set, const std::string& trace_path,
               const std::string& dump_path) {
  farsim::SystemConfig config;
  if (!config_path.empty()) config = farsim::load_config(config_path);
  if (seed_set) config.seed = seed;
  if (snr_set) {
    farsim::NoiseSplit split =
        farsim::snr_to_noise(snr_db, config.power(0), config.relay_gain);
    config.noise_user = split.noise_user;
    config.noise_bs = split.noise_bs;
  }
  auto id = farsim::scheme_from_name(scheme);
  if (!id) {
    std::cerr << "unknown scheme '" << scheme
              << "' (expected Fixed, UFar or Proposed)\n";
    return 1;
  }

  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {config.seed, trial});
  if (!dump_path.empty()) {
    std::ofstream out(dump_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << dump_path << "'\n";
      return 1;
    }
    out << farsim::dump_realization(realization);
  }

  farsim::SchemeResult run = farsim::run_scheme(*id, realization, config);
  std::printf("scheme %s, trial %llu, snr %.6g dB\n",
              farsim::scheme_name(*id),
              static_cast<unsigned long long>(trial),
              farsim::config_snr_db(config));
  std::printf("%-5s %14s %14s %14s\n", "user", "gain", "sinr", "rate");
  for (Eigen::Index k = 0; k < run.report.gains.size(); ++k) {
    std::printf("%-5lld %14.6g %14.6g %14.6g\n", static_cast<long long>(k),
                run.report.gains[k], run.report.sinrs[k], run.report.rates[k]);
  }
  std::printf("min rate %.6g bits/s/Hz (user %d)\n", run.report.min_rate,
              run.report.min_index);
  std::printf("outer iterations %d, passes %d, wall %.1f ms\n",
              run.trace.outer_iterations, run.trace.total_passes,
              run.trace.wall_ms);
  if (run.trace.restored) {
    std::printf("note: optimizer returned a restored (best-so-far) layout\n");
  }

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << trace_path << "'\n";
      return 1;
    }
    out << farsim::trace_csv(run.trace);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluid-antenna relay uplink: max-min rate optimizer and "
               "Monte Carlo experiment harness"};
  app.set_version_flag("--version", farsim::kVersion);
  app.require_subcommand(1);

  SweepOptions snr_opts;
  CLI::App* snr_cmd = app.add_subcommand(
      "sweep-snr", "min-rate statistics over an SNR grid for all schemes");
  add_sweep_flags(snr_cmd, snr_opts);

  SweepOptions region_opts;
  CLI::App* region_cmd = app.add_subcommand(
      "sweep-region",
      "min-rate statistics over a region-size grid for all schemes");
  add_sweep_flags(region_cmd, region_opts);

  std::string single_config;
  std::uint64_t single_seed = 0;
  bool single_seed_set = false;
  std::uint64_t single_trial = 0;
  std::string single_scheme = "Proposed";
  double single_snr = 0.0;
  bool single_snr_set = false;
  std::string trace_path;
  std::string dump_path;
  CLI::App* single_cmd =
      app.add_subcommand("single", "run one trial and print the rate report");
  single_cmd->add_option("--config", single_config, "config file");
  single_cmd->add_option("--seed", single_seed, "override the config seed")
      ->each([&](const std::string&) { single_seed_set = true; });
  single_cmd->add_option("--trial", single_trial, "trial (stream) index");
  single_cmd->add_option("--scheme", single_scheme,
                         "Fixed, UFar or Proposed");
  single_cmd->add_option("--snr-db", single_snr, "override noise via SNR")
      ->each([&](const std::string&) { single_snr_set = true; });
  single_cmd->add_option("--trace", trace_path,
                         "write per-iteration min-gain trace CSV here");
  single_cmd->add_option("--dump-realization", dump_path,
                         "write the sampled channel realization here");

  std::uint64_t selftest_seed = 1;
  CLI::App* selftest_cmd = app.add_subcommand(
      "selftest", "run the built-in statistical and optimizer checks");
  selftest_cmd->add_option("--seed", selftest_seed, "check seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (snr_cmd->parsed()) {
      return run_sweep_command(farsim::SweepKind::Snr, snr_opts);
    }
    if (region_cmd->parsed()) {
      return run_sweep_command(farsim::SweepKind::Region, region_opts);
    }
    if (single_cmd->parsed()) {
      return run_single(single_config, single_seed, single_seed_set,
                        single_trial, single_scheme, single_snr,
                        single_snr_set, trace_path, dump_path);
    }
    if (selftest_cmd->parsed()) {
      bool all_passed = true;
      for (const farsim::CheckResult& check :
           farsim::run_selftests(selftest_seed)) {
        std::cout << farsim::format_check(check) << "\n";
        all_passed = all_passed && check.passed;
      }
      return all_passed ? 0 : 1;
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
