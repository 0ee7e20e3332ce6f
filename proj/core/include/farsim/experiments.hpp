#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "farsim/baselines.hpp"
#include "farsim/config.hpp"

namespace farsim {

enum class SweepKind { Snr, Region };

struct SweepSpec {
  SweepKind kind = SweepKind::Snr;
  std::vector<double> grid;  // dB for Snr, region side in wavelengths for Region
  int trials = 100;
  SystemConfig base;
  int workers = 1;
  bool measure_time = false;  // keep wall_ms at 0 so output bytes are stable

  void validate() const;  // throws std::invalid_argument
};

struct SweepRow {
  double sweep_value = 0.0;
  SchemeId scheme = SchemeId::Fixed;
  int trial = 0;
  double min_rate = 0.0;
  int outer_iters = 0;
  double wall_ms = 0.0;
  std::uint64_t realization_hash = 0;  // not serialized, pairing check only
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;  // sorted by (grid index, scheme, trial)
};

/// Base config with the grid value applied: noise powers from snr_to_noise
/// for an SNR sweep, region_size override for a region sweep.
SystemConfig config_for_grid_point(const SweepSpec& spec, double value);

/// Runs grid x {Fixed, UFar, Proposed} x trials. Within a trial all schemes
/// (and, because sampling ignores the swept scalar, all grid points) share
/// one realization drawn with stream = trial index. Trials are distributed
/// over `workers` threads; rows are sorted before return so the worker count
/// never changes the result.
SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader =
    "sweep_value,scheme,trial,min_rate_bpshz,outer_iters,wall_ms";

void emit_csv(const SweepResult& result, std::ostream& out);

/// Writes the CSV to `csv_path` and a flat key-value sidecar to
/// `csv_path` + ".meta" (config snapshot, sweep parameters, seed, code
/// version, realization digest; no timestamps).
void write_run_files(const SweepResult& result, const std::string& csv_path);

/// Reads rows back from an emitted CSV (header checked).
std::vector<SweepRow> parse_csv(std::istream& in);

struct SummaryRow {
  double sweep_value = 0.0;
  SchemeId scheme = SchemeId::Fixed;
  int trials = 0;
  double mean_min_rate = 0.0;
  double stderr_min_rate = 0.0;  // 0 for a single trial
};

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);
std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace farsim
