#include "farsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "farsim/channel.hpp"
#include "farsim/version.hpp"

namespace farsim {

namespace {

std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int scheme_order(SchemeId id) { return static_cast<int>(id); }

constexpr SchemeId kSchemes[] = {SchemeId::Fixed, SchemeId::UFar,
                                 SchemeId::Proposed};

}  // namespace

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("sweep grid must be strictly increasing");
    }
  }
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  base.validate();
  for (double value : grid) {
    config_for_grid_point(*this, value).validate();
  }
}

SystemConfig config_for_grid_point(const SweepSpec& spec, double value) {
  SystemConfig config = spec.base;
  switch (spec.kind) {
    case SweepKind::Snr: {
      NoiseSplit split = snr_to_noise(value, config.power(0), config.relay_gain);
      config.noise_user = split.noise_user;
      config.noise_bs = split.noise_bs;
      break;
    }
    case SweepKind::Region:
      config.region_size = value;
      break;
  }
  return config;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  std::vector<SystemConfig> configs;
  configs.reserve(spec.grid.size());
  for (double value : spec.grid) {
    configs.push_back(config_for_grid_point(spec, value));
  }

  struct Item {
    std::size_t grid_index;
    int trial;
  };
  std::vector<Item> items;
  items.reserve(spec.grid.size() * static_cast<std::size_t>(spec.trials));
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    for (int t = 0; t < spec.trials; ++t) items.push_back({g, t});
  }

  std::vector<SweepRow> rows(items.size() * 3);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      const Item& item = items[i];
      const SystemConfig& config = configs[item.grid_index];
      ChannelRealization realization = sample_realization(
          config, {config.seed, static_cast<std::uint64_t>(item.trial)});
      std::uint64_t hash = realization.hash();
      for (std::size_t s = 0; s < 3; ++s) {
        auto t0 = std::chrono::steady_clock::now();
        SchemeResult run = run_scheme(kSchemes[s], realization, config);
        auto t1 = std::chrono::steady_clock::now();
        SweepRow& row = rows[i * 3 + s];
        row.sweep_value = spec.grid[item.grid_index];
        row.scheme = kSchemes[s];
        row.trial = item.trial;
        row.min_rate = run.report.min_rate;
        row.outer_iters = run.trace.outer_iterations;
        row.wall_ms =
            spec.measure_time
                ? std::chrono::duration_cast<
                      std::chrono::duration<double, std::milli>>(t1 - t0)
                      .count()
                : 0.0;
        row.realization_hash = hash;
      }
    }
  };

  int thread_count = std::min<int>(spec.workers, static_cast<int>(items.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    if (x.sweep_value != y.sweep_value) return x.sweep_value < y.sweep_value;
    if (scheme_order(x.scheme) != scheme_order(y.scheme)) {
      return scheme_order(x.scheme) < scheme_order(y.scheme);
    }
    return x.trial < y.trial;
  });

  return {spec, std::move(rows)};
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  char buf[160];
  for (const SweepRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%s,%d,%.12g,%d,%.12g\n",
                  row.sweep_value, scheme_name(row.scheme), row.trial,
                  row.min_rate, row.outer_iters, row.wall_ms);
    out << buf;
  }
}

void write_run_files(const SweepResult& result, const std::string& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + csv_path + "'");
    }
    emit_csv(result, out);
    if (!out) throw std::runtime_error("write failed for '" + csv_path + "'");
  }

  std::uint64_t digest = 0xCBF29CE484222325ull;
  for (const SweepRow& row : result.rows) {
    digest ^= row.realization_hash;
    digest *= 0x100000001B3ull;
  }

  std::string meta_path = csv_path + ".meta";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write '" + meta_path + "'");
  meta << "format = farsim-sweep-meta 1\n";
  meta << "version = " << kVersion << "\n";
  meta << "sweep = "
       << (result.spec.kind == SweepKind::Snr ? "snr" : "region") << "\n";
  meta << "grid =";
  for (double v : result.spec.grid) meta << ' ' << fmt_g12(v);
  meta << "\n";
  meta << "trials = " << result.spec.trials << "\n";
  meta << "rate_units = bits/s/Hz (log base 2)\n";
  meta << "noise_split = equal (sigma_U^2 = sigma_B^2)\n";
  char dig[32];
  std::snprintf(dig, sizeof(dig), "0x%016llx",
                static_cast<unsigned long long>(digest));
  meta << "realizations_digest = " << dig << "\n";
  for (const auto& [key, value] : result.spec.base.to_key_values()) {
    meta << "config." << key << " = " << value << "\n";
  }
  if (!meta) throw std::runtime_error("write failed for '" + meta_path + "'");
}

std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("unexpected CSV header");
  }
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 6) {
      throw std::runtime_error("bad CSV row at line " + std::to_string(line_no));
    }
    SweepRow row;
    auto scheme = scheme_from_name(parts[1]);
    if (!scheme) {
      throw std::runtime_error("unknown scheme at line " +
                               std::to_string(line_no));
    }
    try {
      row.sweep_value = std::stod(parts[0]);
      row.scheme = *scheme;
      row.trial = std::stoi(parts[2]);
      row.min_rate = std::stod(parts[3]);
      row.outer_iters = std::stoi(parts[4]);
      row.wall_ms = std::stod(parts[5]);
    } catch (const std::exception&) {
      throw std::runtime_error("bad CSV value at line " +
                               std::to_string(line_no));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SummaryRow> out;
  for (const SweepRow& row : rows) {
    SummaryRow* bucket = nullptr;
    for (SummaryRow& existing : out) {
      if (existing.sweep_value == row.sweep_value &&
          existing.scheme == row.scheme) {
        bucket = &existing;
        break;
      }
    }
    if (!bucket) {
      out.push_back({row.sweep_value, row.scheme, 0, 0.0, 0.0});
      bucket = &out.back();
    }
    ++bucket->trials;
    bucket->mean_min_rate += row.min_rate;  // sum for now
  }
  for (SummaryRow& bucket : out) {
    bucket.mean_min_rate /= bucket.trials;
  }
  for (const SweepRow& row : rows) {
    for (SummaryRow& bucket : out) {
      if (bucket.sweep_value == row.sweep_value &&
          bucket.scheme == row.scheme) {
        double d = row.min_rate - bucket.mean_min_rate;
        bucket.stderr_min_rate += d * d;  // sum of squares for now
        break;
      }
    }
  }
  for (SummaryRow& bucket : out) {
    if (bucket.trials > 1) {
      double variance = bucket.stderr_min_rate / (bucket.trials - 1);
      bucket.stderr_min_rate = std::sqrt(variance / bucket.trials);
    } else {
      bucket.stderr_min_rate = 0.0;
    }
  }
  std::sort(out.begin(), out.end(), [](const SummaryRow& x, const SummaryRow& y) {
    if (x.sweep_value != y.sweep_value) return x.sweep_value < y.sweep_value;
    return scheme_order(x.scheme) < scheme_order(y.scheme);
  });
  return out;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::string out =
      "sweep_value scheme    trials mean_min_rate stderr\n";
  char buf[128];
  for (const SummaryRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%11.6g %-9s %6d %13.6f %.6f\n",
                  row.sweep_value, scheme_name(row.scheme), row.trials,
                  row.mean_min_rate, row.stderr_min_rate);
    out += buf;
  }
  return out;
}

}  // namespace farsim
