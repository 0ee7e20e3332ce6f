#include "farsim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace farsim {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    if (!std::isfinite(v)) throw std::invalid_argument("not finite");
    return v;
  } catch (const std::exception&) {
    fail("invalid value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail("invalid value for '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail("invalid value for '" + key + "': " + value);
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::string spaced = value;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) fail("invalid value for '" + key + "': " + value);
  return out;
}

}  // namespace

void SystemConfig::validate() const {
  if (num_users < 1) fail("users must be at least 1");
  if (num_far_antennas < 1) fail("far_antennas must be at least 1");
  if (num_bs_antennas < 1) fail("bs_antennas must be at least 1");
  if (num_paths < 2) fail("paths must be at least 2");
  if (!(wavelength > 0)) fail("wavelength must be positive");
  if (!(region_size > 0)) fail("region_size must be positive");
  if (!(min_spacing > 0)) fail("d0 must be positive");
  auto grid_need = [this](int count) {
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    return min_spacing * (cols - 1);
  };
  if (region_size < grid_need(num_far_antennas)) {
    fail("region cannot host " + fmt_int(num_far_antennas) +
         " far antennas at spacing d0 (need region_size >= " +
         fmt_double(grid_need(num_far_antennas)) + ")");
  }
  if (region_size < grid_need(num_bs_antennas)) {
    fail("region cannot host " + fmt_int(num_bs_antennas) +
         " bs antennas at spacing d0 (need region_size >= " +
         fmt_double(grid_need(num_bs_antennas)) + ")");
  }
  if (!(relay_gain > 0)) fail("relay_gain must be positive");
  if (!(noise_user > 0)) fail("noise_user must be positive");
  if (!(noise_bs > 0)) fail("noise_bs must be positive");
  if (static_cast<int>(max_power.size()) != num_users) {
    fail("max_power must have one entry per user");
  }
  for (double p : max_power) {
    if (!(p > 0)) fail("max_power entries must be positive");
  }
  if (!(rician_beta >= 0)) fail("rician_beta must be nonnegative");
  if (!(solver.outer_epsilon > 0)) fail("outer_epsilon must be positive");
  if (!(solver.inner_tol > 0)) fail("inner_tol must be positive");
  if (solver.max_passes < 0) fail("max_passes must be nonnegative");
  if (solver.max_outer < 0) fail("max_outer must be nonnegative");
}

std::vector<std::pair<std::string, std::string>> SystemConfig::to_key_values()
    const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("users", fmt_int(num_users));
  kv.emplace_back("far_antennas", fmt_int(num_far_antennas));
  kv.emplace_back("bs_antennas", fmt_int(num_bs_antennas));
  kv.emplace_back("paths", fmt_int(num_paths));
  kv.emplace_back("wavelength", fmt_double(wavelength));
  kv.emplace_back("region_size", fmt_double(region_size));
  kv.emplace_back("min_spacing", fmt_double(min_spacing));
  kv.emplace_back("relay_gain", fmt_double(relay_gain));
  kv.emplace_back("noise_user", fmt_double(noise_user));
  kv.emplace_back("noise_bs", fmt_double(noise_bs));
  std::string powers;
  for (std::size_t i = 0; i < max_power.size(); ++i) {
    if (i) powers += ' ';
    powers += fmt_double(max_power[i]);
  }
  kv.emplace_back("max_power", powers);
  kv.emplace_back("rician_beta", fmt_double(rician_beta));
  kv.emplace_back("seed", fmt_u64(seed));
  kv.emplace_back("outer_epsilon", fmt_double(solver.outer_epsilon));
  kv.emplace_back("inner_tol", fmt_double(solver.inner_tol));
  kv.emplace_back("max_passes", fmt_int(solver.max_passes));
  kv.emplace_back("max_outer", fmt_int(solver.max_outer));
  return kv;
}

NoiseSplit snr_to_noise(double snr_db, double p_max, double relay_gain) {
  if (!std::isfinite(snr_db)) fail("snr_db must be finite");
  if (!(p_max > 0)) fail("p_max must be positive");
  if (!(relay_gain > 0)) fail("relay_gain must be positive");
  double sigma2 = p_max * p_max / std::pow(10.0, snr_db / 10.0);
  double each = sigma2 / (relay_gain + 1.0);
  return {each, each};
}

double config_snr_db(const SystemConfig& config) {
  double p = config.power(0);
  return 10.0 * std::log10(p * p / config.combined_noise());
}

SystemConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> pairs;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail("config parse error at line " + fmt_int(line_no) +
           ": expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail("config parse error at line " + fmt_int(line_no) +
           ": expected 'key = value'");
    }
    if (!pairs.emplace(key, value).second) {
      fail("duplicate config key '" + key + "'");
    }
  }

  SystemConfig cfg;
  bool have_noise = false;
  bool have_power = false;
  auto take = [&pairs](const char* key) -> const std::string* {
    auto it = pairs.find(key);
    return it == pairs.end() ? nullptr : &it->second;
  };
  if (const auto* v = take("users")) cfg.num_users = parse_int("users", *v);
  if (const auto* v = take("far_antennas"))
    cfg.num_far_antennas = parse_int("far_antennas", *v);
  if (const auto* v = take("bs_antennas"))
    cfg.num_bs_antennas = parse_int("bs_antennas", *v);
  if (const auto* v = take("paths")) cfg.num_paths = parse_int("paths", *v);
  if (const auto* v = take("wavelength"))
    cfg.wavelength = parse_double("wavelength", *v);
  if (const auto* v = take("region_size"))
    cfg.region_size = parse_double("region_size", *v);
  if (const auto* v = take("min_spacing"))
    cfg.min_spacing = parse_double("min_spacing", *v);
  if (const auto* v = take("relay_gain"))
    cfg.relay_gain = parse_double("relay_gain", *v);
  if (const auto* v = take("noise_user")) {
    cfg.noise_user = parse_double("noise_user", *v);
    have_noise = true;
  }
  if (const auto* v = take("noise_bs")) {
    cfg.noise_bs = parse_double("noise_bs", *v);
    have_noise = true;
  }
  if (const auto* v = take("max_power")) {
    cfg.max_power = parse_double_list("max_power", *v);
    have_power = true;
  }
  if (const auto* v = take("rician_beta"))
    cfg.rician_beta = parse_double("rician_beta", *v);
  if (const auto* v = take("seed")) cfg.seed = parse_u64("seed", *v);
  if (const auto* v = take("outer_epsilon"))
    cfg.solver.outer_epsilon = parse_double("outer_epsilon", *v);
  if (const auto* v = take("inner_tol"))
    cfg.solver.inner_tol = parse_double("inner_tol", *v);
  if (const auto* v = take("max_passes"))
    cfg.solver.max_passes = parse_int("max_passes", *v);
  if (const auto* v = take("max_outer"))
    cfg.solver.max_outer = parse_int("max_outer", *v);

  // A single max_power value is shared by every user; otherwise the list
  // must match the user count (checked by validate()).
  if (have_power && cfg.max_power.size() == 1) {
    cfg.max_power.assign(static_cast<std::size_t>(std::max(cfg.num_users, 1)),
                         cfg.max_power[0]);
  } else if (!have_power) {
    cfg.max_power.assign(static_cast<std::size_t>(std::max(cfg.num_users, 1)),
                         1.0);
  }
  if (const auto* v = take("snr_db")) {
    if (have_noise) {
      fail("config sets both snr_db and explicit noise powers");
    }
    NoiseSplit split =
        snr_to_noise(parse_double("snr_db", *v), cfg.max_power.empty()
                                                     ? 1.0
                                                     : cfg.max_power.front(),
                     cfg.relay_gain);
    cfg.noise_user = split.noise_user;
    cfg.noise_bs = split.noise_bs;
  }

  static const char* known[] = {
      "users",       "far_antennas", "bs_antennas",  "paths",
      "wavelength",  "region_size",  "min_spacing",  "relay_gain",
      "noise_user",  "noise_bs",     "max_power",    "rician_beta",
      "seed",        "snr_db",       "outer_epsilon", "inner_tol",
      "max_passes",  "max_outer"};
  for (const auto& [key, value] : pairs) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail("unknown config key '" + key + "'");
  }

  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const SystemConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.to_key_values()) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace farsim
