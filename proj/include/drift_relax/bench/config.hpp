// Copyright 2026 The drift_relax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRIFT_RELAX_BENCH_CONFIG_HPP
#define DRIFT_RELAX_BENCH_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "drift_relax/conditional_sampler.hpp"

namespace drift_relax::bench {

/// Bad or unreadable configuration. `key()` names the offending entry, or is
/// empty for file-level problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what),
        key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ModelKind { kDoubleWell, kZeroDrift };

/// Settings of the double-well filtering experiment. Defaults reproduce it.
struct BenchmarkConfig {
  std::size_t n_particles_generic = 5000;
  std::size_t n_particles_mcmc = 10;
  double alpha = 0.1;
  std::size_t L = 10;
  double dt = 0.01;
  std::size_t I = 100;
  double obs_var = 0.01;
  double sigma = 0.5;
  double x0 = -1.0;
  std::size_t n_obs = 10;
  /// Time between consecutive observations; must equal I * dt.
  double spacing = 1.0;
  HmcConfig hmc{};
  std::uint64_t seed = 1;
  ModelKind model = ModelKind::kDoubleWell;
  bool simulate_truth = false;
  std::size_t threads = 1;

  void validate() const {
    auto positive = [](const char* key, std::size_t v) {
      if (v == 0) throw ConfigError(key, "must be positive");
    };
    positive("n_particles_generic", n_particles_generic);
    positive("n_particles_mcmc", n_particles_mcmc);
    positive("L", L);
    positive("I", I);
    positive("n_obs", n_obs);
    positive("hmc_trials", hmc.metropolis_trials_per_level);
    positive("hmc_leapfrog_steps", hmc.leapfrog_steps_per_trial);
    positive("threads", threads);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0, 1]");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
    if (!(obs_var > 0.0) || !std::isfinite(obs_var))
      throw ConfigError("obs_var", "must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be positive");
    if (!std::isfinite(x0)) throw ConfigError("x0", "must be finite");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
      throw ConfigError("spacing", "must be positive");
    if (!(hmc.step_size > 0.0) || !std::isfinite(hmc.step_size))
      throw ConfigError("hmc_step_size", "must be positive");
    if (std::abs(static_cast<double>(I) * dt - spacing) > 1e-12 * std::max(1.0, spacing))
      throw ConfigError("dt", "I * dt must equal the observation spacing");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::size_t parse_count(const std::string& key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, "expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

inline double parse_real(const std::string& key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key, "expected a finite number, got '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Absent keys keep their
/// defaults. The result is validated.
inline BenchmarkConfig parse_config(std::string_view text) {
  BenchmarkConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");

    if (key == "n_particles_generic") cfg.n_particles_generic = detail::parse_count(key, value);
    else if (key == "n_particles_mcmc") cfg.n_particles_mcmc = detail::parse_count(key, value);
    else if (key == "alpha") cfg.alpha = detail::parse_real(key, value);
    else if (key == "L") cfg.L = detail::parse_count(key, value);
    else if (key == "dt") cfg.dt = detail::parse_real(key, value);
    else if (key == "I") cfg.I = detail::parse_count(key, value);
    else if (key == "obs_var") cfg.obs_var = detail::parse_real(key, value);
    else if (key == "sigma") cfg.sigma = detail::parse_real(key, value);
    else if (key == "x0") cfg.x0 = detail::parse_real(key, value);
    else if (key == "n_obs") cfg.n_obs = detail::parse_count(key, value);
    else if (key == "spacing") cfg.spacing = detail::parse_real(key, value);
    else if (key == "hmc_trials") cfg.hmc.metropolis_trials_per_level = detail::parse_count(key, value);
    else if (key == "hmc_leapfrog_steps") cfg.hmc.leapfrog_steps_per_trial = detail::parse_count(key, value);
    else if (key == "hmc_step_size") cfg.hmc.step_size = detail::parse_real(key, value);
    else if (key == "seed") cfg.seed = detail::parse_u64(key, value);
    else if (key == "simulate_truth") cfg.simulate_truth = detail::parse_bool(key, value);
    else if (key == "threads") cfg.threads = detail::parse_count(key, value);
    else if (key == "model") {
      if (value == "double-well") cfg.model = ModelKind::kDoubleWell;
      else if (value == "zero-drift") cfg.model = ModelKind::kZeroDrift;
      else throw ConfigError(key, "expected double-well or zero-drift, got '" + std::string(value) + "'");
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

inline BenchmarkConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Renders every key in the same format parse_config reads.
inline std::string to_text(const BenchmarkConfig& cfg) {
  std::ostringstream os;
  os << "n_particles_generic = " << cfg.n_particles_generic << '\n'
     << "n_particles_mcmc = " << cfg.n_particles_mcmc << '\n'
     << "alpha = " << detail::format_real(cfg.alpha) << '\n'
     << "L = " << cfg.L << '\n'
     << "dt = " << detail::format_real(cfg.dt) << '\n'
     << "I = " << cfg.I << '\n'
     << "obs_var = " << detail::format_real(cfg.obs_var) << '\n'
     << "sigma = " << detail::format_real(cfg.sigma) << '\n'
     << "x0 = " << detail::format_real(cfg.x0) << '\n'
     << "n_obs = " << cfg.n_obs << '\n'
     << "spacing = " << detail::format_real(cfg.spacing) << '\n'
     << "hmc_trials = " << cfg.hmc.metropolis_trials_per_level << '\n'
     << "hmc_leapfrog_steps = " << cfg.hmc.leapfrog_steps_per_trial << '\n'
     << "hmc_step_size = " << detail::format_real(cfg.hmc.step_size) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "model = " << (cfg.model == ModelKind::kDoubleWell ? "double-well" : "zero-drift") << '\n'
     << "simulate_truth = " << (cfg.simulate_truth ? "true" : "false") << '\n'
     << "threads = " << cfg.threads << '\n';
  return os.str();
}

}  // namespace drift_relax::bench

#endif  // DRIFT_RELAX_BENCH_CONFIG_HPP
