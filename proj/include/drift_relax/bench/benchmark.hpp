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

#ifndef DRIFT_RELAX_BENCH_BENCHMARK_HPP
#define DRIFT_RELAX_BENCH_BENCHMARK_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift_relax/bench/config.hpp"
#include "drift_relax/conditional_sampler.hpp"
#include "drift_relax/particle_filter.hpp"
#include "drift_relax/random.hpp"
#include "drift_relax/sde.hpp"

namespace drift_relax::bench {

enum class FilterVariant { kGeneric, kMcmc };

inline const char* filter_name(FilterVariant v) {
  return v == FilterVariant::kGeneric ? "generic" : "mcmc";
}

/// A filter failed; carries which filter and which observation.
class FilterRunError : public std::runtime_error {
 public:
  FilterRunError(FilterVariant variant, std::size_t k, const std::string& what)
      : std::runtime_error(std::string(filter_name(variant)) + " filter, observation " +
                           std::to_string(k) + ": " + what),
        variant_(variant),
        k_(k) {}

  FilterVariant variant() const noexcept { return variant_; }
  std::size_t observation() const noexcept { return k_; }

 private:
  FilterVariant variant_;
  std::size_t k_;
};

struct ObservationSequence {
  std::vector<double> times;
  std::vector<double> values;
  /// Hidden states behind the values, present only for simulated data.
  std::optional<std::vector<double>> truth;

  std::size_t size() const noexcept { return values.size(); }
  Observation at(std::size_t i) const { return {i + 1, times[i], values[i]}; }
};

/// T_k = k * spacing; z_k = -1 for odd k and +1 for even k.
inline ObservationSequence alternating_observations(std::size_t n_obs, double spacing = 1.0) {
  ObservationSequence obs;
  for (std::size_t k = 1; k <= n_obs; ++k) {
    obs.times.push_back(static_cast<double>(k) * spacing);
    obs.values.push_back(k % 2 == 1 ? -1.0 : 1.0);
  }
  return obs;
}

inline SdeModel target_model(const BenchmarkConfig& cfg) {
  return cfg.model == ModelKind::kDoubleWell ? SdeModel::double_well(cfg.sigma)
                                             : SdeModel::zero_drift(cfg.sigma);
}

inline SdeModel base_model(const BenchmarkConfig& cfg) {
  return cfg.model == ModelKind::kDoubleWell ? SdeModel::scaled_well(cfg.alpha, cfg.sigma)
                                             : SdeModel::zero_drift(cfg.sigma);
}

/// Observations of a hidden path of the target model started at x0, with
/// Gaussian noise of variance obs_var.
inline ObservationSequence simulated_observations(const BenchmarkConfig& cfg) {
  ObservationSequence obs;
  obs.truth.emplace();
  const SdeModel model = target_model(cfg);
  Rng rng = substream(cfg.seed, StreamTag::kTruth, 0, 0);
  double x = cfg.x0;
  const double noise_sd = std::sqrt(cfg.obs_var);
  for (std::size_t k = 1; k <= cfg.n_obs; ++k) {
    const IncrementPath path = sample_increments(rng, cfg.I, cfg.dt);
    x = propagate_endpoint(x, path.increments, cfg.dt, model);
    obs.times.push_back(static_cast<double>(k) * cfg.spacing);
    obs.truth->push_back(x);
    obs.values.push_back(x + noise_sd * standard_normal(rng));
  }
  return obs;
}

inline ObservationSequence observations_for(const BenchmarkConfig& cfg) {
  return cfg.simulate_truth ? simulated_observations(cfg)
                            : alternating_observations(cfg.n_obs, cfg.spacing);
}

/// Master seed of one filter inside a benchmark run.
inline std::uint64_t filter_seed(std::uint64_t seed, FilterVariant v) {
  return derive_seed(seed, {v == FilterVariant::kGeneric ? 1ULL : 2ULL});
}

inline McmcRejuvenation rejuvenation_for(const BenchmarkConfig& cfg) {
  return McmcRejuvenation{
      .base = base_model(cfg),
      .target = target_model(cfg),
      .ladder = make_ladder(cfg.L),
      .hmc = cfg.hmc,
  };
}

/// Runs one filter over all observations, starting every particle at x0.
/// Observation k uses streams derived from (filter seed, k).
inline std::vector<FilterRecord> run_filter(FilterVariant variant, const BenchmarkConfig& cfg,
                                            const ObservationSequence& obs) {
  cfg.validate();
  const std::uint64_t master = filter_seed(cfg.seed, variant);
  const std::size_t n =
      variant == FilterVariant::kGeneric ? cfg.n_particles_generic : cfg.n_particles_mcmc;
  const SdeModel target = target_model(cfg);
  const McmcRejuvenation rejuv = rejuvenation_for(cfg);

  ParticleEnsemble ensemble = ParticleEnsemble::initial(n, cfg.x0);
  std::vector<FilterRecord> records;
  records.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation o = obs.at(i);
    const StepStreams streams{master, o.k};
    try {
      FilterStep step =
          variant == FilterVariant::kGeneric
              ? pf_step_generic(std::move(ensemble), o, target, cfg.obs_var, cfg.I, cfg.dt,
                                streams, cfg.threads)
              : pf_step_mcmc(std::move(ensemble), o, rejuv, cfg.obs_var, cfg.I, cfg.dt, streams,
                             cfg.threads);
      ensemble = std::move(step.ensemble);
      records.push_back(step.record);
    } catch (const std::exception& e) {
      throw FilterRunError(variant, o.k, e.what());
    }
  }
  return records;
}

struct BenchmarkResult {
  ObservationSequence observations;
  std::vector<FilterRecord> generic;
  std::vector<FilterRecord> mcmc;
};

/// Both filters on the same observation sequence. Deterministic in cfg.seed.
inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  BenchmarkResult r;
  r.observations = observations_for(cfg);
  r.generic = run_filter(FilterVariant::kGeneric, cfg, r.observations);
  r.mcmc = run_filter(FilterVariant::kMcmc, cfg, r.observations);
  return r;
}

}  // namespace drift_relax::bench

#endif  // DRIFT_RELAX_BENCH_BENCHMARK_HPP
