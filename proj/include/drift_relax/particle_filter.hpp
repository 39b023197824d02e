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

#ifndef DRIFT_RELAX_PARTICLE_FILTER_HPP
#define DRIFT_RELAX_PARTICLE_FILTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drift_relax/conditional_sampler.hpp"
#include "drift_relax/parallel.hpp"
#include "drift_relax/random.hpp"
#include "drift_relax/sde.hpp"

namespace drift_relax {

/// No particle carries usable weight.
class DegenerateWeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-particle failure inside a filter step.
class ParticleError : public std::runtime_error {
 public:
  ParticleError(std::size_t particle, const std::string& what)
      : std::runtime_error("particle " + std::to_string(particle) + ": " + what),
        particle_(particle) {}

  std::size_t particle() const noexcept { return particle_; }

 private:
  std::size_t particle_;
};

/// Unnormalized Gaussian log-likelihood -(z - x)^2 / (2 obs_var).
inline double log_likelihood(double x, double z, double obs_var) {
  const double r = z - x;
  return -r * r / (2.0 * obs_var);
}

/// Additive Gaussian observation noise.
struct ObservationModel {
  double obs_var = 0.01;

  double log_likelihood(double x, double z) const { return drift_relax::log_likelihood(x, z, obs_var); }
};

/// N particles as (value at the previous observation, value at the current
/// one) pairs, with their likelihoods and normalized weights.
struct ParticleEnsemble {
  std::vector<double> prev;
  std::vector<double> curr;
  std::vector<double> log_lik;
  /// exp(log_lik); may underflow to zero.
  std::vector<double> raw_lik;
  std::vector<double> weights;
  /// Brownian increments behind each curr value. Only filled when a step
  /// asks predict() to keep them.
  std::vector<std::vector<double>> increments;

  static ParticleEnsemble initial(std::size_t n, double x0) {
    if (n == 0) throw std::invalid_argument("ParticleEnsemble: need at least one particle");
    ParticleEnsemble e;
    e.prev.assign(n, x0);
    e.curr.assign(n, x0);
    e.log_lik.assign(n, 0.0);
    e.raw_lik.assign(n, 1.0);
    e.weights.assign(n, 1.0 / static_cast<double>(n));
    return e;
  }

  std::size_t size() const noexcept { return curr.size(); }
};

struct FilterRecord {
  std::size_t k = 0;
  double t = 0.0;
  double z = 0.0;
  double post_mean = 0.0;
  double ess = 0.0;
  std::size_t n_particles = 0;
  std::optional<double> accept_rate;
  /// Weights collapsed: no finite log-likelihood, or every raw likelihood
  /// underflowed to zero.
  bool degenerate = false;

  double ess_pct() const { return 100.0 * ess / static_cast<double>(n_particles); }
};

/// Deterministic per-step random streams derived from (master, tag, k, n).
struct StepStreams {
  std::uint64_t master = 0;
  std::uint64_t k = 0;

  Rng operator()(StreamTag tag, std::uint64_t n) const { return substream(master, tag, k, n); }
};

/// Log-sum-exp normalization. Entries of -inf get weight zero.
inline std::vector<double> normalize_weights(std::span<const double> log_lik) {
  double max_ll = -std::numeric_limits<double>::infinity();
  for (double l : log_lik) {
    if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
      throw DegenerateWeightsError("normalize_weights: NaN or +inf log-likelihood");
    max_ll = std::max(max_ll, l);
  }
  if (!std::isfinite(max_ll))
    throw DegenerateWeightsError("normalize_weights: no finite log-likelihood");
  std::vector<double> w(log_lik.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_lik[i] - max_ll);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

/// N / (1 + C^2) with C the population coefficient of variation of the raw
/// likelihoods.
inline double effective_sample_size(std::span<const double> raw_lik) {
  const std::size_t n = raw_lik.size();
  if (n == 0) throw DegenerateWeightsError("effective_sample_size: empty input");
  double mean = 0.0;
  for (double g : raw_lik) {
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("effective_sample_size: raw likelihoods must be finite and >= 0");
    mean += g;
  }
  mean /= static_cast<double>(n);
  if (!(mean > 0.0)) throw DegenerateWeightsError("effective_sample_size: all likelihoods are zero");
  double var = 0.0;
  for (double g : raw_lik) var += (g - mean) * (g - mean);
  var /= static_cast<double>(n);
  const double c2 = var / (mean * mean);
  return std::clamp(static_cast<double>(n) / (1.0 + c2), 1.0, static_cast<double>(n));
}

/// Same quantity from log-likelihoods; immune to underflow because the
/// coefficient of variation does not depend on a common scale.
inline double effective_sample_size_log(std::span<const double> log_lik) {
  const std::vector<double> w = normalize_weights(log_lik);
  return effective_sample_size(w);
}

/// Self-normalized estimate sum x g / sum g.
inline double posterior_mean(std::span<const double> curr, std::span<const double> raw_lik) {
  if (curr.size() != raw_lik.size())
    throw std::invalid_argument("posterior_mean: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < curr.size(); ++i) {
    num += curr[i] * raw_lik[i];
    den += raw_lik[i];
  }
  if (!(den > 0.0)) throw DegenerateWeightsError("posterior_mean: all likelihoods are zero");
  return num / den;
}

/// Moves every particle forward over one observation interval with fresh
/// increments, particle n drawing from stream (kPredict, n). prev becomes the
/// old curr. With keep_increments the increments are stored per particle.
template <DriftProvider M>
ParticleEnsemble predict(ParticleEnsemble ensemble, const M& model, std::size_t steps, double dt,
                         const StepStreams& streams, bool keep_increments = false,
                         std::size_t threads = 1) {
  const std::size_t n = ensemble.size();
  ensemble.prev = ensemble.curr;
  ensemble.increments.clear();
  if (keep_increments) ensemble.increments.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = streams(StreamTag::kPredict, i);
    IncrementPath path = sample_increments(rng, steps, dt);
    try {
      ensemble.curr[i] = propagate_endpoint(ensemble.prev[i], path.increments, dt, model);
    } catch (const PropagationError& e) {
      throw ParticleError(i, e.what());
    }
    if (keep_increments) ensemble.increments[i] = std::move(path.increments);
  });
  return ensemble;
}

/// Multinomial resampling of (prev, curr) pairs: each output slot draws a
/// uniform theta and copies the pair j with W_1 + .. + W_{j-1} <= theta <
/// W_1 + .. + W_j. Weights are reset to uniform.
inline ParticleEnsemble resample_pairs(const ParticleEnsemble& ensemble, Rng& rng) {
  const std::size_t n = ensemble.size();
  std::vector<double> cumulative(n);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += ensemble.weights[j];
    cumulative[j] = acc;
    if (ensemble.weights[j] > 0.0) last_positive = j;
  }
  if (!(acc > 0.0)) throw DegenerateWeightsError("resample_pairs: weights sum to zero");

  const bool with_paths = ensemble.increments.size() == n;
  ParticleEnsemble out;
  out.prev.resize(n);
  out.curr.resize(n);
  out.log_lik.resize(n);
  out.raw_lik.resize(n);
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  if (with_paths) out.increments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = open_uniform(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), theta);
    // theta can only reach the end through rounding in the cumulative sum.
    const std::size_t j =
        it == cumulative.end() ? last_positive : static_cast<std::size_t>(it - cumulative.begin());
    out.prev[i] = ensemble.prev[j];
    out.curr[i] = ensemble.curr[j];
    out.log_lik[i] = ensemble.log_lik[j];
    out.raw_lik[i] = ensemble.raw_lik[j];
    if (with_paths) out.increments[i] = ensemble.increments[j];
  }
  return out;
}

struct FilterStep {
  ParticleEnsemble ensemble;
  FilterRecord record;
};

/// One observation handed to a filter step.
struct Observation {
  std::size_t k = 0;
  double t = 0.0;
  double z = 0.0;
};

namespace detail {

/// Fills log_lik, raw_lik and weights. Returns false when no weight can be
/// formed, in which case weights are uniform.
inline bool weigh(ParticleEnsemble& e, double z, double obs_var) {
  const std::size_t n = e.size();
  e.log_lik.resize(n);
  e.raw_lik.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.log_lik[i] = log_likelihood(e.curr[i], z, obs_var);
    e.raw_lik[i] = std::exp(e.log_lik[i]);
  }
  try {
    e.weights = normalize_weights(e.log_lik);
    return true;
  } catch (const DegenerateWeightsError&) {
    e.weights.assign(n, 1.0 / static_cast<double>(n));
    return false;
  }
}

inline bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double g) { return g == 0.0; });
}

}  // namespace detail

/// Bootstrap filter step: predict, weigh, record, resample.
template <DriftProvider M>
FilterStep pf_step_generic(ParticleEnsemble ensemble, const Observation& obs, const M& model,
                           double obs_var, std::size_t steps, double dt,
                           const StepStreams& streams, std::size_t threads = 1) {
  ensemble = predict(std::move(ensemble), model, steps, dt, streams, false, threads);
  const bool weighted = detail::weigh(ensemble, obs.z, obs_var);

  FilterRecord rec;
  rec.k = obs.k;
  rec.t = obs.t;
  rec.z = obs.z;
  rec.n_particles = ensemble.size();
  rec.post_mean = posterior_mean(ensemble.curr, ensemble.weights);
  if (weighted) {
    rec.ess = effective_sample_size(ensemble.weights);
    rec.degenerate = detail::all_zero(ensemble.raw_lik);
  } else {
    rec.ess = 1.0;
    rec.degenerate = true;
  }

  Rng rng = streams(StreamTag::kResample, 0);
  return {resample_pairs(ensemble, rng), rec};
}

/// How each particle's ladder pass is started.
enum class InitialPath {
  /// Fresh unconditional increments from the particle's previous value.
  kFresh,
  /// The increments that produced the resampled pair.
  kResampled,
};

/// Rejuvenation settings for the MCMC filter.
struct McmcRejuvenation {
  SdeModel base;
  SdeModel target;
  RelaxationLadder ladder = make_ladder(10);
  HmcConfig hmc{};
  InitialPath init = InitialPath::kFresh;
  /// Optional per-particle modified drift; `base` is used when empty.
  std::function<SdeModel(std::size_t)> base_for_particle{};
};

/// Filter step with an MCMC move: predict, weigh, resample pairs, then run a
/// drift-relaxation chain from each resampled prev value targeting the
/// observation. The record's ESS uses the likelihoods of the moved
/// (unweighted) particles and its mean is their arithmetic mean.
inline FilterStep pf_step_mcmc(ParticleEnsemble ensemble, const Observation& obs,
                               const McmcRejuvenation& rejuv, double obs_var, std::size_t steps,
                               double dt, const StepStreams& streams, std::size_t threads = 1) {
  const bool keep = rejuv.init == InitialPath::kResampled;
  ensemble = predict(std::move(ensemble), rejuv.target, steps, dt, streams, keep, threads);
  const bool weighted = detail::weigh(ensemble, obs.z, obs_var);

  Rng resample_rng = streams(StreamTag::kResample, 0);
  ensemble = resample_pairs(ensemble, resample_rng);

  const std::size_t n = ensemble.size();
  std::vector<std::size_t> trials(n, 0);
  std::vector<std::size_t> accepted(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    ConditionalProblem problem{
        .x0 = ensemble.prev[i],
        .z = obs.z,
        .obs_var = obs_var,
        .base = rejuv.base_for_particle ? rejuv.base_for_particle(i) : rejuv.base,
        .target = rejuv.target,
        .path_len = steps,
        .dt = dt,
    };
    Rng rng = streams(StreamTag::kRejuvenate, i);
    std::optional<std::span<const double>> init;
    if (keep) init = std::span<const double>(ensemble.increments[i]);
    try {
      ConditionalSample s = sample_conditional_path(problem, rejuv.ladder, rejuv.hmc, init, rng);
      ensemble.curr[i] = s.endpoint();
      trials[i] = s.trials();
      accepted[i] = s.accepted();
      if (keep) ensemble.increments[i] = std::move(s.increments);
    } catch (const std::exception& e) {
      throw ParticleError(i, e.what());
    }
  });

  FilterRecord rec;
  rec.k = obs.k;
  rec.t = obs.t;
  rec.z = obs.z;
  rec.n_particles = n;
  const bool moved_weighted = detail::weigh(ensemble, obs.z, obs_var);
  ensemble.weights.assign(n, 1.0 / static_cast<double>(n));
  rec.post_mean = posterior_mean(ensemble.curr, ensemble.weights);
  if (moved_weighted) {
    rec.ess = effective_sample_size_log(ensemble.log_lik);
    rec.degenerate = !weighted || detail::all_zero(ensemble.raw_lik);
  } else {
    rec.ess = 1.0;
    rec.degenerate = true;
  }
  std::size_t total_trials = 0;
  std::size_t total_accepted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total_trials += trials[i];
    total_accepted += accepted[i];
  }
  if (total_trials > 0)
    rec.accept_rate = static_cast<double>(total_accepted) / static_cast<double>(total_trials);
  return {std::move(ensemble), rec};
}

}  // namespace drift_relax

#endif  // DRIFT_RELAX_PARTICLE_FILTER_HPP
