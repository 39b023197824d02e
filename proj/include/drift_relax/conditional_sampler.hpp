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

#ifndef DRIFT_RELAX_CONDITIONAL_SAMPLER_HPP
#define DRIFT_RELAX_CONDITIONAL_SAMPLER_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drift_relax/random.hpp"
#include "drift_relax/sde.hpp"

namespace drift_relax {

/// Conditioning of one path segment: start at x0, observe z at the end of
/// path_len Euler-Maruyama steps of size dt with Gaussian noise of variance
/// obs_var. An infinite obs_var switches the likelihood off, leaving the
/// Gaussian prior on the increments.
struct ConditionalProblem {
  double x0 = 0.0;
  double z = 0.0;
  double obs_var = 0.01;
  SdeModel base;
  SdeModel target;
  std::size_t path_len = 100;
  double dt = 0.01;

  void validate() const {
    if (!std::isfinite(x0) || !std::isfinite(z))
      throw std::invalid_argument("ConditionalProblem: x0 and z must be finite");
    if (!(obs_var > 0.0)) throw std::invalid_argument("ConditionalProblem: obs_var must be positive");
    if (path_len == 0) throw std::invalid_argument("ConditionalProblem: path_len must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("ConditionalProblem: dt must be positive");
    if (base.sigma() != target.sigma())
      throw std::invalid_argument("ConditionalProblem: base and target sigma differ");
  }

  double horizon() const noexcept { return static_cast<double>(path_len) * dt; }
  bool likelihood_enabled() const noexcept { return std::isfinite(obs_var); }
  RelaxedModel relaxed(double epsilon) const { return RelaxedModel(base, target, epsilon); }
};

/// Strictly increasing relaxation weights running from exactly 0 to exactly 1.
class RelaxationLadder {
 public:
  explicit RelaxationLadder(std::vector<double> epsilons) : epsilons_(std::move(epsilons)) {
    if (epsilons_.size() < 2) throw std::invalid_argument("RelaxationLadder: need at least two levels");
    if (epsilons_.front() != 0.0 || epsilons_.back() != 1.0)
      throw std::invalid_argument("RelaxationLadder: endpoints must be exactly 0 and 1");
    for (std::size_t l = 1; l < epsilons_.size(); ++l)
      if (!(epsilons_[l] > epsilons_[l - 1]))
        throw std::invalid_argument("RelaxationLadder: weights must be strictly increasing");
  }

  const std::vector<double>& epsilons() const noexcept { return epsilons_; }
  std::size_t levels() const noexcept { return epsilons_.size(); }
  double operator[](std::size_t l) const { return epsilons_[l]; }

 private:
  std::vector<double> epsilons_;
};

/// Uniform ladder {l / L : l = 0..L}.
inline RelaxationLadder make_ladder(std::size_t L) {
  if (L == 0) throw std::invalid_argument("make_ladder: L must be at least 1");
  std::vector<double> eps(L + 1);
  for (std::size_t l = 0; l <= L; ++l) eps[l] = static_cast<double>(l) / static_cast<double>(L);
  return RelaxationLadder(std::move(eps));
}

struct HmcConfig {
  // Zero trials is legal and turns a ladder pass into a no-op.
  std::size_t metropolis_trials_per_level = 10;
  std::size_t leapfrog_steps_per_trial = 1;
  double step_size = 1e-2;

  void validate() const {
    if (leapfrog_steps_per_trial == 0)
      throw std::invalid_argument("HmcConfig: leapfrog_steps_per_trial must be positive");
    if (!(step_size > 0.0) || !std::isfinite(step_size))
      throw std::invalid_argument("HmcConfig: step_size must be positive");
  }
};

/// Positions are the Brownian increments; momenta have unit mass.
struct HmcState {
  std::vector<double> q;
  std::vector<double> p;
};

/// Raised when the sampler cannot evaluate its current state.
class SamplerError : public std::runtime_error {
 public:
  SamplerError(std::size_t level, std::size_t trial, const std::string& what)
      : std::runtime_error("conditional sampler failed at level " + std::to_string(level) +
                           ", trial " + std::to_string(trial) + ": " + what),
        level_(level),
        trial_(trial) {}

  std::size_t level() const noexcept { return level_; }
  std::size_t trial() const noexcept { return trial_; }

 private:
  std::size_t level_;
  std::size_t trial_;
};

namespace detail {

inline void check_length(const ConditionalProblem& problem, std::size_t n) {
  if (n != problem.path_len)
    throw std::invalid_argument("increment vector has length " + std::to_string(n) +
                                ", expected " + std::to_string(problem.path_len));
}

inline double likelihood_term(const ConditionalProblem& problem, double endpoint) {
  if (!problem.likelihood_enabled()) return 0.0;
  const double r = problem.z - endpoint;
  return r * r / (2.0 * problem.obs_var);
}

inline double prior_term(std::span<const double> q, double dt) {
  double s = 0.0;
  for (double b : q) s += b * b;
  return s / (2.0 * dt);
}

inline double kinetic(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return 0.5 * s;
}

}  // namespace detail

/// V(q) = (z - X_I(q))^2 / (2 obs_var) + sum_i q_i^2 / (2 dt) under the drift
/// supplied by `model`.
template <DriftProvider M>
double potential(const ConditionalProblem& problem, const M& model, std::span<const double> q) {
  detail::check_length(problem, q.size());
  const double endpoint = propagate_endpoint(problem.x0, q, problem.dt, model);
  return detail::likelihood_term(problem, endpoint) + detail::prior_term(q, problem.dt);
}

inline double potential(const ConditionalProblem& problem, double epsilon,
                        std::span<const double> q) {
  return potential(problem, problem.relaxed(epsilon), q);
}

/// Writes dV/dq into `grad` and returns V.
///
/// The endpoint sensitivity is carried backwards through the Euler map:
///   lambda_I = (X_I - z) / obs_var
///   lambda_i = lambda_{i+1} * (1 + f'(X_i) dt),   i = I-1 .. 1
///   dV/dq_j  = q_j / dt + sigma * lambda_{j+1}
template <DriftProvider M>
double potential_and_gradient(const ConditionalProblem& problem, const M& model,
                              std::span<const double> q, std::span<double> grad) {
  detail::check_length(problem, q.size());
  const std::size_t n = q.size();
  const double dt = problem.dt;
  std::vector<double> states(n + 1);
  const double endpoint = propagate_into(problem.x0, q, dt, model, states);

  double lambda = problem.likelihood_enabled() ? (endpoint - problem.z) / problem.obs_var : 0.0;
  const double sigma = model.sigma();
  for (std::size_t j = n; j-- > 0;) {
    grad[j] = q[j] / dt + sigma * lambda;
    if (j > 0 && lambda != 0.0) lambda *= 1.0 + model.drift_deriv(states[j]) * dt;
  }
  return detail::likelihood_term(problem, endpoint) + detail::prior_term(q, dt);
}

template <DriftProvider M>
std::vector<double> potential_gradient(const ConditionalProblem& problem, const M& model,
                                       std::span<const double> q) {
  std::vector<double> grad(q.size());
  potential_and_gradient(problem, model, q, grad);
  return grad;
}

inline std::vector<double> potential_gradient(const ConditionalProblem& problem, double epsilon,
                                              std::span<const double> q) {
  return potential_gradient(problem, problem.relaxed(epsilon), q);
}

template <DriftProvider M>
double hamiltonian(const ConditionalProblem& problem, const M& model, const HmcState& state) {
  return potential(problem, model, state.q) + detail::kinetic(state.p);
}

inline double hamiltonian(const ConditionalProblem& problem, double epsilon,
                          const HmcState& state) {
  return hamiltonian(problem, problem.relaxed(epsilon), state);
}

/// Kick-drift-kick Verlet, `steps` times with step `dtau`. Throws
/// PropagationError if a position leaves the region where the Euler map is
/// finite.
template <DriftProvider M>
HmcState leapfrog(HmcState state, const ConditionalProblem& problem, const M& model,
                  std::size_t steps, double dtau) {
  detail::check_length(problem, state.q.size());
  if (state.p.size() != state.q.size())
    throw std::invalid_argument("leapfrog: q and p lengths differ");
  std::vector<double> grad(state.q.size());
  if (steps == 0) return state;
  potential_and_gradient(problem, model, state.q, grad);
  const double half = 0.5 * dtau;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < grad.size(); ++i) state.p[i] -= half * grad[i];
    for (std::size_t i = 0; i < grad.size(); ++i) state.q[i] += dtau * state.p[i];
    potential_and_gradient(problem, model, state.q, grad);
    for (std::size_t i = 0; i < grad.size(); ++i) state.p[i] -= half * grad[i];
  }
  return state;
}

inline HmcState leapfrog(HmcState state, const ConditionalProblem& problem, double epsilon,
                         std::size_t steps, double dtau) {
  return leapfrog(std::move(state), problem, problem.relaxed(epsilon), steps, dtau);
}

struct HmcTrialResult {
  std::vector<double> q;
  bool accepted = false;
  /// H_new - H_old; +inf when the proposal left the finite region.
  double energy_error = 0.0;
};

/// One Metropolis-corrected HMC move with freshly drawn momenta.
///
/// Consumes exactly I normal draws and one uniform draw from `rng`. A
/// proposal that blows up during the trajectory is rejected. Evaluating V at
/// the current q is not guarded, so a non-finite current state surfaces as
/// PropagationError.
template <DriftProvider M>
HmcTrialResult hmc_trial(std::span<const double> q, const ConditionalProblem& problem,
                         const M& model, const HmcConfig& cfg, Rng& rng) {
  HmcState state{std::vector<double>(q.begin(), q.end()), std::vector<double>(q.size())};
  for (double& v : state.p) v = standard_normal(rng);
  const double u = open_uniform(rng);

  const double h_old = potential(problem, model, state.q) + detail::kinetic(state.p);
  double h_new = std::numeric_limits<double>::infinity();
  HmcState proposal;
  try {
    proposal = leapfrog(state, problem, model, cfg.leapfrog_steps_per_trial, cfg.step_size);
    h_new = potential(problem, model, proposal.q) + detail::kinetic(proposal.p);
  } catch (const PropagationError&) {
    h_new = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(h_new)) h_new = std::numeric_limits<double>::infinity();

  HmcTrialResult result;
  result.energy_error = h_new - h_old;
  const double log_ratio = h_old - h_new;
  if (std::isfinite(h_new) && (log_ratio >= 0.0 || std::log(u) < log_ratio)) {
    result.q = std::move(proposal.q);
    result.accepted = true;
  } else {
    result.q = std::move(state.q);
  }
  return result;
}

inline HmcTrialResult hmc_trial(std::span<const double> q, const ConditionalProblem& problem,
                                double epsilon, const HmcConfig& cfg, Rng& rng) {
  return hmc_trial(q, problem, problem.relaxed(epsilon), cfg, rng);
}

struct LevelStats {
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
};

struct ConditionalSample {
  std::vector<double> increments;
  /// Path generated by `increments` under the target drift.
  DiscretePath path;
  std::vector<LevelStats> levels;

  double endpoint() const { return path.endpoint(); }

  std::size_t trials() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.trials;
    return n;
  }

  std::size_t accepted() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.accepted;
    return n;
  }

  /// Fraction of accepted trials over all levels; nullopt with zero trials.
  std::optional<double> accept_rate() const {
    const std::size_t t = trials();
    if (t == 0) return std::nullopt;
    return static_cast<double>(accepted()) / static_cast<double>(t);
  }
};

/// Drift relaxation: sample exp(-V_eps) for each weight of the ladder in
/// turn, handing the last state of each level to the next, and keep the last
/// state of the final (target drift) level.
///
/// Without `init_q` the chain starts from unconditional N(0, dt) increments
/// drawn from `rng`. Throws SamplerError (with level and trial) if the current
/// state cannot be propagated under a level's drift.
inline ConditionalSample sample_conditional_path(const ConditionalProblem& problem,
                                                 const RelaxationLadder& ladder,
                                                 const HmcConfig& cfg,
                                                 std::optional<std::span<const double>> init_q,
                                                 Rng& rng) {
  problem.validate();
  cfg.validate();

  std::vector<double> q;
  if (init_q) {
    detail::check_length(problem, init_q->size());
    q.assign(init_q->begin(), init_q->end());
  } else {
    q = sample_increments(rng, problem.path_len, problem.dt).increments;
  }

  ConditionalSample out;
  out.levels.reserve(ladder.levels());
  for (std::size_t l = 0; l < ladder.levels(); ++l) {
    const RelaxedModel model = problem.relaxed(ladder[l]);
    LevelStats stats{ladder[l], cfg.metropolis_trials_per_level, 0};
    for (std::size_t t = 0; t < cfg.metropolis_trials_per_level; ++t) {
      try {
        HmcTrialResult r = hmc_trial(q, problem, model, cfg, rng);
        if (r.accepted) {
          ++stats.accepted;
          q = std::move(r.q);
        }
      } catch (const PropagationError& e) {
        throw SamplerError(l, t, e.what());
      }
    }
    out.levels.push_back(stats);
  }

  out.path.dt = problem.dt;
  out.path.states.resize(q.size() + 1);
  try {
    propagate_into(problem.x0, q, problem.dt, problem.target, out.path.states);
  } catch (const PropagationError& e) {
    throw SamplerError(ladder.levels() - 1, cfg.metropolis_trials_per_level, e.what());
  }
  out.increments = std::move(q);
  return out;
}

}  // namespace drift_relax

#endif  // DRIFT_RELAX_CONDITIONAL_SAMPLER_HPP
