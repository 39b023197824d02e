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

#ifndef DRIFT_RELAX_SDE_HPP
#define DRIFT_RELAX_SDE_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drift_relax/random.hpp"

namespace drift_relax {

/// Raised when an Euler-Maruyama step produces a non-finite state.
class PropagationError : public std::runtime_error {
 public:
  explicit PropagationError(std::size_t step)
      : std::runtime_error("non-finite state at Euler-Maruyama step " + std::to_string(step)),
        step_(step) {}

  /// 1-based index of the step whose output was non-finite.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Anything that can drive an Euler-Maruyama step: a drift, its derivative
/// and a constant diffusion coefficient.
template <typename M>
concept DriftProvider = requires(const M& m, double x) {
  { m.drift(x) } -> std::convertible_to<double>;
  { m.drift_deriv(x) } -> std::convertible_to<double>;
  { m.sigma() } -> std::convertible_to<double>;
};

inline double double_well_drift(double x) { return -4.0 * x * (x * x - 1.0); }

inline double double_well_drift_deriv(double x) { return -4.0 * (3.0 * x * x - 1.0); }

/// Drift of the shallower well alpha * (y^4 - 2 y^2); minima stay at +-1.
inline double scaled_well_drift(double alpha, double y) { return alpha * double_well_drift(y); }

inline double scaled_well_drift_deriv(double alpha, double y) {
  return alpha * double_well_drift_deriv(y);
}

/// Worst relative deviation of the analytic drift derivative from a central
/// difference with step h, sampled on `points` equispaced states in [lo, hi].
template <DriftProvider M>
double drift_deriv_mismatch(const M& model, double lo = -3.0, double hi = 3.0,
                            std::size_t points = 101, double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(points - 1);
    const double fd = (model.drift(x + h) - model.drift(x - h)) / (2.0 * h);
    const double d = model.drift_deriv(x);
    worst = std::max(worst, std::abs(d - fd) / std::max(1.0, std::abs(d)));
  }
  return worst;
}

/// Scalar SDE dX = drift(X) dt + sigma dB with constant sigma.
///
/// Immutable after construction. The diffusion coefficient is a number, not a
/// function of the state: the increment-space gradient in the sampler relies
/// on it being constant.
class SdeModel {
 public:
  using Function = std::function<double(double)>;

  SdeModel(Function drift, Function drift_deriv, double sigma, std::string name = "custom")
      : drift_(std::move(drift)),
        drift_deriv_(std::move(drift_deriv)),
        sigma_(sigma),
        name_(std::move(name)) {
    if (!drift_ || !drift_deriv_) throw std::invalid_argument("SdeModel: drift callables must be set");
    // sigma == 0 is allowed: it freezes the noise, which the filter tests use.
    if (!std::isfinite(sigma_) || sigma_ < 0.0)
      throw std::invalid_argument("SdeModel: sigma must be finite and non-negative");
#ifndef NDEBUG
    if (drift_deriv_mismatch(*this) > 1e-6)
      throw std::invalid_argument("SdeModel '" + name_ + "': drift_deriv disagrees with drift");
#endif
  }

  static SdeModel double_well(double sigma = 0.5) {
    return SdeModel(double_well_drift, double_well_drift_deriv, sigma, "double-well");
  }

  static SdeModel scaled_well(double alpha, double sigma = 0.5) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("scaled_well: alpha must lie in (0, 1]");
    return SdeModel([alpha](double y) { return scaled_well_drift(alpha, y); },
                    [alpha](double y) { return scaled_well_drift_deriv(alpha, y); }, sigma,
                    "scaled-well");
  }

  static SdeModel zero_drift(double sigma) {
    return SdeModel([](double) { return 0.0; }, [](double) { return 0.0; }, sigma, "zero-drift");
  }

  double drift(double x) const { return drift_(x); }
  double drift_deriv(double x) const { return drift_deriv_(x); }
  double sigma() const noexcept { return sigma_; }
  const std::string& name() const noexcept { return name_; }

 private:
  Function drift_;
  Function drift_deriv_;
  double sigma_;
  std::string name_;
};

/// Convex combination (1 - epsilon) * base + epsilon * target of two drifts
/// sharing one sigma. A drift whose weight is exactly zero is never called.
class RelaxedModel {
 public:
  RelaxedModel(SdeModel base, SdeModel target, double epsilon)
      : base_(std::move(base)), target_(std::move(target)), epsilon_(epsilon) {
    if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0))
      throw std::invalid_argument("RelaxedModel: epsilon must lie in [0, 1]");
    if (base_.sigma() != target_.sigma())
      throw std::invalid_argument("RelaxedModel: base and target sigma differ");
  }

  double drift(double y) const {
    if (epsilon_ == 0.0) return base_.drift(y);
    if (epsilon_ == 1.0) return target_.drift(y);
    return (1.0 - epsilon_) * base_.drift(y) + epsilon_ * target_.drift(y);
  }

  double drift_deriv(double y) const {
    if (epsilon_ == 0.0) return base_.drift_deriv(y);
    if (epsilon_ == 1.0) return target_.drift_deriv(y);
    return (1.0 - epsilon_) * base_.drift_deriv(y) + epsilon_ * target_.drift_deriv(y);
  }

  double sigma() const noexcept { return base_.sigma(); }
  double epsilon() const noexcept { return epsilon_; }
  const SdeModel& base() const noexcept { return base_; }
  const SdeModel& target() const noexcept { return target_; }

 private:
  SdeModel base_;
  SdeModel target_;
  double epsilon_;
};

template <DriftProvider M>
double relaxed_drift(const M& model, double y) {
  return model.drift(y);
}

/// Brownian increments dB_0 ... dB_{I-1} on a uniform grid of step dt.
struct IncrementPath {
  std::vector<double> increments;
  double dt = 0.0;

  std::size_t size() const noexcept { return increments.size(); }
  /// Length of the time window the increments span.
  double horizon() const noexcept { return static_cast<double>(increments.size()) * dt; }
};

/// Euler-Maruyama grid values X_0 ... X_I.
struct DiscretePath {
  std::vector<double> states;
  double dt = 0.0;

  double endpoint() const { return states.back(); }
};

/// Euler-Maruyama recursion into a caller-owned buffer of size q.size() + 1.
/// Returns the endpoint.
template <DriftProvider M>
double propagate_into(double x0, std::span<const double> increments, double dt, const M& model,
                      std::span<double> states) {
  const double sigma = model.sigma();
  double x = x0;
  states[0] = x;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    x = x + model.drift(x) * dt + sigma * increments[i];
    if (!std::isfinite(x)) throw PropagationError(i + 1);
    states[i + 1] = x;
  }
  return x;
}

/// Endpoint only, without storing the grid.
template <DriftProvider M>
double propagate_endpoint(double x0, std::span<const double> increments, double dt,
                          const M& model) {
  const double sigma = model.sigma();
  double x = x0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    x = x + model.drift(x) * dt + sigma * increments[i];
    if (!std::isfinite(x)) throw PropagationError(i + 1);
  }
  return x;
}

template <DriftProvider M>
DiscretePath propagate(double x0, const IncrementPath& path, const M& model) {
  if (!(path.dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
  DiscretePath out{std::vector<double>(path.size() + 1), path.dt};
  propagate_into(x0, path.increments, path.dt, model, out.states);
  return out;
}

/// I independent N(0, dt) increments.
inline IncrementPath sample_increments(Rng& rng, std::size_t count, double dt) {
  if (count == 0) throw std::invalid_argument("sample_increments: count must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt must be positive");
  IncrementPath path{std::vector<double>(count), dt};
  const double sd = std::sqrt(dt);
  for (double& b : path.increments) b = sd * standard_normal(rng);
  return path;
}

}  // namespace drift_relax

#endif  // DRIFT_RELAX_SDE_HPP
