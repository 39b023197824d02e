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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "drift_relax/sde.hpp"
#include "test_support.hpp"

namespace {

using drift_relax::DiscretePath;
using drift_relax::IncrementPath;
using drift_relax::RelaxedModel;
using drift_relax::Rng;
using drift_relax::SdeModel;

TEST(DoubleWellDrift, HandValues) {
  EXPECT_EQ(drift_relax::double_well_drift(0.0), 0.0);
  EXPECT_EQ(drift_relax::double_well_drift(1.0), 0.0);
  EXPECT_EQ(drift_relax::double_well_drift(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(drift_relax::double_well_drift(0.5), 1.5);
}

TEST(ScaledWellDrift, MinimaStayPutAndScale) {
  EXPECT_EQ(drift_relax::scaled_well_drift(0.1, 1.0), 0.0);
  EXPECT_EQ(drift_relax::scaled_well_drift(0.1, -1.0), 0.0);
  EXPECT_NEAR(drift_relax::scaled_well_drift(0.1, 0.5), 0.15, 1e-15);
  for (double y : {-2.0, -0.3, 1.7})
    EXPECT_EQ(drift_relax::scaled_well_drift(1.0, y), drift_relax::double_well_drift(y));
}

TEST(ScaledWellDrift, RejectsAlphaOutsideUnitInterval) {
  EXPECT_THROW(SdeModel::scaled_well(0.0), std::invalid_argument);
  EXPECT_THROW(SdeModel::scaled_well(1.5), std::invalid_argument);
  EXPECT_NO_THROW(SdeModel::scaled_well(1.0));
}

TEST(RelaxedDrift, EndpointsAreExact) {
  const SdeModel base = SdeModel::scaled_well(0.1);
  const SdeModel target = SdeModel::double_well();
  const RelaxedModel at0(base, target, 0.0);
  const RelaxedModel at1(base, target, 1.0);
  for (double y : {-2.3, -1.0, -0.41, 0.0, 0.77, 1.9}) {
    EXPECT_EQ(drift_relax::relaxed_drift(at0, y), base.drift(y));
    EXPECT_EQ(drift_relax::relaxed_drift(at1, y), target.drift(y));
  }
}

TEST(RelaxedDrift, Midpoint) {
  const RelaxedModel half(SdeModel::scaled_well(0.1), SdeModel::double_well(), 0.5);
  EXPECT_NEAR(drift_relax::relaxed_drift(half, 0.5), 0.825, 1e-15);
}

TEST(RelaxedDrift, AffineInEpsilon) {
  const SdeModel base = SdeModel::scaled_well(0.1);
  const SdeModel target = SdeModel::double_well();
  Rng rng(7);
  std::uniform_real_distribution<double> ys(-3.0, 3.0), es(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double y = ys(rng);
    const double e = es(rng);
    const double lhs = RelaxedModel(base, target, e).drift(y);
    const double rhs = (1.0 - e) * RelaxedModel(base, target, 0.0).drift(y) +
                       e * RelaxedModel(base, target, 1.0).drift(y);
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(RelaxedModel, RejectsMismatchedSigmaAndBadEpsilon) {
  EXPECT_THROW(RelaxedModel(SdeModel::scaled_well(0.1, 0.5), SdeModel::double_well(0.4), 0.5),
               std::invalid_argument);
  EXPECT_THROW(RelaxedModel(SdeModel::scaled_well(0.1), SdeModel::double_well(), 1.01),
               std::invalid_argument);
  EXPECT_THROW(RelaxedModel(SdeModel::scaled_well(0.1), SdeModel::double_well(), -0.1),
               std::invalid_argument);
}

TEST(SdeModel, RejectsNegativeOrNonFiniteSigma) {
  EXPECT_THROW(SdeModel::double_well(-0.5), std::invalid_argument);
  EXPECT_THROW(SdeModel::double_well(NAN), std::invalid_argument);
}

// Analytic derivative against a central difference at random states.
TEST(SdeModel, DriftDerivMatchesCentralDifference) {
  const SdeModel base = SdeModel::scaled_well(0.1);
  const SdeModel target = SdeModel::double_well();
  const std::vector<RelaxedModel> relaxed{RelaxedModel(base, target, 0.0),
                                          RelaxedModel(base, target, 0.3),
                                          RelaxedModel(base, target, 1.0)};
  Rng rng(11);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  const double h = 1e-6;
  auto rel_err = [h](const auto& m, double x) {
    const double fd = (m.drift(x + h) - m.drift(x - h)) / (2.0 * h);
    const double d = m.drift_deriv(x);
    return std::abs(d - fd) / std::max(1.0, std::abs(d));
  };
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng);
    EXPECT_LE(rel_err(target, x), 1e-6) << "x=" << x;
    EXPECT_LE(rel_err(base, x), 1e-6) << "x=" << x;
    for (const auto& m : relaxed) EXPECT_LE(rel_err(m, x), 1e-6) << "x=" << x;
    EXPECT_EQ(target.drift_deriv(x), -4.0 * (3.0 * x * x - 1.0));
  }
  EXPECT_LE(drift_relax::drift_deriv_mismatch(target), 1e-6);
}

TEST(SdeModel, WrongDerivativeIsDetected) {
  const SdeModel wrong([](double x) { return x * x; }, [](double) { return 1.0; }, 0.5);
  EXPECT_GT(drift_relax::drift_deriv_mismatch(wrong), 1e-3);
}

TEST(Propagate, ZeroDriftNoNoiseIsConstant) {
  const IncrementPath path{std::vector<double>(50, 0.0), 0.02};
  const DiscretePath out = drift_relax::propagate(0.37, path, SdeModel::zero_drift(0.5));
  ASSERT_EQ(out.states.size(), 51u);
  for (double x : out.states) EXPECT_EQ(x, 0.37);
}

TEST(Propagate, DoubleWellMinimumIsFixedPoint) {
  const IncrementPath path{std::vector<double>(100, 0.0), 0.01};
  const DiscretePath out = drift_relax::propagate(-1.0, path, SdeModel::double_well());
  for (double x : out.states) EXPECT_EQ(x, -1.0);
}

TEST(Propagate, InitialStateIsExact) {
  Rng rng(3);
  const IncrementPath path = drift_relax::sample_increments(rng, 100, 0.01);
  const DiscretePath out = drift_relax::propagate(-0.123456789, path, SdeModel::double_well());
  EXPECT_EQ(out.states.front(), -0.123456789);
  EXPECT_EQ(out.dt, 0.01);
}

// Zero drift: X_I - x0 = sigma * sum(dB).
TEST(Propagate, ZeroDriftEndpointIsLinearInNoise) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const IncrementPath path = drift_relax::sample_increments(rng, 100, 0.01);
    const double x0 = 0.25 * rep - 2.0;
    const DiscretePath out = drift_relax::propagate(x0, path, SdeModel::zero_drift(0.5));
    double expected = x0;
    for (double b : path.increments) expected = expected + 0.5 * b;
    EXPECT_EQ(out.endpoint(), expected);
    double sum = 0.0;
    for (double b : path.increments) sum += b;
    EXPECT_NEAR(out.endpoint() - x0, 0.5 * sum, 1e-14);
  }
}

TEST(Propagate, IsBitwiseDeterministic) {
  Rng rng(9);
  const IncrementPath path = drift_relax::sample_increments(rng, 100, 0.01);
  const SdeModel m = SdeModel::double_well();
  const DiscretePath a = drift_relax::propagate(-1.0, path, m);
  const DiscretePath b = drift_relax::propagate(-1.0, path, m);
  EXPECT_EQ(a.states, b.states);
}

TEST(Propagate, BlowUpReportsStep) {
  // Cubic drift with a huge step explodes within a few steps.
  const IncrementPath path{std::vector<double>(40, 0.0), 1.0};
  try {
    drift_relax::propagate(3.0, path, SdeModel::double_well());
    FAIL() << "expected PropagationError";
  } catch (const drift_relax::PropagationError& e) {
    EXPECT_GE(e.step(), 1u);
    EXPECT_LE(e.step(), 40u);
  }
}

TEST(SampleIncrements, MomentsMatchBrownianIncrements) {
  Rng rng(2024);
  std::vector<double> all;
  all.reserve(1'000'000);
  for (int i = 0; i < 10'000; ++i) {
    const IncrementPath p = drift_relax::sample_increments(rng, 100, 0.01);
    ASSERT_EQ(p.size(), 100u);
    EXPECT_NEAR(p.horizon(), 1.0, 1e-12);
    all.insert(all.end(), p.increments.begin(), p.increments.end());
  }
  const double n = static_cast<double>(all.size());
  EXPECT_LE(std::abs(drift_relax::testing::mean(all)), 4.0 * 0.1 / std::sqrt(n));
  EXPECT_NEAR(drift_relax::testing::variance(all), 0.01, 0.01 * 0.01);
}

TEST(SampleIncrements, SameSeedSameIncrements) {
  Rng a(77), b(77);
  EXPECT_EQ(drift_relax::sample_increments(a, 100, 0.01).increments,
            drift_relax::sample_increments(b, 100, 0.01).increments);
}

TEST(SampleIncrements, RejectsBadArguments) {
  Rng rng(1);
  EXPECT_THROW(drift_relax::sample_increments(rng, 0, 0.01), std::invalid_argument);
  EXPECT_THROW(drift_relax::sample_increments(rng, 10, 0.0), std::invalid_argument);
}

}  // namespace
