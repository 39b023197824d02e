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

#ifndef DRIFT_RELAX_RANDOM_HPP
#define DRIFT_RELAX_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace drift_relax {

/// Random stream used throughout the library. One stream per worker; never
/// shared between threads.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Purpose tags that keep the substreams of different consumers disjoint.
enum class StreamTag : std::uint64_t {
  kPredict = 1,
  kResample = 2,
  kRejuvenate = 3,
  kSamplePath = 4,
  kTruth = 5,
};

/// Derives a 64-bit seed from a master seed and a list of counters.
///
/// The scheme folds each counter into the running state with one splitmix64
/// round: s_0 = splitmix64(master), s_{i+1} = splitmix64(s_i ^ c_i). Seeds
/// therefore depend only on (master, counters) and never on the order in
/// which workers are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t s = detail::splitmix64(master);
  for (std::uint64_t c : counters) s = detail::splitmix64(s ^ c);
  return s;
}

/// Stream for (master seed, purpose, observation index k, particle index n).
inline Rng substream(std::uint64_t master, StreamTag tag, std::uint64_t k, std::uint64_t n) {
  return Rng(derive_seed(master, {static_cast<std::uint64_t>(tag), k, n}));
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform draw on the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  // 53 random bits shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace drift_relax

#endif  // DRIFT_RELAX_RANDOM_HPP
