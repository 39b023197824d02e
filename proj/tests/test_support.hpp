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

// Statistics and parsing helpers shared by the unit and acceptance suites.
// Nothing here calls into the library, so these can serve as oracles.

#ifndef DRIFT_RELAX_TESTS_TEST_SUPPORT_HPP
#define DRIFT_RELAX_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <vector>

namespace drift_relax::testing {

/// Asymptotic Kolmogorov critical value at the 1% level.
inline constexpr double kKsCritical1pct = 1.6276;

/// 99th percentile of chi-square with 9 degrees of freedom.
inline constexpr double kChiSquare9df1pct = 21.666;

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double normal_cdf(double x, double mu, double var) {
  return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * var));
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double ks_two_sample_critical(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return kKsCritical1pct * std::sqrt((dn + dm) / (dn * dm));
}

/// Standard error of the mean from non-overlapping batch means.
inline double batch_mean_stderr(std::span<const double> v, std::size_t batches) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean(v.subspan(b * len, len));
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

/// Pearson statistic of observed counts against expected counts.
inline double chi_square(std::span<const double> observed, std::span<const double> expected) {
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    s += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  return s;
}

/// Splits CSV text into rows of fields (no quoting).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

/// Minimal XML well-formedness check: balanced, properly nested elements and
/// quoted attributes. Returns the names of all elements in document order.
inline bool xml_well_formed(const std::string& doc, std::vector<std::string>* elements = nullptr) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool seen_root = false;
  while ((i = doc.find('<', i)) != std::string::npos) {
    if (doc.compare(i, 5, "<?xml") == 0) {
      i = doc.find("?>", i);
      if (i == std::string::npos) return false;
      continue;
    }
    const std::size_t close = doc.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = doc.substr(i + 1, close - i - 1);
    i = close + 1;
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (!tag.empty() && tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = !tag.empty() && tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (name.empty()) return false;
    if (stack.empty()) {
      if (seen_root) return false;
      seen_root = true;
    }
    if (elements) elements->push_back(name);
    if (!self_closing) stack.push_back(name);
  }
  return seen_root && stack.empty();
}

}  // namespace drift_relax::testing

#endif  // DRIFT_RELAX_TESTS_TEST_SUPPORT_HPP
