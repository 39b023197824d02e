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

#ifndef DRIFT_RELAX_BENCH_REPORT_HPP
#define DRIFT_RELAX_BENCH_REPORT_HPP

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift_relax/bench/benchmark.hpp"
#include "drift_relax/bench/config.hpp"
#include "drift_relax/particle_filter.hpp"

namespace drift_relax::bench {

inline constexpr const char* kCsvHeader = "k,t,z,post_mean,ess,ess_pct,accept_rate";

/// One header line plus one row per record. Reals use 17 significant
/// digits; an absent accept_rate is an empty field.
inline std::string format_csv(std::span<const FilterRecord> records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const FilterRecord& r : records) {
    out += std::to_string(r.k);
    for (double v : {r.t, r.z, r.post_mean, r.ess, r.ess_pct()}) {
      out += ',';
      out += detail::format_real(v);
    }
    out += ',';
    if (r.accept_rate) out += detail::format_real(*r.accept_rate);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline void write_csv(std::span<const FilterRecord> records, const std::string& path) {
  write_text_file(path, format_csv(records));
}

namespace detail {

struct Panel {
  double left, top, width, height;
  double x_min, x_max, y_min, y_max;

  double sx(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }
  double sy(double y) const { return top + (y_max - y) / (y_max - y_min) * height; }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void axes(std::ostringstream& os, const Panel& p, const std::string& title,
                 const std::string& y_label, std::span<const double> y_ticks) {
  os << "    <rect x=\"" << fmt(p.left) << "\" y=\"" << fmt(p.top) << "\" width=\"" << fmt(p.width)
     << "\" height=\"" << fmt(p.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "    <text x=\"" << fmt(p.left + p.width / 2) << "\" y=\"" << fmt(p.top - 10)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "    <text x=\"" << fmt(p.left - 45) << "\" y=\"" << fmt(p.top + p.height / 2)
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " << fmt(p.left - 45)
     << ' ' << fmt(p.top + p.height / 2) << ")\">" << y_label << "</text>\n";
  for (double y : y_ticks) {
    os << "    <text x=\"" << fmt(p.left - 6) << "\" y=\"" << fmt(p.sy(y) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(y) << "</text>\n";
  }
  for (double t = std::ceil(p.x_min); t <= p.x_max; t += 1.0) {
    os << "    <text x=\"" << fmt(p.sx(t)) << "\" y=\"" << fmt(p.top + p.height + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(t) << "</text>\n";
  }
}

inline void polyline(std::ostringstream& os, const Panel& p, std::span<const FilterRecord> recs,
                     bool ess, const char* color, const char* cls) {
  os << "    <polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
     << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i) os << ' ';
    os << fmt(p.sx(recs[i].t)) << ',' << fmt(p.sy(ess ? recs[i].ess_pct() : recs[i].post_mean));
  }
  os << "\"/>\n";
}

inline void legend(std::ostringstream& os, const Panel& p, const std::string& generic,
                   const std::string& mcmc) {
  const double x = p.left + 10;
  const double y = p.top + 16;
  os << "    <g class=\"legend\">\n"
     << "      <line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y - 4) << "\" x2=\"" << fmt(x + 20)
     << "\" y2=\"" << fmt(y - 4) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n"
     << "      <text x=\"" << fmt(x + 26) << "\" y=\"" << fmt(y) << "\" font-size=\"11\">"
     << generic << "</text>\n"
     << "      <line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y + 12) << "\" x2=\"" << fmt(x + 20)
     << "\" y2=\"" << fmt(y + 12) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n"
     << "      <text x=\"" << fmt(x + 26) << "\" y=\"" << fmt(y + 16) << "\" font-size=\"11\">"
     << mcmc << "</text>\n"
     << "    </g>\n";
}

}  // namespace detail

/// Two-panel SVG: posterior means of both filters against the observations,
/// and both ESS curves as a percentage of each filter's particle count.
inline std::string render_svg(std::span<const FilterRecord> generic,
                              std::span<const FilterRecord> mcmc,
                              const ObservationSequence& observations) {
  if (generic.size() != mcmc.size() || generic.size() != observations.size())
    throw std::invalid_argument("render_svg: record and observation counts differ");

  double t_max = 1.0;
  double y_lo = -1.5, y_hi = 1.5;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    t_max = std::max(t_max, observations.times[i]);
    y_lo = std::min({y_lo, observations.values[i], generic[i].post_mean, mcmc[i].post_mean});
    y_hi = std::max({y_hi, observations.values[i], generic[i].post_mean, mcmc[i].post_mean});
  }
  const double y_pad = 0.1 * (y_hi - y_lo);
  const detail::Panel mean_panel{70, 40, 620, 240, 0.0, t_max, y_lo - y_pad, y_hi + y_pad};
  const detail::Panel ess_panel{70, 350, 620, 240, 0.0, t_max, 0.0, 105.0};

  const std::string generic_label =
      "generic PF (N=" + std::to_string(generic.empty() ? 0 : generic.front().n_particles) + ")";
  const std::string mcmc_label =
      "PF with MCMC step (N=" + std::to_string(mcmc.empty() ? 0 : mcmc.front().n_particles) + ")";

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"630\" "
        "viewBox=\"0 0 720 630\">\n"
     << "  <rect width=\"720\" height=\"630\" fill=\"white\"/>\n";

  os << "  <g id=\"posterior-mean-panel\" class=\"panel\">\n";
  const double mean_ticks[] = {-1.0, 0.0, 1.0};
  detail::axes(os, mean_panel, "Posterior mean of X_t", "posterior mean", mean_ticks);
  detail::polyline(os, mean_panel, generic, false, "#1f77b4", "generic");
  detail::polyline(os, mean_panel, mcmc, false, "#d62728", "mcmc");
  for (std::size_t i = 0; i < observations.size(); ++i) {
    os << "    <circle class=\"observation\" data-k=\"" << (i + 1) << "\" data-z=\""
       << detail::fmt(observations.values[i]) << "\" cx=\""
       << detail::fmt(mean_panel.sx(observations.times[i])) << "\" cy=\""
       << detail::fmt(mean_panel.sy(observations.values[i]))
       << "\" r=\"4\" fill=\"black\"/>\n";
  }
  detail::legend(os, mean_panel, generic_label, mcmc_label);
  os << "  </g>\n";

  os << "  <g id=\"ess-panel\" class=\"panel\">\n";
  const double ess_ticks[] = {0.0, 50.0, 100.0};
  detail::axes(os, ess_panel, "Effective sample size (% of N)", "ESS %", ess_ticks);
  detail::polyline(os, ess_panel, generic, true, "#1f77b4", "generic");
  detail::polyline(os, ess_panel, mcmc, true, "#d62728", "mcmc");
  detail::legend(os, ess_panel, generic_label, mcmc_label);
  os << "  </g>\n";

  os << "</svg>\n";
  return os.str();
}

inline void emit_plot(std::span<const FilterRecord> generic, std::span<const FilterRecord> mcmc,
                      const ObservationSequence& observations, const std::string& path) {
  write_text_file(path, render_svg(generic, mcmc, observations));
}

}  // namespace drift_relax::bench

#endif  // DRIFT_RELAX_BENCH_REPORT_HPP
