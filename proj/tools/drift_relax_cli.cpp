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

// Command-line front end: the double-well filtering benchmark, single filter
// runs and standalone conditional path sampling.

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drift_relax/bench/benchmark.hpp"
#include "drift_relax/bench/config.hpp"
#include "drift_relax/bench/report.hpp"
#include "drift_relax/conditional_sampler.hpp"
#include "drift_relax/parallel.hpp"

namespace {

namespace dr = drift_relax;
namespace bench = drift_relax::bench;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool simulate_truth = false;
};

bench::BenchmarkConfig resolve_config(const CommonOptions& opts) {
  bench::BenchmarkConfig cfg =
      opts.config_path.empty() ? bench::BenchmarkConfig{} : bench::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.threads) cfg.threads = *opts.threads;
  if (opts.simulate_truth) cfg.simulate_truth = true;
  cfg.validate();
  return cfg;
}

// Hash of "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string manifest(const std::string& command, const CommonOptions& opts,
                     const bench::BenchmarkConfig& cfg,
                     const std::vector<std::pair<std::string, std::string>>& outputs) {
  const std::string echo = bench::to_text(cfg);
  std::ostringstream os;
  os << "# drift_relax run manifest\n"
     << "command = " << command << '\n'
     << "seed = " << cfg.seed << '\n';
  if (!opts.config_path.empty()) {
    os << "config_path = " << opts.config_path << '\n'
       << "config_file_sha1 = " << git_blob_sha1(read_file(opts.config_path)) << '\n';
  } else {
    os << "config_path = (defaults)\n";
  }
  os << "effective_config_sha1 = " << git_blob_sha1(echo) << '\n';
  for (const auto& [name, content] : outputs)
    os << "output " << name << " sha1 = " << git_blob_sha1(content) << '\n';
  os << "\n[effective config]\n" << echo;
  return os.str();
}

int run_benchmark_cmd(const CommonOptions& opts, const std::string& out_dir) {
  const bench::BenchmarkConfig cfg = resolve_config(opts);
  const bench::BenchmarkResult result = bench::run_benchmark(cfg);

  const std::string generic_csv = bench::format_csv(result.generic);
  const std::string mcmc_csv = bench::format_csv(result.mcmc);
  const std::string svg = bench::render_svg(result.generic, result.mcmc, result.observations);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  bench::write_text_file((dir / "generic.csv").string(), generic_csv);
  bench::write_text_file((dir / "mcmc.csv").string(), mcmc_csv);
  bench::write_text_file((dir / "comparison.svg").string(), svg);
  bench::write_text_file(
      (dir / "manifest.txt").string(),
      manifest("benchmark", opts, cfg,
               {{"generic.csv", generic_csv}, {"mcmc.csv", mcmc_csv}, {"comparison.svg", svg}}));

  for (std::size_t i = 0; i < result.generic.size(); ++i) {
    const auto& g = result.generic[i];
    const auto& m = result.mcmc[i];
    std::printf("k=%zu z=%+.0f  generic mean=%+.3f ess%%=%6.2f   mcmc mean=%+.3f ess%%=%6.2f\n",
                g.k, g.z, g.post_mean, g.ess_pct(), m.post_mean, m.ess_pct());
  }
  std::printf("wrote %s\n", out_dir.c_str());
  return kExitOk;
}

int run_filter_cmd(const CommonOptions& opts, const std::string& variant_name,
                   const std::string& out_path) {
  const bench::BenchmarkConfig cfg = resolve_config(opts);
  const bench::FilterVariant variant =
      variant_name == "generic" ? bench::FilterVariant::kGeneric : bench::FilterVariant::kMcmc;
  const bench::ObservationSequence obs = bench::observations_for(cfg);
  const std::vector<dr::FilterRecord> records = bench::run_filter(variant, cfg, obs);
  const std::string csv = bench::format_csv(records);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    bench::write_text_file(out_path, csv);
  }
  return kExitOk;
}

int run_sample_path_cmd(const CommonOptions& opts, double x0, double z, std::size_t runs,
                        const std::string& out_path) {
  const bench::BenchmarkConfig cfg = resolve_config(opts);
  const dr::ConditionalProblem problem{
      .x0 = x0,
      .z = z,
      .obs_var = cfg.obs_var,
      .base = bench::base_model(cfg),
      .target = bench::target_model(cfg),
      .path_len = cfg.I,
      .dt = cfg.dt,
  };
  problem.validate();
  const dr::RelaxationLadder ladder = dr::make_ladder(cfg.L);

  std::vector<double> endpoints(runs);
  std::vector<double> rates(runs);
  dr::parallel_for(runs, cfg.threads, [&](std::size_t r) {
    dr::Rng rng = dr::substream(cfg.seed, dr::StreamTag::kSamplePath, 0, r);
    const dr::ConditionalSample s =
        dr::sample_conditional_path(problem, ladder, cfg.hmc, std::nullopt, rng);
    endpoints[r] = s.endpoint();
    rates[r] = s.accept_rate().value_or(0.0);
  });

  std::string csv = "run,endpoint,accept_rate\n";
  double mean = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    csv += std::to_string(r) + ',' + bench::detail::format_real(endpoints[r]) + ',' +
           bench::detail::format_real(rates[r]) + '\n';
    mean += endpoints[r];
  }
  mean /= static_cast<double>(runs);
  double var = 0.0;
  for (double e : endpoints) var += (e - mean) * (e - mean);
  var = runs > 1 ? var / static_cast<double>(runs - 1) : 0.0;

  if (out_path.empty()) {
    std::cout << csv;
  } else {
    bench::write_text_file(out_path, csv);
  }
  std::fprintf(stderr, "runs=%zu endpoint_mean=%.6f endpoint_var=%.6f stderr=%.6f\n", runs, mean,
               var, std::sqrt(var / static_cast<double>(runs)));
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Key-value config file (defaults if omitted)");
  cmd->add_option("--seed", opts.seed, "Master seed; overrides the config");
  cmd->add_option("--threads", opts.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional path sampling by drift relaxation, and particle filters built on it"};
  app.require_subcommand(1);

  CommonOptions bench_opts;
  std::string out_dir;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "Run both filters on the double-well problem");
  add_common(bench_cmd, bench_opts);
  bench_cmd->add_option("--out-dir", out_dir, "Directory for CSVs, SVG and manifest")->required();
  bench_cmd->add_flag("--simulate-truth", bench_opts.simulate_truth,
                      "Observe a simulated hidden path instead of the alternating sequence");

  CommonOptions sample_opts;
  double x0 = 0.0;
  double z = 0.0;
  std::size_t runs = 1;
  std::string sample_out;
  CLI::App* sample_cmd = app.add_subcommand("sample-path", "Standalone conditional path sampling");
  add_common(sample_cmd, sample_opts);
  sample_cmd->add_option("--x0", x0, "Start point")->required();
  sample_cmd->add_option("--z", z, "Observed endpoint value")->required();
  sample_cmd->add_option("--runs", runs, "Independent sampler runs")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--out", sample_out, "Endpoint CSV (stdout if omitted)");

  CommonOptions filter_opts;
  std::string variant = "mcmc";
  std::string filter_out;
  CLI::App* filter_cmd = app.add_subcommand("filter", "Run a single filter");
  add_common(filter_cmd, filter_opts);
  filter_cmd->add_option("--variant", variant, "generic or mcmc")
      ->check(CLI::IsMember({"generic", "mcmc"}))
      ->required();
  filter_cmd->add_option("--out", filter_out, "Record CSV (stdout if omitted)");
  filter_cmd->add_flag("--simulate-truth", filter_opts.simulate_truth,
                       "Observe a simulated hidden path instead of the alternating sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*bench_cmd) return run_benchmark_cmd(bench_opts, out_dir);
    if (*sample_cmd) return run_sample_path_cmd(sample_opts, x0, z, runs, sample_out);
    if (*filter_cmd) return run_filter_cmd(filter_opts, variant, filter_out);
  } catch (const bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
