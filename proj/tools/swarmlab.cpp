// Copyright 2026 The Swarmlab Authors.
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

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "swarmlab/errors.h"
#include "swarmlab/experiment.h"
#include "swarmlab/parallel.h"

namespace {

namespace ex = swarmlab::experiment;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool trace = false;
  std::string input;
  bool weights = false;
  std::string query;
};

const char* kDefaults = R"(Defaults (override in the JSON config):
  fit:        learning_rate 1, l2_lambda 0.01, max_iters 10000, tol 1e-8
  reputation: alpha 0.5, beta 0.9, delta_up 0.02, delta_down 0.03, decay_delta 0.005,
              r_min 0, r_max 1, slash_threshold 0.1, r_initial 0.5, perf_threshold 0.5
  sybil:      lambda 15, gamma 1.5, tau_factor 1.2 (tau = 1.2 * N / (2 (N - 1))), min_co_rounds 20
  economics:  c_test 1, n_tests 100, c_inference 0.01, r_initial 0.5, alpha_slash 1, reward_per_round 1
  swarm:      n_nodes 35, judge_noise 2 (logistic), response_quality_sd 1, correct_threshold 1,
              comparisons_per_judge 3N, rounds 500, burn_in 100, requalify_rounds 20
  sweep:      sizes 1,3,5,7,10,15,20,25,30,35; fractions 0,.1,.2,.3,.4,.5; rounds 500; seeds 10
  mesh:       dim 8, nodes 64, points_per_node 1, beta_cap 8, lambda_split unbounded
Environment: SWARMLAB_THREADS caps parallel runs.
Exit codes: 0 success, 2 configuration error, 3 runtime error.)";

std::vector<double> parse_query(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ex::ConfigError("--query", "expected comma-separated numbers");
    out.push_back(v);
  }
  return out;
}

int execute(ex::Kind kind, const Options& opts) {
  try {
    ex::ExperimentConfig cfg;
    if (!opts.config.empty()) {
      cfg = ex::load_config(opts.config, kind);
    } else {
      cfg.kind = kind;
    }
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (!opts.input.empty()) cfg.input.comparisons = opts.input;
    if (opts.weights) cfg.input.use_weights = true;
    if (!opts.query.empty()) cfg.mesh.query = parse_query(opts.query);
    cfg.resolve();
    ex::run(cfg, {opts.out, opts.trace}, std::cout);
    return kOk;
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const swarmlab::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const swarmlab::DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  swarmlab::apply_thread_limit_from_env();

  CLI::App app{"swarmlab: swarm consensus simulation laboratory"};
  app.footer(kDefaults);
  app.require_subcommand(1);
  Options opts;

  struct Entry {
    ex::Kind kind;
    const char* help;
  };
  const Entry entries[] = {
      {ex::Kind::fit, "Fit Bradley-Terry scores to a winner,loser,judge,weight CSV"},
      {ex::Kind::round, "Run consecutive consensus rounds and record reputation trajectories"},
      {ex::Kind::sweep_size, "Accuracy against swarm size for consensus and majority selectors"},
      {ex::Kind::sweep_byzantine, "Accuracy against Byzantine fraction for weighted, unweighted and majority"},
      {ex::Kind::sweep_sybil, "Sybil clique economics over identity count and penalty strength"},
      {ex::Kind::mesh_build, "Partition synthetic capability embeddings into sub-meshes"},
      {ex::Kind::route, "Route a query point to its sub-mesh"},
  };

  std::optional<ex::Kind> chosen;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(std::string(ex::kind_name(e.kind)), e.help);
    sub->add_option("--config", opts.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Master seed (overrides the config)");
    sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
    sub->add_flag("--trace", opts.trace, "Write per-round JSON lines (round)");
    if (e.kind == ex::Kind::fit) {
      sub->add_option("--input", opts.input, "Comparison CSV (winner,loser,judge,weight)");
      sub->add_flag("--weights", opts.weights, "Use the weight column");
    }
    if (e.kind == ex::Kind::route) sub->add_option("--query", opts.query, "Query point, comma-separated");
    const auto kind = e.kind;
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  return execute(*chosen, opts);
}
