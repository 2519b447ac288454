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

// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swarmlab/bt_engine.h"
#include "swarmlab/comparison_scheduler.h"
#include "swarmlab/hashing.h"
#include "swarmlab/parallel.h"
#include "swarmlab/random.h"
#include "swarmlab/reputation.h"
#include "swarmlab/semantic_mesh.h"
#include "swarmlab/swarm_sim.h"
#include "swarmlab/sybil_economics.h"

using namespace swarmlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // <= 0: no runtime bound
  std::function<Verdict()> body;
};

std::string fmt(const char* format, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// 1. Planted strengths over 10 items, comparisons drawn through the scheduler.
Verdict bt_recovery() {
  const std::size_t n = 10, judges = 20;
  std::vector<double> planted(n);
  for (std::size_t i = 0; i < n; ++i) planted[i] = 1.5 * (static_cast<double>(i) - 4.5);

  std::size_t recovered = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const auto state = Sha256().update("acceptance/bt").update_u64(trial).finish();
    auto coins = make_rng(state);
    bt::ComparisonTally tally(n);
    for (std::size_t m = 0; m < judges; ++m) {
      const auto seed = scheduling::derive_seed(state, "judge-" + std::to_string(m));
      const auto a = scheduling::sample_assignment(seed, n, {}, scheduling::default_comparisons_per_judge(n));
      for (const auto& p : a.pairs) {
        const bool first = uniform01(coins) < logistic(planted[p.first] - planted[p.second]);
        tally.add(first ? p.first : p.second, first ? p.second : p.first);
      }
    }
    const auto fit = bt::fit(tally, bt::FitConfig{}, false);
    recovered += bt::rank_from_scores(fit.scores) == bt::rank_from_values(planted);
  }

  // Two items: the unregularized MLE odds equal the empirical win ratio.
  auto rng = make_rng(sha256(std::string_view("acceptance/two-item")));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double p = 0.2 + 0.6 * uniform01(rng);
    bt::ComparisonTally t(2);
    double w0 = 0, w1 = 0;
    for (int k = 0; k < 200; ++k) {
      if (uniform01(rng) < p) {
        t.add(0, 1);
        ++w0;
      } else {
        t.add(1, 0);
        ++w1;
      }
    }
    bt::FitConfig cfg;
    cfg.l2_lambda = 0.0;
    const auto r = bt::fit(t, cfg, false);
    const double ratio = r.scores.scores()[0] / r.scores.scores()[1];
    worst = std::max(worst, std::abs(ratio - w0 / w1) / (w0 / w1));
  }
  return {recovered >= 95 && worst <= 1e-6,
          fmt("ranking recovered in %zu/100 trials (need >= 95); two-item odds max rel. error %.2e (need <= 1e-6)",
              recovered, worst)};
}

// 2. Analytic gradient against central differences.
Verdict gradient_check() {
  auto rng = make_rng(sha256(std::string_view("acceptance/gradient")));
  const std::size_t n = 12;
  bt::ComparisonTally tally(n);
  for (int k = 0; k < 200; ++k) {
    const auto a = static_cast<std::size_t>(uniform01(rng) * n);
    const auto b = static_cast<std::size_t>(uniform01(rng) * n);
    if (a != b) tally.add(a, b, 0.2 + uniform01(rng));
  }
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    std::vector<double> theta(n);
    for (auto& x : theta) x = 1.5 * standard_normal(rng);
    const bool weighted = point % 2 == 1;
    const auto g = bt::log_likelihood_gradient(tally, theta, weighted);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(theta[k]));
      auto up = theta, down = theta;
      up[k] += h;
      down[k] -= h;
      const double fd =
          (bt::log_likelihood(tally, up, weighted) - bt::log_likelihood(tally, down, weighted)) / (2.0 * h);
      diff += (g[k] - fd) * (g[k] - fd);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  return {worst < 1e-4, fmt("max relative error %.2e over 20 points (need < 1e-4)", worst)};
}

// 3. Pair-miss frequency of the scheduler against the closed form.
Verdict coverage() {
  const std::size_t n = 5, m = 5, per_judge = 3 * n;
  const int trials = 10000;
  int missed = 0, missed_excluding = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto state = Sha256().update("acceptance/coverage").update_u64(trial).finish();
    bool seen = false, seen_excluding = false;
    for (std::size_t j = 0; j < m; ++j) {
      const auto seed = scheduling::derive_seed(state, "judge-" + std::to_string(j));
      for (const auto& p : scheduling::sample_assignment(seed, n, {}, per_judge).pairs) {
        seen |= std::min(p.first, p.second) == 0 && std::max(p.first, p.second) == 1;
      }
      // Same judges, now each barred from its own response j.
      const std::size_t own[] = {j};
      for (const auto& p : scheduling::sample_assignment(seed, n, own, per_judge).pairs) {
        seen_excluding |= std::min(p.first, p.second) == 0 && std::max(p.first, p.second) == 1;
      }
    }
    missed += !seen;
    missed_excluding += !seen_excluding;
  }
  const auto prob = scheduling::pair_miss_probability(n, m, per_judge);
  const double freq = static_cast<double>(missed) / trials;
  const double se = std::sqrt(prob.exact * (1.0 - prob.exact) / trials);
  const double excl_exact = std::pow(1.0 - 1.0 / 6.0, static_cast<double>((m - 2) * per_judge));
  return {std::abs(freq - prob.exact) <= 3.0 * se,
          fmt("miss frequency %.3e vs exact %.3e (3 s.e. = %.2e); approximation exp(-6M/(N-1)) = %.3e; "
              "with self-exclusion %.3e vs %.3e",
              freq, prob.exact, 3.0 * se, prob.approximate, static_cast<double>(missed_excluding) / trials,
              excl_exact)};
}

sim::SwarmConfig sweep_template() {
  sim::SwarmConfig c;
  c.collusion_tracking = false;
  c.burn_in = 100;
  return c;
}

std::string csv(const std::vector<sim::SweepRow>& rows) {
  std::ostringstream out;
  sim::write_sweep_csv(out, rows);
  return out.str();
}

const sim::SweepRow& row(const std::vector<sim::SweepRow>& rows, double value, const std::string& selector) {
  for (const auto& r : rows) {
    if (r.param_value == value && r.selector == selector) return r;
  }
  throw std::runtime_error("missing sweep row");
}

// 4. Selector ordering at 30% Byzantine and a non-increasing weighted curve.
Verdict byzantine() {
  const std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto rows = sim::sweep_byzantine(sweep_template(), fractions, 500, 10);
  std::fputs(csv(rows).c_str(), stdout);
  const double w = row(rows, 0.3, "weighted").accuracy;
  const double u = row(rows, 0.3, "unweighted").accuracy;
  const double mj = row(rows, 0.3, "majority").accuracy;
  bool monotone = true;
  for (std::size_t k = 1; k < fractions.size(); ++k) {
    const auto& a = row(rows, fractions[k - 1], "weighted");
    const auto& b = row(rows, fractions[k], "weighted");
    if (b.accuracy > a.accuracy + std::max(a.stderr_, b.stderr_)) monotone = false;
  }
  return {w - u >= 0.03 && u - mj >= 0.03 && monotone,
          fmt("at 30%%: weighted %.4f, unweighted %.4f, majority %.4f (gaps %.4f, %.4f; need >= 0.03); "
              "weighted curve non-increasing within 1 s.e.: %s",
              w, u, mj, w - u, u - mj, monotone ? "yes" : "no")};
}

// 5. Saturating growth with swarm size, consensus never below majority.
Verdict swarm_size() {
  const std::vector<std::size_t> sizes{1, 3, 5, 7, 10, 15, 20, 25, 30, 35};
  const auto rows = sim::sweep_swarm_size(sweep_template(), sizes, 500, 10);
  std::fputs(csv(rows).c_str(), stdout);
  auto acc = [&](std::size_t n) { return row(rows, static_cast<double>(n), "consensus").accuracy; };
  bool increasing = true;
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    if (sizes[k] <= 15 && sizes[k - 1] >= 3 && !(acc(sizes[k]) > acc(sizes[k - 1]))) increasing = false;
  }
  bool dominates = true;
  for (auto n : sizes) {
    if (acc(n) < row(rows, static_cast<double>(n), "majority").accuracy) dominates = false;
  }
  const double early = acc(7) - acc(3), late = acc(35) - acc(25);
  return {increasing && late < early && dominates,
          fmt("strictly increasing 3..15: %s; gain 3->7 %.4f vs 25->35 %.4f; consensus >= majority everywhere: %s",
              increasing ? "yes" : "no", early, late, dominates ? "yes" : "no")};
}

// 6. Planted 4-clique in 20 nodes over 200 rounds, 10 seeds.
Verdict collusion() {
  int seeds_ok = 0;
  double worst_ratio = 0.0, worst_margin = 1.0, worst_honest = -1.0;
  std::vector<int> ok(10, 0);
  std::vector<double> ratios(10), margins(10), honest95(10);
  parallel_for(10, [&](std::size_t s) {
    sim::SwarmConfig c;
    c.n_nodes = 20;
    c.colluder_clique_sizes = {4};
    c.master_seed = sim::run_seed(2026, 4.0, s);
    auto run = [&](double lambda, double& revenue) {
      sim::SwarmConfig cfg = c;
      cfg.sybil.lambda = lambda;
      auto swarm = std::make_unique<sim::Swarm>(cfg);
      revenue = 0.0;
      for (std::size_t t = 0; t < 200; ++t) {
        const auto out = swarm->run_round(t);
        for (std::size_t r = 0; r < out.reward_share.size(); ++r) {
          if (swarm->profiles()[out.participants[r]].clique == 0) revenue += out.reward_share[r];
        }
      }
      return swarm;
    };
    double penalized = 0.0, free = 0.0;
    const auto swarm = run(15.0, penalized);
    run(0.0, free);

    const double tau = swarm->sybil_params().tau_collusion;
    const auto& profiles = swarm->profiles();
    double min_intra = 1.0;
    std::vector<double> honest;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      for (std::size_t j = 0; j < profiles.size(); ++j) {
        if (i == j) continue;
        const auto c_ij = swarm->tracker().support_rate(i, j).value_or(0.0);
        if (profiles[i].clique == 0 && profiles[j].clique == 0) min_intra = std::min(min_intra, c_ij);
        if (profiles[i].strategy == sim::Strategy::honest && profiles[j].strategy == sim::Strategy::honest) {
          honest.push_back(c_ij);
        }
      }
    }
    std::sort(honest.begin(), honest.end());
    const double p95 = honest[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(honest.size()))) - 1];
    ratios[s] = free > 0.0 ? penalized / free : 1.0;
    margins[s] = min_intra - tau;
    honest95[s] = p95 - tau;
    ok[s] = min_intra > tau && p95 < tau && ratios[s] < 0.5;
  });
  for (std::size_t s = 0; s < 10; ++s) {
    seeds_ok += ok[s];
    worst_ratio = std::max(worst_ratio, ratios[s]);
    worst_margin = std::min(worst_margin, margins[s]);
    worst_honest = std::max(worst_honest, honest95[s]);
  }
  return {seeds_ok == 10,
          fmt("%d/10 seeds; min intra-clique c - tau %+.4f; max honest p95 c - tau %+.2e; "
              "max revenue ratio vs lambda=0 %.4f (need < 0.5)",
              seeds_ok, worst_margin, worst_honest, worst_ratio)};
}

// 7. Every (k, lambda) cell of the break-even sweep loses money.
Verdict sybil_break_even() {
  const std::vector<std::size_t> ks{2, 3, 4, 5, 6};
  const std::vector<double> lambdas{12.0, 15.0, 20.0};
  sim::SwarmConfig swarm;
  swarm.n_nodes = 20;
  sybil::EconomicParams econ;  // entry 100 per identity, operation 0.01 per round
  const auto rows = sybil::sweep_sybil(ks, lambdas, 500, econ, sybil::SybilParams{}, swarm);
  std::ostringstream text;
  sybil::write_sybil_csv(text, rows);
  std::fputs(text.str().c_str(), stdout);
  double best = -1e300;
  bool all_negative = true;
  for (const auto& r : rows) {
    best = std::max(best, r.net);
    all_negative &= r.net < 0.0;
  }
  return {all_negative && rows.size() == 15,
          fmt("%zu cells, all net < 0: %s (largest net %.3f)", rows.size(), all_negative ? "yes" : "no", best)};
}

// 8. Reputation shapes from scripted signals with default parameters,
// sampled every 10 rounds.
struct Script {
  std::function<bool(std::size_t)> active;
  std::function<bool(std::size_t)> won;
  double agreement;
};

std::vector<double> trajectory(const Script& s, bool& slashed) {
  const reputation::ReputationParams p;
  auto state = reputation::ReputationState::initial(p);
  std::vector<double> out{state.combined};
  slashed = false;
  for (std::size_t t = 0; t < 100; ++t) {
    if (slashed) {
    } else if (!s.active(t)) {
      state = reputation::apply_round_transition(state, std::nullopt, p);
    } else {
      const bool won = s.won(t);
      state = reputation::update_ranking_ema(state, s.agreement, p);
      state = reputation::update_generation_ema(state, won, p);
      state = reputation::apply_round_transition(state, reputation::performance_signal(s.agreement, won), p);
    }
    if (!slashed) {
      const auto check = reputation::check_slash(state, p);
      state = check.state;
      slashed = check.slashed;
    }
    out.push_back(state.combined);
  }
  return out;
}

bool monotone(const std::vector<double>& v, int sign) {
  for (std::size_t t = 10; t < v.size(); t += 10) {
    if (sign * (v[t] - v[t - 10]) < 0.0) return false;
  }
  return sign * (v.back() - v.front()) > 0.0;
}

std::string checkpoints(const std::vector<double>& v) {
  std::string s;
  for (std::size_t t = 0; t < v.size(); t += 10) s += fmt(t ? " %.2f" : "%.2f", v[t]);
  return s;
}

Verdict reputation_shapes() {
  auto always = [](std::size_t) { return true; };
  auto four_in_five = [](std::size_t t) { return t % 5 != 4; };
  bool high_slashed, poor_slashed, recovery_slashed;
  const auto high = trajectory({always, four_in_five, 0.7}, high_slashed);
  const auto poor = trajectory({always, [](std::size_t t) { return t % 10 == 0; }, 0.3}, poor_slashed);
  const auto recovery = trajectory({[](std::size_t t) { return t >= 30; }, four_in_five, 0.7}, recovery_slashed);

  const auto min_it = std::min_element(recovery.begin(), recovery.end());
  const double rebound = recovery.back() - *min_it;
  const bool dips = *min_it < recovery.front();
  const bool pass = monotone(high, +1) && monotone(poor, -1) && dips && rebound >= 0.2 && !recovery_slashed;
  return {pass, fmt("high [%s] increasing: %s; poor [%s] decreasing: %s%s; recovery [%s] min %.3f at round %td, "
                    "rebound %.3f (need >= 0.2)",
                    checkpoints(high).c_str(), monotone(high, +1) ? "yes" : "no", checkpoints(poor).c_str(),
                    monotone(poor, -1) ? "yes" : "no", poor_slashed ? " (slashed)" : "", checkpoints(recovery).c_str(),
                    *min_it, min_it - recovery.begin(), rebound)};
}

// 9. Partition tiling, balance, depth and routing on random points.
Verdict mesh_invariants() {
  bool ok = true;
  std::string detail;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    auto rng = make_rng(Sha256().update("acceptance/mesh").update_u64(n).finish());
    std::vector<mesh::SemanticPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(16);
      for (auto& x : v) x = standard_normal(rng);
      pts.emplace_back("node-" + std::to_string(i), std::move(v));
    }
    mesh::PartitionParams params;
    params.beta_cap = 8;
    const auto tree = mesh::build_partition(std::move(pts), params);
    const auto& regions = tree.regions();

    std::vector<std::size_t> count(regions.size(), 0);
    std::vector<int> owner(n, 0);
    for (auto l : tree.leaves()) {
      count[l] = regions[l].points.size();
      for (auto p : regions[l].points) {
        ++owner[p];
        for (std::size_t k = 0; k < regions[l].bounds.size(); ++k) {
          const double x = tree.points()[p].vector()[k];
          if (x < regions[l].bounds[k].lo || x > regions[l].bounds[k].hi) ok = false;
        }
      }
    }
    bool tiles = std::all_of(owner.begin(), owner.end(), [](int c) { return c == 1; });
    bool balanced = true;
    for (std::size_t r = regions.size(); r-- > 0;) {
      if (regions[r].is_leaf()) continue;
      const auto& split = *regions[r].split;
      const auto& lo = regions[regions[r].left];
      const auto& hi = regions[regions[r].right];
      count[r] = count[regions[r].left] + count[regions[r].right];
      const auto a = count[regions[r].left], b = count[regions[r].right];
      if (std::max(a, b) - std::min(a, b) > 1) balanced = false;
      for (std::size_t k = 0; k < regions[r].bounds.size(); ++k) {
        const bool on_split = k == split.dim;
        if (lo.bounds[k].lo != regions[r].bounds[k].lo || hi.bounds[k].hi != regions[r].bounds[k].hi) tiles = false;
        if (on_split ? (lo.bounds[k].hi != split.median || hi.bounds[k].lo != split.median)
                     : (lo.bounds[k].hi != regions[r].bounds[k].hi || hi.bounds[k].lo != regions[r].bounds[k].lo)) {
          tiles = false;
        }
      }
    }
    const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n) / 8.0))) + 1;
    const bool shallow = tree.depth() <= bound;
    bool routes = true;
    for (std::size_t p = 0; p < n; ++p) {
      const auto& v = tree.points()[p].vector();
      const auto r = tree.route(v);
      if (r.steps != regions[r.region].id.depth()) routes = false;
      const auto& held = regions[r.region].points;
      bool on_plane = false;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] < regions[r.region].bounds[k].lo || v[k] > regions[r.region].bounds[k].hi) routes = false;
        on_plane |= v[k] == regions[r.region].bounds[k].lo;
      }
      if (std::find(held.begin(), held.end(), p) == held.end() && !on_plane) routes = false;
    }
    for (int q = 0; q < 1000; ++q) {
      std::vector<double> v(16);
      for (auto& x : v) x = 3.0 * standard_normal(rng);
      const auto r = tree.route(v);
      if (r.steps != regions[r.region].id.depth() || !regions[r.region].is_leaf()) routes = false;
    }
    ok &= tiles && balanced && shallow && routes;
    detail += fmt("n=%zu: %zu leaves, depth %zu (bound %zu)%s%s%s; ", n, tree.leaves().size(), tree.depth(), bound,
                  tiles ? "" : " NOT-TILED", balanced ? "" : " UNBALANCED", routes ? "" : " BAD-ROUTES");
  }
  return {ok, detail + "tiling, +-1 balance and leaf-depth routing checked"};
}

// 10. Sweeps are byte-identical across thread counts and re-runs.
Verdict determinism() {
  auto all_sweeps = [] {
    auto c = sweep_template();
    c.burn_in = 20;
    const std::vector<std::size_t> sizes{1, 3, 7, 12};
    const std::vector<double> fractions{0.0, 0.3, 0.5};
    std::string out = csv(sim::sweep_swarm_size(c, sizes, 40, 3));
    out += csv(sim::sweep_byzantine(c, fractions, 40, 3));
    sim::SwarmConfig s;
    s.n_nodes = 12;
    const std::vector<std::size_t> ks{2, 3};
    const std::vector<double> lambdas{0.0, 15.0};
    std::ostringstream text;
    sybil::write_sybil_csv(text, sybil::sweep_sybil(ks, lambdas, 60, sybil::EconomicParams{}, sybil::SybilParams{}, s));
    return out + text.str();
  };
  const int before = thread_limit();
  set_thread_limit(1);
  const auto one = all_sweeps();
  set_thread_limit(8);
  const auto eight = all_sweeps();
  const auto eight_again = all_sweeps();
  set_thread_limit(before);
  const bool same = one == eight && eight == eight_again;
  return {same, fmt("size, byzantine and sybil sweeps: %zu bytes, identical under 1 and 8 threads and on re-run: %s",
                    one.size(), same ? "yes" : "no")};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  apply_thread_limit_from_env();
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  const std::vector<Criterion> criteria{
      {1, "Bradley-Terry recovery", 10.0, bt_recovery},
      {2, "Gradient correctness", 1.0, gradient_check},
      {3, "Coverage formula", 30.0, coverage},
      {4, "Byzantine ordering", 300.0, byzantine},
      {5, "Swarm-size shape", 300.0, swarm_size},
      {6, "Collusion suppression", 180.0, collusion},
      {7, "Sybil break-even", 300.0, sybil_break_even},
      {8, "Reputation dynamics", 10.0, reputation_shapes},
      {9, "Mesh invariants", 10.0, mesh_invariants},
      {10, "Determinism", 0.0, determinism},
  };
  int failures = 0;
  std::vector<std::string> lines;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs < c.budget_seconds;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::string line = fmt("[%s] %2d %s: ", pass ? "PASS" : "FAIL", c.id, c.name) + v.detail;
    line += c.budget_seconds > 0.0 ? fmt(" (%.1f s, budget %.0f s%s)", secs, c.budget_seconds, in_time ? "" : ", OVER")
                                   : fmt(" (%.1f s)", secs);
    std::puts(line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
  }
  std::puts("---- summary ----");
  for (const auto& l : lines) std::puts(l.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ran) - failures, ran);
  return failures;
}
