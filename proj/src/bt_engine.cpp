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

#include "swarmlab/bt_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "swarmlab/errors.h"

namespace swarmlab::bt {

namespace {

// Largest coordinate move allowed in one step, in log-strength units. Keeps
// theta finite when the data are separable and lambda is zero.
constexpr double kMaxCoordinateStep = 10.0;

void recentre(std::vector<double>& theta) {
  if (theta.empty()) return;
  const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(theta.size());
  for (auto& t : theta) t -= mean;
}

double infinity_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class Objective {
 public:
  Objective(std::vector<Edge> edges, double lambda) : edges_(std::move(edges)), lambda_(lambda) {}

  double operator()(std::span<const double> theta, std::span<double> gradient) {
    double f = evaluate(edges_, theta, gradient, scratch_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      f -= lambda_ * theta[i] * theta[i];
      gradient[i] -= 2.0 * lambda_ * theta[i];
    }
    return f;
  }

  // Upper bound on the curvature of the negated objective.
  double lipschitz(std::size_t n) const {
    std::vector<double> degree(n, 0.0);
    for (const auto& e : edges_) {
      degree[e.i] += e.wins_i + e.wins_j;
      degree[e.j] += e.wins_i + e.wins_j;
    }
    const double max_degree = degree.empty() ? 0.0 : *std::max_element(degree.begin(), degree.end());
    return 0.5 * max_degree + 2.0 * lambda_;
  }

 private:
  std::vector<Edge> edges_;
  double lambda_;
  EdgeScratch scratch_;
};

std::string describe_components(const std::vector<std::vector<std::size_t>>& components) {
  std::ostringstream os;
  os << "comparison graph has " << components.size() << " disconnected components:";
  for (const auto& c : components) {
    os << " {";
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k];
    os << "}";
  }
  return os.str();
}

}  // namespace

QualityScores QualityScores::from_log_scores(std::vector<double> theta) {
  recentre(theta);
  QualityScores q;
  q.scores_.reserve(theta.size());
  for (double t : theta) q.scores_.push_back(std::exp(t));
  q.log_scores_ = std::move(theta);
  return q;
}

ComparisonTally::ComparisonTally(std::size_t n_items)
    : n_(n_items), wins_(n_items * n_items, 0.0), weighted_wins_(n_items * n_items, 0.0) {}

void ComparisonTally::add(std::size_t winner, std::size_t loser, double weight) {
  if (winner >= n_ || loser >= n_) throw StructuralError("comparison index out of range");
  if (winner == loser) throw StructuralError("self-pair comparison (" + std::to_string(winner) + ")");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw DomainError("comparison weight must be finite and >= 0");
  wins_[winner * n_ + loser] += 1.0;
  weighted_wins_[winner * n_ + loser] += weight;
  total_ += 1.0;
}

std::vector<Edge> ComparisonTally::edges(bool use_weights) const {
  const auto& w = use_weights ? weighted_wins_ : wins_;
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double wi = w[i * n_ + j];
      const double wj = w[j * n_ + i];
      if (wi + wj > 0.0) {
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), wi, wj});
      }
    }
  }
  return out;
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("fit.learning_rate must be > 0");
  if (!(l2_lambda >= 0.0)) throw DomainError("fit.l2_lambda must be >= 0");
  if (max_iters < 1) throw DomainError("fit.max_iters must be >= 1");
  if (!(tol > 0.0)) throw DomainError("fit.tol must be > 0");
}

double bt_probability(double pi_i, double pi_j) {
  if (!(pi_i > 0.0) || !(pi_j > 0.0)) throw DomainError("bt_probability: strengths must be positive");
  return pi_i / (pi_i + pi_j);
}

double log_likelihood(const ComparisonTally& tally, std::span<const double> theta, bool use_weights) {
  if (theta.size() != tally.size()) throw StructuralError("log_likelihood: dimension mismatch");
  std::vector<double> gradient(theta.size());
  EdgeScratch scratch;
  return evaluate(tally.edges(use_weights), theta, gradient, scratch);
}

double log_likelihood(const ComparisonTally& tally, const QualityScores& scores, bool use_weights) {
  return log_likelihood(tally, scores.log_scores(), use_weights);
}

std::vector<double> log_likelihood_gradient(const ComparisonTally& tally, std::span<const double> theta,
                                            bool use_weights) {
  if (theta.size() != tally.size()) throw StructuralError("log_likelihood_gradient: dimension mismatch");
  std::vector<double> gradient(theta.size());
  EdgeScratch scratch;
  evaluate(tally.edges(use_weights), theta, gradient, scratch);
  return gradient;
}

std::vector<std::vector<std::size_t>> comparison_components(const ComparisonTally& tally, bool use_weights) {
  const std::size_t n = tally.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : tally.edges(use_weights)) {
    const auto a = find(e.i);
    const auto b = find(e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] == n) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

FitResult fit(const ComparisonTally& tally, const FitConfig& config, bool use_weights) {
  config.validate();
  const std::size_t n = tally.size();
  auto edges = tally.edges(use_weights);
  if (edges.empty()) throw DomainError("fit: no comparisons");
  if (config.l2_lambda == 0.0) {
    auto components = comparison_components(tally, use_weights);
    if (components.size() > 1) throw NonIdentifiableError(describe_components(components));
  }

  Objective objective(std::move(edges), config.l2_lambda);
  std::vector<double> theta(n, 0.0), gradient(n), candidate(n), candidate_gradient(n);
  double f = objective(theta, gradient);
  double step = config.learning_rate / objective.lipschitz(n);

  FitDiagnostics diag;
  while (true) {
    diag.gradient_norm = infinity_norm(gradient);
    if (diag.gradient_norm < config.tol) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= config.max_iters) break;

    step = std::min(step, kMaxCoordinateStep / diag.gradient_norm);
    double fc = 0.0;
    bool accepted = false;
    while (step > std::numeric_limits<double>::min()) {
      for (std::size_t i = 0; i < n; ++i) candidate[i] = theta[i] + step * gradient[i];
      recentre(candidate);
      fc = objective(candidate, candidate_gradient);
      // Relative slack absorbs rounding once the objective is flat.
      if (std::isfinite(fc) && fc >= f - 1e-15 * std::abs(f)) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++diag.backtracks;
    }
    if (!accepted) break;

    // Barzilai-Borwein step for the next iteration; concavity gives s.y < 0.
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = candidate[i] - theta[i];
      ss += s * s;
      sy += s * (candidate_gradient[i] - gradient[i]);
    }
    theta.swap(candidate);
    gradient.swap(candidate_gradient);
    f = fc;
    ++diag.iterations;
    step = sy < 0.0 ? ss / -sy : 2.0 * step;
  }
  diag.objective = f;
  return {QualityScores::from_log_scores(std::move(theta)), diag};
}

std::vector<std::size_t> rank_from_values(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

std::vector<std::size_t> rank_from_scores(const QualityScores& scores) { return rank_from_values(scores.scores()); }

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructuralError("kendall_tau: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  double concordant = 0.0, discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) concordant += 1.0;
      else if (s < 0) discordant += 1.0;
    }
  }
  return (concordant - discordant) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace swarmlab::bt
