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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/bt_kernels.h"

namespace swarmlab::bt {

// Latent Bradley-Terry strengths. log_scores are gauge fixed to sum to zero.
class QualityScores {
 public:
  QualityScores() = default;
  // Recentres theta so that it sums to zero.
  static QualityScores from_log_scores(std::vector<double> theta);

  std::size_t size() const { return log_scores_.size(); }
  const std::vector<double>& log_scores() const { return log_scores_; }
  const std::vector<double>& scores() const { return scores_; }

 private:
  std::vector<double> log_scores_;
  std::vector<double> scores_;
};

// Pairwise outcome counts. wins(i, j) is how often i was preferred over j;
// the weighted matrices scale each comparison by its judge's weight.
class ComparisonTally {
 public:
  explicit ComparisonTally(std::size_t n_items = 0);

  std::size_t size() const { return n_; }
  void add(std::size_t winner, std::size_t loser, double weight = 1.0);

  double wins(std::size_t i, std::size_t j) const { return wins_[i * n_ + j]; }
  double count(std::size_t i, std::size_t j) const { return wins(i, j) + wins(j, i); }
  double weighted_wins(std::size_t i, std::size_t j) const { return weighted_wins_[i * n_ + j]; }
  double weighted_count(std::size_t i, std::size_t j) const {
    return weighted_wins(i, j) + weighted_wins(j, i);
  }
  double total_comparisons() const { return total_; }

  // Compared pairs in (i, j) lexicographic order, i < j.
  std::vector<Edge> edges(bool use_weights) const;

 private:
  std::size_t n_;
  std::vector<double> wins_;
  std::vector<double> weighted_wins_;
  double total_ = 0.0;
};

struct FitConfig {
  double learning_rate = 1.0;  // multiple of the Lipschitz-safe step
  double l2_lambda = 0.01;
  std::size_t max_iters = 10000;
  double tol = 1e-8;  // on the gradient infinity norm

  void validate() const;
};

struct FitDiagnostics {
  std::size_t iterations = 0;
  std::size_t backtracks = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;  // regularized log-likelihood at the returned point
  bool converged = false;
};

struct FitResult {
  QualityScores scores;
  FitDiagnostics diagnostics;
};

// P(i preferred over j) = pi_i / (pi_i + pi_j).
double bt_probability(double pi_i, double pi_j);

// Unregularized log-likelihood.
double log_likelihood(const ComparisonTally& tally, const QualityScores& scores, bool use_weights);
double log_likelihood(const ComparisonTally& tally, std::span<const double> theta, bool use_weights);

// Gradient of the unregularized log-likelihood with respect to theta.
std::vector<double> log_likelihood_gradient(const ComparisonTally& tally, std::span<const double> theta,
                                            bool use_weights);

// Maximizes log-likelihood - l2_lambda * |theta|^2 by gradient ascent.
// Throws NonIdentifiableError when l2_lambda == 0 and the comparison graph is
// disconnected, and DomainError when the tally holds no comparisons.
FitResult fit(const ComparisonTally& tally, const FitConfig& config, bool use_weights);

// Connected components of the comparison graph, each sorted, ordered by
// smallest member.
std::vector<std::vector<std::size_t>> comparison_components(const ComparisonTally& tally, bool use_weights);

// Indices by descending score, ties by ascending index.
std::vector<std::size_t> rank_from_scores(const QualityScores& scores);
std::vector<std::size_t> rank_from_values(std::span<const double> values);

// Kendall tau-a between two score vectors.
double kendall_tau(std::span<const double> a, std::span<const double> b);

}  // namespace swarmlab::bt
