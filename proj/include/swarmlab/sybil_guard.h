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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace swarmlab::sybil {

// Baseline support rate under random rankings, N / (2 (N - 1)).
double expected_support(std::size_t n_participants);

struct SybilParams {
  double lambda = 15.0;          // penalty coefficient
  double gamma = 1.5;            // round-filter sensitivity
  double tau_factor = 1.2;       // tau_collusion = tau_factor * expected_support(N)
  double tau_collusion = 0.0;    // resolved threshold; 0 means derive from tau_factor
  std::size_t min_co_rounds = 20;  // support rates with fewer shared rounds are not acted on

  // Fills tau_collusion from tau_factor when unset.
  SybilParams resolved(std::size_t n_participants) const;
  void validate(std::size_t n_participants) const;
};

// One judge's top-half picks for a round, as node indices.
struct JudgeSupport {
  std::size_t judge = 0;
  std::vector<std::size_t> top_half;
};

// Mutual-support statistics c_ij = support_counts(i, j) / co_rounds(i, j).
class CollusionTracker {
 public:
  explicit CollusionTracker(std::size_t n_nodes = 0);

  std::size_t size() const { return n_; }

  // `participants` are the nodes whose responses were in the round. Every
  // judge's co_rounds is incremented against each other participant, and its
  // support count against each node in its top half.
  void update(std::span<const std::size_t> participants, std::span<const JudgeSupport> supports);

  std::uint32_t support_count(std::size_t i, std::size_t j) const { return support_[i * n_ + j]; }
  std::uint32_t co_rounds(std::size_t i, std::size_t j) const { return co_rounds_[i * n_ + j]; }

  // nullopt when i and j never shared a round.
  std::optional<double> support_rate(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  std::vector<std::uint32_t> support_;
  std::vector<std::uint32_t> co_rounds_;
};

// base_weight * exp(-lambda * max(0, c - tau_collusion)).
double collusion_adjusted_weight(double base_weight, double c_ij, const SybilParams& params);

// exp(-gamma * |log(n_actual / n_bar)|).
double round_weight(double n_actual, double n_bar, const SybilParams& params);

struct TestResult {
  bool correct = false;
  double cost = 0.0;
};

struct CapabilityResult {
  bool passed = false;
  double score = 0.0;
};

// Passes when the cost-weighted sum over correct answers reaches tau.
CapabilityResult capability_check(std::span<const TestResult> results, double tau);

}  // namespace swarmlab::sybil
