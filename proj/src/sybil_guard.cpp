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

#include "swarmlab/sybil_guard.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmlab/errors.h"

namespace swarmlab::sybil {

double expected_support(std::size_t n_participants) {
  if (n_participants < 2) throw DomainError("expected_support: need at least two participants");
  const double n = static_cast<double>(n_participants);
  return n / (2.0 * (n - 1.0));
}

SybilParams SybilParams::resolved(std::size_t n_participants) const {
  SybilParams out = *this;
  if (out.tau_collusion <= 0.0) out.tau_collusion = tau_factor * expected_support(std::max<std::size_t>(n_participants, 2));
  return out;
}

void SybilParams::validate(std::size_t n_participants) const {
  const auto r = resolved(n_participants);
  if (!(r.lambda >= 0.0)) throw DomainError("sybil.lambda must be >= 0");
  if (!(r.gamma > 0.0)) throw DomainError("sybil.gamma must be > 0");
  if (!(r.tau_collusion > expected_support(std::max<std::size_t>(n_participants, 2)))) {
    throw DomainError("sybil.tau_collusion must exceed the expected support rate N/(2(N-1))");
  }
}

CollusionTracker::CollusionTracker(std::size_t n_nodes)
    : n_(n_nodes), support_(n_nodes * n_nodes, 0), co_rounds_(n_nodes * n_nodes, 0) {}

void CollusionTracker::update(std::span<const std::size_t> participants, std::span<const JudgeSupport> supports) {
  for (const auto& s : supports) {
    if (s.judge >= n_) throw StructuralError("collusion tracker: judge index out of range");
    for (auto j : participants) {
      if (j >= n_) throw StructuralError("collusion tracker: participant index out of range");
      if (j != s.judge) ++co_rounds_[s.judge * n_ + j];
    }
    for (auto j : s.top_half) {
      if (j >= n_ || j == s.judge) throw StructuralError("collusion tracker: invalid top-half member");
      ++support_[s.judge * n_ + j];
    }
  }
}

std::optional<double> CollusionTracker::support_rate(std::size_t i, std::size_t j) const {
  const auto rounds = co_rounds(i, j);
  if (rounds == 0) return std::nullopt;
  return static_cast<double>(support_count(i, j)) / static_cast<double>(rounds);
}

double collusion_adjusted_weight(double base_weight, double c_ij, const SybilParams& params) {
  if (!(base_weight >= 0.0)) throw DomainError("collusion_adjusted_weight: base weight must be >= 0");
  return base_weight * std::exp(-params.lambda * std::max(0.0, c_ij - params.tau_collusion));
}

double round_weight(double n_actual, double n_bar, const SybilParams& params) {
  if (!(n_actual >= 1.0)) throw DomainError("round_weight: n_actual must be >= 1");
  if (!(n_bar > 0.0)) throw DomainError("round_weight: n_bar must be > 0");
  return std::exp(-params.gamma * std::abs(std::log(n_actual / n_bar)));
}

CapabilityResult capability_check(std::span<const TestResult> results, double tau) {
  double score = 0.0;
  for (const auto& r : results) {
    if (!(r.cost >= 0.0)) throw DomainError("capability_check: test cost must be >= 0");
    if (r.correct) score += r.cost;
  }
  return {score >= tau, score};
}

}  // namespace swarmlab::sybil
