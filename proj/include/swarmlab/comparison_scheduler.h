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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmlab/hashing.h"

namespace swarmlab::scheduling {

// derived_seed = SHA-256(state_hash || node_id).
struct ComparisonSeed {
  Digest state_hash{};
  std::string node_id;
  Digest derived_seed{};
};

ComparisonSeed derive_seed(const Digest& state_hash, std::string_view node_id);

// Counter-mode stream over the seed: block k = SHA-256(seed || k), k as a
// big-endian u64, consumed as four big-endian u64 words.
class SeedStream {
 public:
  explicit SeedStream(const Digest& seed) : seed_(seed) {}

  std::uint64_t next_u64();
  // Uniform on [0, bound) by rejection, bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  void refill();

  Digest seed_;
  Digest block_{};
  std::uint64_t counter_ = 0;
  std::size_t offset_ = 32;
};

// A pair in the order it is presented to the judge.
struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

struct Assignment {
  std::string judge;
  std::vector<IndexPair> pairs;

  std::size_t count() const { return pairs.size(); }
};

inline std::size_t default_comparisons_per_judge(std::size_t n_responses) { return 3 * n_responses; }

// Draws comparisons_per_judge pairs uniformly, with replacement, from the
// unordered pairs that do not touch own_indices. Self-touching draws are
// rejected and redrawn; a further coin from the same stream picks the
// presentation order.
Assignment sample_assignment(const ComparisonSeed& seed, std::size_t n_responses,
                             std::span<const std::size_t> own_indices, std::size_t comparisons_per_judge);

struct PairMissProbability {
  double exact = 1.0;        // (1 - 1/C(N,2))^(M * per_judge)
  double approximate = 1.0;  // exp(-M * per_judge / C(N,2)); exp(-6M/(N-1)) at 3N per judge
};

PairMissProbability pair_miss_probability(std::size_t n_responses, std::size_t n_judges,
                                          std::size_t comparisons_per_judge);

enum class Verdict { accepted, mismatch, self_comparison };

struct Verification {
  Verdict verdict = Verdict::accepted;
  bool ok() const { return verdict == Verdict::accepted; }
};

// Self-comparisons are reported ahead of any mismatch.
Verification verify_assignment(const Assignment& assignment, const ComparisonSeed& seed, std::size_t n_responses,
                               std::span<const std::size_t> own_indices);

// "judge_id<TAB>i,j<TAB>i,j ..."
std::string serialize_assignment(const Assignment& assignment);
Assignment parse_assignment(std::string_view line);

}  // namespace swarmlab::scheduling
