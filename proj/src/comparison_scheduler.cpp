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

#include "swarmlab/comparison_scheduler.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "swarmlab/errors.h"

namespace swarmlab::scheduling {

namespace {

bool touches(const IndexPair& p, std::span<const std::size_t> own) {
  return std::find(own.begin(), own.end(), p.first) != own.end() ||
         std::find(own.begin(), own.end(), p.second) != own.end();
}

// Unranks k in [0, C(n,2)) to the pair (i, j), i < j, in row-major order.
IndexPair unrank_pair(std::uint64_t k, std::size_t n) {
  std::size_t i = 0;
  std::uint64_t row = n - 1;
  while (k >= row) {
    k -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<std::size_t>(k)};
}

std::size_t parse_index(std::string_view text, std::size_t position) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ParseError("expected a response index", position);
  return value;
}

}  // namespace

ComparisonSeed derive_seed(const Digest& state_hash, std::string_view node_id) {
  if (node_id.empty()) throw DomainError("derive_seed: node id must not be empty");
  ComparisonSeed seed;
  seed.state_hash = state_hash;
  seed.node_id = std::string(node_id);
  seed.derived_seed = Sha256().update(state_hash).update(node_id).finish();
  return seed;
}

void SeedStream::refill() {
  block_ = Sha256().update(seed_).update_u64(counter_++).finish();
  offset_ = 0;
}

std::uint64_t SeedStream::next_u64() {
  if (offset_ + 8 > block_.size()) refill();
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | block_[offset_ + i];
  offset_ += 8;
  return v;
}

std::uint64_t SeedStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("uniform_below: bound must be positive");
  // Largest multiple of bound that fits; values above it are redrawn.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    const auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

Assignment sample_assignment(const ComparisonSeed& seed, std::size_t n_responses,
                             std::span<const std::size_t> own_indices, std::size_t comparisons_per_judge) {
  if (n_responses < 2) throw DomainError("sample_assignment: need at least two responses");
  for (auto idx : own_indices) {
    if (idx >= n_responses) throw DomainError("sample_assignment: own index out of range");
  }
  std::vector<std::size_t> own(own_indices.begin(), own_indices.end());
  std::sort(own.begin(), own.end());
  own.erase(std::unique(own.begin(), own.end()), own.end());
  if (n_responses - own.size() < 2) {
    throw DomainError("sample_assignment: empty assignment, every pair touches the judge's own responses");
  }

  const std::uint64_t total_pairs = static_cast<std::uint64_t>(n_responses) * (n_responses - 1) / 2;
  SeedStream stream(seed.derived_seed);
  Assignment out;
  out.judge = seed.node_id;
  out.pairs.reserve(comparisons_per_judge);
  while (out.pairs.size() < comparisons_per_judge) {
    auto pair = unrank_pair(stream.uniform_below(total_pairs), n_responses);
    if (touches(pair, own)) continue;
    if (stream.next_u64() & 1u) std::swap(pair.first, pair.second);
    out.pairs.push_back(pair);
  }
  return out;
}

PairMissProbability pair_miss_probability(std::size_t n_responses, std::size_t n_judges,
                                          std::size_t comparisons_per_judge) {
  if (n_responses < 2) throw DomainError("pair_miss_probability: need at least two responses");
  if (n_judges < 1) throw DomainError("pair_miss_probability: need at least one judge");
  const double pairs = 0.5 * static_cast<double>(n_responses) * static_cast<double>(n_responses - 1);
  const double draws = static_cast<double>(n_judges) * static_cast<double>(comparisons_per_judge);
  PairMissProbability out;
  if (draws == 0.0) return out;
  out.exact = pairs == 1.0 ? 0.0 : std::exp(draws * std::log1p(-1.0 / pairs));
  out.approximate = std::exp(-draws / pairs);
  return out;
}

Verification verify_assignment(const Assignment& assignment, const ComparisonSeed& seed, std::size_t n_responses,
                               std::span<const std::size_t> own_indices) {
  for (const auto& p : assignment.pairs) {
    if (p.first == p.second || touches(p, own_indices)) return {Verdict::self_comparison};
  }
  if (assignment.judge != seed.node_id) return {Verdict::mismatch};
  try {
    const auto expected = sample_assignment(seed, n_responses, own_indices, assignment.count());
    if (expected.pairs != assignment.pairs) return {Verdict::mismatch};
  } catch (const DomainError&) {
    return {Verdict::mismatch};
  }
  return {Verdict::accepted};
}

std::string serialize_assignment(const Assignment& assignment) {
  std::string out = assignment.judge;
  for (const auto& p : assignment.pairs) {
    out += '\t';
    out += std::to_string(p.first);
    out += ',';
    out += std::to_string(p.second);
  }
  return out;
}

Assignment parse_assignment(std::string_view line) {
  Assignment out;
  std::size_t pos = 0;
  auto next_field = [&]() {
    const auto tab = line.find('\t', pos);
    const auto field = line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
    const auto start = pos;
    pos = tab == std::string_view::npos ? line.size() + 1 : tab + 1;
    return std::pair{field, start};
  };
  auto [judge, judge_pos] = next_field();
  if (judge.empty()) throw ParseError("missing judge id", judge_pos);
  out.judge = std::string(judge);
  while (pos <= line.size()) {
    auto [field, start] = next_field();
    const auto comma = field.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected i,j", start);
    out.pairs.push_back({parse_index(field.substr(0, comma), start), parse_index(field.substr(comma + 1), start + comma + 1)});
  }
  return out;
}

}  // namespace swarmlab::scheduling
