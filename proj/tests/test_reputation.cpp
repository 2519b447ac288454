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

#include <doctest.h>

#include <sstream>

#include "swarmlab/errors.h"
#include "swarmlab/hashing.h"
#include "swarmlab/random.h"
#include "swarmlab/reputation.h"

using namespace swarmlab;
using namespace swarmlab::reputation;

namespace {

const ReputationParams kDefaults{};

void check_identity(const ReputationState& s, const ReputationParams& p = kDefaults) {
  CHECK(s.combined == doctest::Approx(p.alpha * s.ranking + (1 - p.alpha) * s.generation).epsilon(1e-12));
}

}  // namespace

TEST_CASE("initial state") {
  const auto s = ReputationState::initial(kDefaults);
  CHECK(s.ranking == 0.5);
  CHECK(s.generation == 0.5);
  CHECK(s.combined == 0.5);
}

TEST_CASE("ranking EMA") {
  const auto s = ReputationState::initial(kDefaults);
  const bool agreements[] = {true, true, true, false};
  const auto next = update_ranking_ema(s, agreements, kDefaults);
  CHECK(next.ranking == doctest::Approx(0.9 * 0.5 + 0.1 * 0.75));
  CHECK(next.generation == 0.5);
  check_identity(next);

  CHECK(update_ranking_ema(s, std::span<const bool>{}, kDefaults).ranking == s.ranking);

  const auto half = update_ranking_ema(s, 1.0, kDefaults, 0.5);
  CHECK(half.ranking == doctest::Approx(0.95 * 0.5 + 0.05 * 1.0));
}

TEST_CASE("generation EMA") {
  const auto s = ReputationState::initial(kDefaults);
  CHECK(update_generation_ema(s, true, kDefaults).generation == doctest::Approx(0.55));
  CHECK(update_generation_ema(s, false, kDefaults).generation == doctest::Approx(0.45));
}

TEST_CASE("EMA converges geometrically to a constant signal") {
  auto s = ReputationState::initial(kDefaults);
  for (int t = 1; t <= 30; ++t) {
    s = update_ranking_ema(s, 1.0, kDefaults);
    CHECK(1.0 - s.ranking == doctest::Approx(0.5 * std::pow(0.9, t)).epsilon(1e-9));
  }
}

TEST_CASE("piecewise transition") {
  const auto s = with_channels(0.5, 0.5, kDefaults);
  CHECK(apply_round_transition(s, 0.9, kDefaults).combined == doctest::Approx(0.52));
  CHECK(apply_round_transition(s, 0.1, kDefaults).combined == doctest::Approx(0.47));
  CHECK(apply_round_transition(s, 0.5, kDefaults).combined == 0.5);
  CHECK(apply_round_transition(s, std::nullopt, kDefaults).combined == doctest::Approx(0.5 * 0.995));

  const auto top = with_channels(0.995, 0.995, kDefaults);
  CHECK(apply_round_transition(top, 2.0, kDefaults).combined == doctest::Approx(1.0));
  const auto bottom = with_channels(0.01, 0.01, kDefaults);
  CHECK(apply_round_transition(bottom, 0.0, kDefaults).combined == doctest::Approx(0.0));
}

TEST_CASE("combined identity and bounds hold under random update sequences") {
  auto rng = make_rng(sha256(std::string_view("rep-property")));
  for (int run = 0; run < 50; ++run) {
    ReputationParams p;
    p.alpha = uniform01(rng);
    auto s = ReputationState::initial(p);
    for (int t = 0; t < 200; ++t) {
      const double u = uniform01(rng);
      s = update_ranking_ema(s, uniform01(rng), p, uniform01(rng));
      s = update_generation_ema(s, u < 0.3, p);
      s = apply_round_transition(s, u < 0.1 ? std::optional<double>{} : std::optional<double>{2 * uniform01(rng)}, p);
      check_identity(s, p);
      REQUIRE(s.combined >= p.r_min - 1e-12);
      REQUIRE(s.combined <= p.r_max + 1e-12);
      REQUIRE(s.ranking >= -1e-12);
      REQUIRE(s.ranking <= 1 + 1e-12);
      REQUIRE(s.generation >= -1e-12);
      REQUIRE(s.generation <= 1 + 1e-12);
    }
  }
}

TEST_CASE("slashing uses a strict threshold") {
  const auto low = with_channels(0.05, 0.05, kDefaults);
  const auto out = check_slash(low, kDefaults);
  CHECK(out.slashed);
  CHECK(out.state.combined == 0.0);
  CHECK(out.state.ranking == 0.0);
  CHECK(out.state.generation == 0.0);

  const auto at = with_channels(0.1, 0.1, kDefaults);
  CHECK_FALSE(check_slash(at, kDefaults).slashed);
}

TEST_CASE("parameter validation") {
  ReputationParams p;
  p.beta = 1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.r_min = 0.8;
  p.r_max = 0.2;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_NOTHROW(ReputationParams{}.validate());
}

TEST_CASE("reputation commitment matches a reference encoding") {
  const NodeRoundRecord history[] = {{0, true, 0.75, 0.52, false}, {1, false, 0.25, 0.49, true}};
  CHECK(to_hex(reputation_commitment(history, "pk-node-0")) ==
        "b3eb81040c277bdcccb2aba77633832c03d6c3de997292554c56175dfac7f4d2");
}

TEST_CASE("commitment changes with any field") {
  NodeRoundRecord h[] = {{3, true, 0.5, 0.6, false}};
  const auto base = reputation_commitment(h, "pk");
  auto flip = h[0];
  flip.won = false;
  CHECK(reputation_commitment(std::span(&flip, 1), "pk") != base);
  flip = h[0];
  flip.combined = std::nextafter(0.6, 1.0);
  CHECK(reputation_commitment(std::span(&flip, 1), "pk") != base);
  CHECK(reputation_commitment(h, "pk2") != base);
  CHECK(reputation_commitment(h, "pk") == base);
}

TEST_CASE("trajectory CSV") {
  const TrajectoryRow rows[] = {{0, "node-0", with_channels(0.5, 0.5, kDefaults), false},
                                {1, "node-0", with_channels(0.0, 0.0, kDefaults), true}};
  std::ostringstream out;
  write_trajectory_csv(out, rows);
  CHECK(out.str() == "round,node_id,ranking,generation,combined,slashed\n0,node-0,0.5,0.5,0.5,0\n1,node-0,0,0,0,1\n");
}
