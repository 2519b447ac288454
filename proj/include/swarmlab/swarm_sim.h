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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/bt_engine.h"
#include "swarmlab/hashing.h"
#include "swarmlab/reputation.h"
#include "swarmlab/semantic_mesh.h"
#include "swarmlab/sybil_guard.h"

namespace swarmlab::sim {

enum class Strategy { honest, byzantine_random, byzantine_adversarial, colluder };
enum class NoiseModel { logistic, gaussian };
enum class ByzantineMode { random, adversarial, mixed };

struct NodeProfile {
  std::string id;
  double gen_quality = 0.0;
  double judge_noise = 2.0;
  Strategy strategy = Strategy::honest;
  int clique = -1;  // colluder clique, -1 for none
  std::vector<mesh::SemanticPoint> embeddings;
  reputation::ReputationState reputation;
};

struct SwarmConfig {
  std::size_t n_nodes = 35;
  double byzantine_fraction = 0.0;
  ByzantineMode byzantine_mode = ByzantineMode::adversarial;
  std::vector<std::size_t> colluder_clique_sizes;
  std::size_t comparisons_per_judge = 0;  // 0: three per response

  // Response quality = gen_quality + N(0, response_quality_sd^2), with
  // gen_quality ~ N(quality_mean, node_quality_sd^2) per node.
  double quality_mean = 0.0;
  double node_quality_sd = 0.0;
  double response_quality_sd = 1.0;
  double colluder_quality_offset = 0.0;
  // A response at or above this quality counts as a solved query.
  double correct_threshold = 1.0;

  double judge_noise = 2.0;
  double judge_noise_sd = 0.0;
  NoiseModel noise_model = NoiseModel::logistic;

  std::size_t rounds = 500;
  std::size_t burn_in = 100;
  std::uint64_t master_seed = 42;
  double participation_rate = 1.0;

  // Ablations. With reputation weighting off every judge weighs 1 and no
  // node is slashed or penalized for collusion.
  bool reputation_weighting = true;
  bool collusion_tracking = true;
  bool single_judge = false;

  // Slashed nodes sit out requalify_rounds, then retake the capability test.
  std::size_t requalify_rounds = 20;
  std::size_t qualification_tests = 20;
  double qualification_accuracy = 0.9;
  double qualification_tau_fraction = 0.5;

  bt::FitConfig fit;
  bt::FitConfig implied_fit{1.0, 0.01, 200, 1e-4};
  reputation::ReputationParams reputation;
  sybil::SybilParams sybil;

  void validate() const;
};

// Builds the node population for a config; strategies are assigned to a
// seeded permutation of the nodes (byzantine first, then cliques).
std::vector<NodeProfile> make_profiles(const SwarmConfig& config);

struct ResponseView {
  double quality = 0.0;
  int author_clique = -1;
};

// Probability that `judge` prefers response a over b.
double preference_probability(const NodeProfile& judge, const ResponseView& a, const ResponseView& b,
                              NoiseModel model);

// True when the judge prefers a; coin is uniform on [0, 1).
bool judge_pair(const NodeProfile& judge, const ResponseView& a, const ResponseView& b, double coin,
                NoiseModel model = NoiseModel::logistic);

// One quality draw per participant, seeded by (round_seed, node id).
std::vector<double> generate_responses(std::span<const NodeProfile> profiles, std::span<const std::size_t> participants,
                                       const Digest& round_seed, double response_quality_sd);

Digest round_state_hash(std::uint64_t master_seed, std::size_t round);

// One judged comparison; response indices, judge as its own response index.
struct Comparison {
  std::size_t judge = 0;
  std::size_t winner = 0;
  std::size_t loser = 0;
  double weight = 1.0;
};

struct RoundOutcome {
  std::size_t round = 0;
  bool skipped = false;
  std::string diagnostic;

  std::vector<std::size_t> participants;  // node index of each response
  std::vector<double> response_qualities;
  bt::QualityScores fitted_scores;
  bt::FitDiagnostics fit;
  std::vector<Comparison> comparisons;

  std::size_t winner = 0;  // response index
  std::size_t majority_winner = 0;
  bool correct = false;  // winner holds the maximal true quality
  bool solved = false;   // winner clears correct_threshold
  bool majority_correct = false;
  bool majority_solved = false;

  double round_weight = 1.0;
  std::vector<std::optional<double>> per_judge_agreement;
  std::vector<double> reward_share;  // revenue-formula share per response, reward 1
  std::vector<std::size_t> slashed_nodes;
  std::vector<std::size_t> requalified_nodes;
};

enum class NodeStatus { active, requalifying };

class Swarm {
 public:
  explicit Swarm(SwarmConfig config);
  Swarm(SwarmConfig config, std::vector<NodeProfile> profiles);

  const SwarmConfig& config() const { return config_; }
  const std::vector<NodeProfile>& profiles() const { return profiles_; }
  const sybil::CollusionTracker& tracker() const { return tracker_; }
  const sybil::SybilParams& sybil_params() const { return sybil_; }
  NodeStatus status(std::size_t node) const { return status_[node]; }

  // Rounds must be run in increasing order; state carries over.
  RoundOutcome run_round(std::size_t round);

  // Support rate if the pair shared enough rounds to be acted on.
  std::optional<double> actionable_support(std::size_t i, std::size_t j) const;

 private:
  struct JudgeWork;

  void requalify(std::size_t round, const Digest& state_hash, RoundOutcome& out);
  std::vector<std::size_t> draw_participants(const Digest& state_hash) const;
  JudgeWork judge(std::size_t response_index, const Digest& state_hash, std::span<const std::size_t> participants,
                  std::span<const double> qualities, std::size_t per_judge) const;
  double penalty(std::size_t judge_node, std::size_t author_node) const;

  SwarmConfig config_;
  std::vector<NodeProfile> profiles_;
  std::vector<NodeStatus> status_;
  std::vector<std::size_t> requalify_left_;
  sybil::CollusionTracker tracker_;
  sybil::SybilParams sybil_;
  double participation_total_ = 0.0;
  std::size_t rounds_seen_ = 0;
};

struct SweepRow {
  double param_value = 0.0;
  std::string selector;
  std::size_t rounds = 0;
  double accuracy = 0.0;
  double stderr_ = 0.0;
};

// For each size: weighted consensus ("consensus") and plurality of judges'
// top picks ("majority"), read from the same runs. Accuracy is the solved
// rate over `rounds` measured rounds per seed after the config's burn_in.
std::vector<SweepRow> sweep_swarm_size(const SwarmConfig& config_template, std::span<const std::size_t> sizes,
                                       std::size_t rounds, std::size_t seeds);

// For each Byzantine fraction: reputation-weighted consensus ("weighted"),
// a run with weighting disabled ("unweighted") and plurality voting from
// that same run ("majority"). Only the weighted run needs the burn-in; the
// unweighted run measures the same round indices.
std::vector<SweepRow> sweep_byzantine(const SwarmConfig& config_template, std::span<const double> fractions,
                                      std::size_t rounds, std::size_t seeds);

// param_value,selector,rounds,accuracy,stderr
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// Per-run seed derived from the template seed, the swept value and the
// replicate index.
std::uint64_t run_seed(std::uint64_t master_seed, double param_value, std::size_t replicate);

}  // namespace swarmlab::sim
