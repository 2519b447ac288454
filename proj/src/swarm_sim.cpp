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

#include "swarmlab/swarm_sim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "swarmlab/comparison_scheduler.h"
#include "swarmlab/errors.h"
#include "swarmlab/parallel.h"
#include "swarmlab/random.h"
#include "swarmlab/text.h"

namespace swarmlab::sim {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double honest_preference(double noise, double qa, double qb, NoiseModel model) {
  if (noise == 0.0) return qa > qb ? 1.0 : (qa < qb ? 0.0 : 0.5);
  const double z = (qa - qb) / noise;
  return model == NoiseModel::logistic ? logistic(z) : normal_cdf(z);
}

std::size_t argmax_first(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

void SwarmConfig::validate() const {
  if (n_nodes < 1) throw DomainError("swarm.n_nodes must be >= 1");
  if (!(byzantine_fraction >= 0.0 && byzantine_fraction <= 1.0)) {
    throw DomainError("swarm.byzantine_fraction must lie in [0, 1]");
  }
  std::size_t colluders = 0;
  for (auto k : colluder_clique_sizes) {
    if (k < 1) throw DomainError("swarm.colluder_clique_sizes entries must be >= 1");
    colluders += k;
  }
  const auto byz = static_cast<std::size_t>(std::llround(byzantine_fraction * static_cast<double>(n_nodes)));
  if (byz + colluders > n_nodes) throw DomainError("swarm: more byzantine and colluding nodes than nodes");
  if (!(response_quality_sd >= 0.0) || !(node_quality_sd >= 0.0)) {
    throw DomainError("swarm quality standard deviations must be >= 0");
  }
  if (!(judge_noise >= 0.0)) throw DomainError("swarm.judge_noise must be >= 0");
  if (!(judge_noise_sd >= 0.0)) throw DomainError("swarm.judge_noise_sd must be >= 0");
  if (!(participation_rate > 0.0 && participation_rate <= 1.0)) {
    throw DomainError("swarm.participation_rate must lie in (0, 1]");
  }
  if (!(qualification_accuracy >= 0.0 && qualification_accuracy <= 1.0)) {
    throw DomainError("swarm.qualification_accuracy must lie in [0, 1]");
  }
  if (!(qualification_tau_fraction >= 0.0 && qualification_tau_fraction <= 1.0)) {
    throw DomainError("swarm.qualification_tau_fraction must lie in [0, 1]");
  }
  if (requalify_rounds < 1) throw DomainError("swarm.requalify_rounds must be >= 1");
  fit.validate();
  implied_fit.validate();
  reputation.validate();
  sybil.validate(n_nodes);
}

std::vector<NodeProfile> make_profiles(const SwarmConfig& config) {
  auto rng = make_rng(Sha256().update("swarmlab/profiles").update_u64(config.master_seed).finish());
  std::vector<NodeProfile> out(config.n_nodes);
  for (std::size_t i = 0; i < config.n_nodes; ++i) {
    auto& p = out[i];
    p.id = "node-" + std::to_string(i);
    p.gen_quality = config.quality_mean + config.node_quality_sd * standard_normal(rng);
    p.judge_noise = std::max(0.0, config.judge_noise + config.judge_noise_sd * standard_normal(rng));
    p.reputation = reputation::ReputationState::initial(config.reputation);
  }

  std::vector<std::size_t> order(config.n_nodes);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }

  const auto byz = static_cast<std::size_t>(std::llround(config.byzantine_fraction * static_cast<double>(config.n_nodes)));
  std::size_t at = 0;
  for (std::size_t b = 0; b < byz; ++b, ++at) {
    auto& p = out[order[at]];
    switch (config.byzantine_mode) {
      case ByzantineMode::random: p.strategy = Strategy::byzantine_random; break;
      case ByzantineMode::adversarial: p.strategy = Strategy::byzantine_adversarial; break;
      case ByzantineMode::mixed:
        p.strategy = b % 2 == 0 ? Strategy::byzantine_adversarial : Strategy::byzantine_random;
        break;
    }
  }
  for (std::size_t c = 0; c < config.colluder_clique_sizes.size(); ++c) {
    for (std::size_t k = 0; k < config.colluder_clique_sizes[c]; ++k, ++at) {
      auto& p = out[order[at]];
      p.strategy = Strategy::colluder;
      p.clique = static_cast<int>(c);
      p.gen_quality += config.colluder_quality_offset;
    }
  }
  return out;
}

double preference_probability(const NodeProfile& judge, const ResponseView& a, const ResponseView& b,
                              NoiseModel model) {
  switch (judge.strategy) {
    case Strategy::honest:
      return honest_preference(judge.judge_noise, a.quality, b.quality, model);
    case Strategy::byzantine_random:
      return 0.5;
    case Strategy::byzantine_adversarial:
      return 1.0 - honest_preference(judge.judge_noise, a.quality, b.quality, model);
    case Strategy::colluder: {
      const bool a_in = a.author_clique == judge.clique;
      const bool b_in = b.author_clique == judge.clique;
      if (a_in && !b_in) return 1.0;
      if (b_in && !a_in) return 0.0;
      return honest_preference(judge.judge_noise, a.quality, b.quality, model);
    }
  }
  return 0.5;
}

bool judge_pair(const NodeProfile& judge, const ResponseView& a, const ResponseView& b, double coin,
                NoiseModel model) {
  return coin < preference_probability(judge, a, b, model);
}

std::vector<double> generate_responses(std::span<const NodeProfile> profiles, std::span<const std::size_t> participants,
                                       const Digest& round_seed, double response_quality_sd) {
  std::vector<double> out;
  out.reserve(participants.size());
  for (auto node : participants) {
    const auto& p = profiles[node];
    auto rng = make_rng(Sha256().update(round_seed).update("response").update(p.id).finish());
    out.push_back(p.gen_quality + response_quality_sd * standard_normal(rng));
  }
  return out;
}

Digest round_state_hash(std::uint64_t master_seed, std::size_t round) {
  return Sha256().update("swarmlab/round").update_u64(master_seed).update_u64(round).finish();
}

struct Swarm::JudgeWork {
  std::vector<Comparison> comparisons;
  std::size_t agree = 0;
  std::size_t top_pick = 0;
  std::vector<std::size_t> top_half;  // node indices
};

Swarm::Swarm(SwarmConfig config) : Swarm(config, make_profiles(config)) {}

Swarm::Swarm(SwarmConfig config, std::vector<NodeProfile> profiles)
    : config_(std::move(config)),
      profiles_(std::move(profiles)),
      status_(profiles_.size(), NodeStatus::active),
      requalify_left_(profiles_.size(), 0),
      tracker_(profiles_.size()) {
  if (profiles_.size() != config_.n_nodes) throw StructuralError("swarm: one profile per node");
  config_.validate();
  sybil_ = config_.sybil.resolved(config_.n_nodes);
}

std::optional<double> Swarm::actionable_support(std::size_t i, std::size_t j) const {
  if (tracker_.co_rounds(i, j) < sybil_.min_co_rounds) return std::nullopt;
  return tracker_.support_rate(i, j);
}

double Swarm::penalty(std::size_t judge_node, std::size_t author_node) const {
  if (judge_node == author_node) return 1.0;
  const auto c = actionable_support(judge_node, author_node);
  return c ? std::exp(-sybil_.lambda * std::max(0.0, *c - sybil_.tau_collusion)) : 1.0;
}

void Swarm::requalify(std::size_t round, const Digest& state_hash, RoundOutcome& out) {
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    if (status_[i] != NodeStatus::requalifying) continue;
    if (--requalify_left_[i] > 0) continue;
    auto rng = make_rng(Sha256().update(state_hash).update("qualify").update(profiles_[i].id).finish());
    std::vector<sybil::TestResult> tests(config_.qualification_tests);
    double total = 0.0;
    for (std::size_t k = 0; k < tests.size(); ++k) {
      tests[k].cost = 1.0 + static_cast<double>(k % 3);
      tests[k].correct = uniform01(rng) < config_.qualification_accuracy;
      total += tests[k].cost;
    }
    if (sybil::capability_check(tests, config_.qualification_tau_fraction * total).passed) {
      status_[i] = NodeStatus::active;
      profiles_[i].reputation = reputation::ReputationState::initial(config_.reputation);
      profiles_[i].reputation.last_active_round = static_cast<std::int64_t>(round);
      out.requalified_nodes.push_back(i);
    } else {
      requalify_left_[i] = config_.requalify_rounds;
    }
  }
}

std::vector<std::size_t> Swarm::draw_participants(const Digest& state_hash) const {
  std::vector<std::size_t> out;
  auto rng = make_rng(Sha256().update(state_hash).update("participation").finish());
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    const bool present = config_.participation_rate >= 1.0 || uniform01(rng) < config_.participation_rate;
    if (present && status_[i] == NodeStatus::active) out.push_back(i);
  }
  return out;
}

Swarm::JudgeWork Swarm::judge(std::size_t r, const Digest& state_hash, std::span<const std::size_t> participants,
                              std::span<const double> qualities, std::size_t per_judge) const {
  const std::size_t n = participants.size();
  const auto& judge_profile = profiles_[participants[r]];
  const auto seed = scheduling::derive_seed(state_hash, judge_profile.id);
  const std::size_t own[] = {r};
  const auto assignment = scheduling::sample_assignment(seed, n, own, per_judge);
  if (scheduling::verify_assignment(assignment, seed, n, own).verdict != scheduling::Verdict::accepted) {
    throw StructuralError("swarm: judge assignment failed verification");
  }

  auto coins = make_rng(Sha256().update(seed.derived_seed).update("judge-coins").finish());
  JudgeWork work;
  work.comparisons.reserve(assignment.count());
  std::vector<double> wins(n, 0.0);
  for (const auto& pair : assignment.pairs) {
    const ResponseView a{qualities[pair.first], profiles_[participants[pair.first]].clique};
    const ResponseView b{qualities[pair.second], profiles_[participants[pair.second]].clique};
    const bool first = judge_pair(judge_profile, a, b, uniform01(coins), config_.noise_model);
    const auto winner = first ? pair.first : pair.second;
    const auto loser = first ? pair.second : pair.first;
    work.comparisons.push_back({r, winner, loser, 1.0});
    wins[winner] += 1.0;
    if (qualities[winner] > qualities[loser]) ++work.agree;
  }
  work.top_pick = argmax_first(wins);

  if (config_.reputation_weighting && config_.collusion_tracking) {
    bt::ComparisonTally own_tally(n);
    for (const auto& c : work.comparisons) own_tally.add(c.winner, c.loser);
    const auto implied = bt::fit(own_tally, config_.implied_fit, false);
    const std::size_t half = (n + 1) / 2;
    for (auto idx : bt::rank_from_scores(implied.scores)) {
      if (idx == r) continue;
      if (work.top_half.size() == half) break;
      work.top_half.push_back(participants[idx]);
    }
  }
  return work;
}

RoundOutcome Swarm::run_round(std::size_t round) {
  const auto state_hash = round_state_hash(config_.master_seed, round);
  RoundOutcome out;
  out.round = round;
  requalify(round, state_hash, out);

  out.participants = draw_participants(state_hash);
  const auto& participants = out.participants;
  const std::size_t n = participants.size();
  const auto& rp = config_.reputation;

  auto decay_absent = [&] {
    std::vector<bool> present(profiles_.size(), false);
    for (auto i : participants) present[i] = true;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      if (!present[i] && status_[i] == NodeStatus::active) {
        profiles_[i].reputation = reputation::apply_round_transition(profiles_[i].reputation, std::nullopt, rp);
      }
    }
  };

  out.response_qualities = generate_responses(profiles_, participants, state_hash, config_.response_quality_sd);
  if (n < 3) {
    out.skipped = true;
    if (n == 0) {
      out.diagnostic = "no participants";
    } else {
      out.diagnostic = n == 1 ? "single response" : "two responses leave no pair for either judge";
      // No judge has a pair to compare; the first response stands.
      out.winner = out.majority_winner = 0;
      out.correct = out.majority_correct = argmax_first(out.response_qualities) == 0;
      out.solved = out.majority_solved = out.response_qualities[out.winner] >= config_.correct_threshold;
    }
    decay_absent();
    return out;
  }

  const double n_actual = static_cast<double>(n);
  const double n_bar = rounds_seen_ == 0 ? n_actual : participation_total_ / static_cast<double>(rounds_seen_);
  out.round_weight = sybil::round_weight(n_actual, n_bar, sybil_);
  participation_total_ += n_actual;
  ++rounds_seen_;

  const std::size_t per_judge =
      config_.comparisons_per_judge > 0 ? config_.comparisons_per_judge : scheduling::default_comparisons_per_judge(n);
  const std::size_t n_judges = config_.single_judge ? 1 : n;
  std::vector<JudgeWork> work(n_judges);
  parallel_for(n_judges, [&](std::size_t r) {
    work[r] = judge(r, state_hash, participants, out.response_qualities, per_judge);
  });

  const bool weighting = config_.reputation_weighting;
  bt::ComparisonTally tally(n);
  for (auto& w : work) {
    for (auto& c : w.comparisons) {
      if (weighting) {
        const auto judge_node = participants[c.judge];
        c.weight = profiles_[judge_node].reputation.combined *
                   std::min(penalty(judge_node, participants[c.winner]), penalty(judge_node, participants[c.loser]));
      }
      tally.add(c.winner, c.loser, c.weight);
      out.comparisons.push_back(c);
    }
  }
  bool use_weights = weighting && !tally.edges(true).empty();
  if (use_weights) {
    double total_weight = 0.0;
    for (const auto& c : out.comparisons) total_weight += c.weight;
    use_weights = total_weight > 0.0;
  }
  auto fitted = bt::fit(tally, config_.fit, use_weights);
  out.fit = fitted.diagnostics;
  out.fitted_scores = std::move(fitted.scores);

  const auto best = argmax_first(out.response_qualities);
  out.winner = bt::rank_from_scores(out.fitted_scores).front();
  std::vector<double> votes(n, 0.0);
  for (const auto& w : work) votes[w.top_pick] += 1.0;
  out.majority_winner = argmax_first(votes);
  out.correct = out.winner == best;
  out.majority_correct = out.majority_winner == best;
  out.solved = out.response_qualities[out.winner] >= config_.correct_threshold;
  out.majority_solved = out.response_qualities[out.majority_winner] >= config_.correct_threshold;

  // Revenue shares use start-of-round reputation and support rates.
  out.reward_share.assign(n, 0.0);
  double total_rep = 0.0;
  for (auto node : participants) total_rep += profiles_[node].reputation.combined;
  if (total_rep > 0.0) {
    for (std::size_t r = 0; r < n; ++r) {
      double factor = profiles_[participants[r]].reputation.combined / total_rep;
      for (std::size_t s = 0; s < n && factor > 0.0; ++s) {
        if (s != r) factor *= penalty(participants[r], participants[s]);
      }
      out.reward_share[r] = factor * out.round_weight;
    }
  }

  out.per_judge_agreement.assign(n, std::nullopt);
  for (std::size_t r = 0; r < n_judges; ++r) {
    if (!work[r].comparisons.empty()) {
      out.per_judge_agreement[r] =
          static_cast<double>(work[r].agree) / static_cast<double>(work[r].comparisons.size());
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    const auto node = participants[r];
    auto& state = profiles_[node].reputation;
    const bool won = r == out.winner;
    const auto agreement = out.per_judge_agreement[r];
    if (agreement) state = reputation::update_ranking_ema(state, *agreement, rp, out.round_weight);
    state = reputation::update_generation_ema(state, won, rp, out.round_weight);
    const double perf = reputation::performance_signal(agreement.value_or(state.ranking), won);
    state = reputation::apply_round_transition(state, perf, rp);
    state.last_active_round = static_cast<std::int64_t>(round);
    if (weighting) {
      auto slash = reputation::check_slash(state, rp);
      if (slash.slashed) {
        state = slash.state;
        status_[node] = NodeStatus::requalifying;
        requalify_left_[node] = config_.requalify_rounds;
        out.slashed_nodes.push_back(node);
      }
    }
  }
  decay_absent();

  if (weighting && config_.collusion_tracking) {
    std::vector<sybil::JudgeSupport> supports;
    supports.reserve(n_judges);
    for (std::size_t r = 0; r < n_judges; ++r) supports.push_back({participants[r], std::move(work[r].top_half)});
    tracker_.update(participants, supports);
  }
  return out;
}

std::uint64_t run_seed(std::uint64_t master_seed, double param_value, std::size_t replicate) {
  return digest_prefix_u64(
      Sha256().update("swarmlab/run").update_u64(master_seed).update_f64(param_value).update_u64(replicate).finish());
}

namespace {

struct Tally {
  std::size_t rounds = 0;
  std::size_t hits = 0;
};

SweepRow summarize(double value, std::string selector, const std::vector<Tally>& per_seed) {
  SweepRow row;
  row.param_value = value;
  row.selector = std::move(selector);
  std::size_t hits = 0;
  std::vector<double> acc;
  for (const auto& t : per_seed) {
    row.rounds += t.rounds;
    hits += t.hits;
    if (t.rounds > 0) acc.push_back(static_cast<double>(t.hits) / static_cast<double>(t.rounds));
  }
  if (row.rounds == 0) return row;
  row.accuracy = static_cast<double>(hits) / static_cast<double>(row.rounds);
  if (acc.size() > 1) {
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    row.stderr_ = std::sqrt(ss / static_cast<double>(acc.size() - 1) / static_cast<double>(acc.size()));
  } else {
    row.stderr_ = std::sqrt(row.accuracy * (1.0 - row.accuracy) / static_cast<double>(row.rounds));
  }
  return row;
}

// Runs rounds [first, first + count) and tallies solved rates for the
// consensus and plurality selectors.
std::pair<Tally, Tally> measure(Swarm& swarm, std::size_t warmup, std::size_t first, std::size_t count) {
  for (std::size_t t = warmup; t < first; ++t) swarm.run_round(t);
  Tally consensus, majority;
  for (std::size_t t = first; t < first + count; ++t) {
    const auto out = swarm.run_round(t);
    if (out.participants.empty()) continue;
    ++consensus.rounds;
    ++majority.rounds;
    consensus.hits += out.solved ? 1 : 0;
    majority.hits += out.majority_solved ? 1 : 0;
  }
  return {consensus, majority};
}

}  // namespace

std::vector<SweepRow> sweep_swarm_size(const SwarmConfig& config_template, std::span<const std::size_t> sizes,
                                       std::size_t rounds, std::size_t seeds) {
  if (seeds < 1) throw DomainError("sweep: seeds must be >= 1");
  for (auto n : sizes) {
    SwarmConfig probe = config_template;
    probe.n_nodes = n;
    probe.validate();
  }
  const std::size_t tasks = sizes.size() * seeds;
  std::vector<std::pair<Tally, Tally>> results(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const auto size_index = task / seeds;
    SwarmConfig cfg = config_template;
    cfg.n_nodes = sizes[size_index];
    cfg.master_seed = run_seed(config_template.master_seed, static_cast<double>(cfg.n_nodes), task % seeds);
    Swarm swarm(cfg);
    results[task] = measure(swarm, 0, cfg.burn_in, rounds);
  });

  std::vector<SweepRow> rows;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::vector<Tally> consensus, majority;
    for (std::size_t k = 0; k < seeds; ++k) {
      consensus.push_back(results[s * seeds + k].first);
      majority.push_back(results[s * seeds + k].second);
    }
    rows.push_back(summarize(static_cast<double>(sizes[s]), "consensus", consensus));
    rows.push_back(summarize(static_cast<double>(sizes[s]), "majority", majority));
  }
  return rows;
}

std::vector<SweepRow> sweep_byzantine(const SwarmConfig& config_template, std::span<const double> fractions,
                                      std::size_t rounds, std::size_t seeds) {
  if (seeds < 1) throw DomainError("sweep: seeds must be >= 1");
  for (double f : fractions) {
    SwarmConfig probe = config_template;
    probe.byzantine_fraction = f;
    probe.validate();
  }
  // Two tasks per (fraction, seed): the weighted run and the unweighted one.
  const std::size_t tasks = fractions.size() * seeds * 2;
  std::vector<std::pair<Tally, Tally>> results(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const auto pair_index = task / 2;
    const bool weighted = task % 2 == 0;
    SwarmConfig cfg = config_template;
    cfg.byzantine_fraction = fractions[pair_index / seeds];
    cfg.master_seed = run_seed(config_template.master_seed, cfg.byzantine_fraction, pair_index % seeds);
    cfg.reputation_weighting = weighted;
    Swarm swarm(cfg);
    results[task] = measure(swarm, weighted ? 0 : cfg.burn_in, cfg.burn_in, rounds);
  });

  std::vector<SweepRow> rows;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::vector<Tally> weighted, unweighted, majority;
    for (std::size_t k = 0; k < seeds; ++k) {
      const auto base = (f * seeds + k) * 2;
      weighted.push_back(results[base].first);
      unweighted.push_back(results[base + 1].first);
      majority.push_back(results[base + 1].second);
    }
    rows.push_back(summarize(fractions[f], "weighted", weighted));
    rows.push_back(summarize(fractions[f], "unweighted", unweighted));
    rows.push_back(summarize(fractions[f], "majority", majority));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param_value,selector,rounds,accuracy,stderr\n";
  for (const auto& r : rows) {
    out << format_double(r.param_value) << ',' << r.selector << ',' << r.rounds << ',' << format_double(r.accuracy)
        << ',' << format_double(r.stderr_) << '\n';
  }
}

}  // namespace swarmlab::sim
