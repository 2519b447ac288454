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

#include "swarmlab/experiment.h"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "swarmlab/errors.h"
#include "swarmlab/hashing.h"
#include "swarmlab/random.h"
#include "swarmlab/text.h"

namespace swarmlab::experiment {

namespace {

using nlohmann::json;

constexpr std::pair<Kind, std::string_view> kKinds[] = {
    {Kind::fit, "fit"},           {Kind::round, "round"},         {Kind::sweep_size, "sweep-size"},
    {Kind::sweep_byzantine, "sweep-byzantine"}, {Kind::sweep_sybil, "sweep-sybil"}, {Kind::route, "route"},
    {Kind::mesh_build, "mesh-build"},
};

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Reads keys out of one JSON object; finish() rejects any key not read.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "(root)" : path_, "expected an object");
  }

  void operator()(std::string_view key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
      out = v->get<double>();
    }
  }
  // null stands for +infinity.
  void unbounded(std::string_view key, double& out) {
    if (const auto* v = find(key)) {
      if (v->is_null()) out = std::numeric_limits<double>::infinity();
      else if (v->is_number()) out = v->get<double>();
      else throw ConfigError(join(path_, key), "expected a number or null");
    }
  }
  void operator()(std::string_view key, std::size_t& out) {
    if (const auto* v = find(key)) out = unsigned_value(*v, join(path_, key));
  }
  void operator()(std::string_view key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void operator()(std::string_view key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void operator()(std::string_view key, std::vector<double>& out) {
    if (const auto* v = find(key)) {
      const auto field = join(path_, key);
      if (!v->is_array()) throw ConfigError(field, "expected an array of numbers");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k) {
        if (!(*v)[k].is_number()) throw ConfigError(field + "[" + std::to_string(k) + "]", "expected a number");
        out.push_back((*v)[k].get<double>());
      }
    }
  }
  void operator()(std::string_view key, std::vector<std::size_t>& out) {
    if (const auto* v = find(key)) {
      const auto field = join(path_, key);
      if (!v->is_array()) throw ConfigError(field, "expected an array of non-negative integers");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k) {
        out.push_back(unsigned_value((*v)[k], field + "[" + std::to_string(k) + "]"));
      }
    }
  }
  template <typename Enum, std::size_t N>
  void choice(std::string_view key, Enum& out, const std::pair<Enum, std::string_view> (&names)[N]) {
    if (const auto* v = find(key)) {
      const auto field = join(path_, key);
      if (!v->is_string()) throw ConfigError(field, "expected a string");
      const auto text = v->get<std::string>();
      for (const auto& [value, name] : names) {
        if (name == text) {
          out = value;
          return;
        }
      }
      std::string allowed;
      for (const auto& [value, name] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
      throw ConfigError(field, "unknown value '" + text + "' (expected one of " + allowed + ")");
    }
  }
  template <typename Fn>
  void block(std::string_view key, Fn&& fn) {
    if (const auto* v = find(key)) {
      Reader child(*v, join(path_, key));
      fn(child);
      child.finish();
    }
  }

  const json* find(std::string_view key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(std::string(key));
    return &*it;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(join(path_, item.key()), "unknown key");
    }
  }

 private:
  static std::uint64_t unsigned_value(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) throw ConfigError(field, "must be >= 0");
    throw ConfigError(field, "expected a non-negative integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) {}

  template <typename T>
  void operator()(std::string_view key, const T& value) {
    j_[std::string(key)] = value;
  }
  void unbounded(std::string_view key, double value) {
    j_[std::string(key)] = std::isinf(value) ? json(nullptr) : json(value);
  }
  template <typename Enum, std::size_t N>
  void choice(std::string_view key, const Enum& value, const std::pair<Enum, std::string_view> (&names)[N]) {
    for (const auto& [v, name] : names) {
      if (v == value) j_[std::string(key)] = std::string(name);
    }
  }
  template <typename Fn>
  void block(std::string_view key, Fn&& fn) {
    json child = json::object();
    Writer w(child);
    fn(w);
    j_[std::string(key)] = std::move(child);
  }

 private:
  json& j_;
};

constexpr std::pair<sim::NoiseModel, std::string_view> kNoise[] = {
    {sim::NoiseModel::logistic, "logistic"}, {sim::NoiseModel::gaussian, "gaussian"}};
constexpr std::pair<sim::ByzantineMode, std::string_view> kByzantine[] = {
    {sim::ByzantineMode::random, "random"},
    {sim::ByzantineMode::adversarial, "adversarial"},
    {sim::ByzantineMode::mixed, "mixed"}};

template <typename V, typename C>
void visit_fit(V& v, C& c) {
  v("learning_rate", c.learning_rate);
  v("l2_lambda", c.l2_lambda);
  v("max_iters", c.max_iters);
  v("tol", c.tol);
}

template <typename V, typename C>
void visit_reputation(V& v, C& c) {
  v("alpha", c.alpha);
  v("beta", c.beta);
  v("delta_up", c.delta_up);
  v("delta_down", c.delta_down);
  v("decay_delta", c.decay_delta);
  v("r_min", c.r_min);
  v("r_max", c.r_max);
  v("slash_threshold", c.slash_threshold);
  v("r_initial", c.r_initial);
  v("perf_threshold", c.perf_threshold);
}

template <typename V, typename C>
void visit_sybil(V& v, C& c) {
  v("lambda", c.lambda);
  v("gamma", c.gamma);
  v("tau_factor", c.tau_factor);
  v("tau_collusion", c.tau_collusion);
  v("min_co_rounds", c.min_co_rounds);
}

template <typename V, typename C>
void visit_economics(V& v, C& c) {
  v("c_test", c.c_test);
  v("n_tests", c.n_tests);
  v("c_inference", c.c_inference);
  v("r_initial", c.r_initial);
  v("alpha_slash", c.alpha_slash);
  v("reward_per_round", c.reward_per_round);
}

template <typename V, typename C>
void visit_swarm(V& v, C& c) {
  v("n_nodes", c.n_nodes);
  v("byzantine_fraction", c.byzantine_fraction);
  v.choice("byzantine_mode", c.byzantine_mode, kByzantine);
  v("colluder_clique_sizes", c.colluder_clique_sizes);
  v("comparisons_per_judge", c.comparisons_per_judge);
  v("quality_mean", c.quality_mean);
  v("node_quality_sd", c.node_quality_sd);
  v("response_quality_sd", c.response_quality_sd);
  v("colluder_quality_offset", c.colluder_quality_offset);
  v("correct_threshold", c.correct_threshold);
  v("judge_noise", c.judge_noise);
  v("judge_noise_sd", c.judge_noise_sd);
  v.choice("noise_model", c.noise_model, kNoise);
  v("rounds", c.rounds);
  v("burn_in", c.burn_in);
  v("participation_rate", c.participation_rate);
  v("reputation_weighting", c.reputation_weighting);
  v("collusion_tracking", c.collusion_tracking);
  v("single_judge", c.single_judge);
  v("requalify_rounds", c.requalify_rounds);
  v("qualification_tests", c.qualification_tests);
  v("qualification_accuracy", c.qualification_accuracy);
  v("qualification_tau_fraction", c.qualification_tau_fraction);
  v.block("implied_fit", [&](auto& b) { visit_fit(b, c.implied_fit); });
}

template <typename V, typename C>
void visit_config(V& v, C& c) {
  v("master_seed", c.master_seed);
  v.block("fit", [&](auto& b) { visit_fit(b, c.fit); });
  v.block("reputation", [&](auto& b) { visit_reputation(b, c.swarm.reputation); });
  v.block("sybil", [&](auto& b) { visit_sybil(b, c.swarm.sybil); });
  v.block("economics", [&](auto& b) { visit_economics(b, c.economics); });
  v.block("swarm", [&](auto& b) { visit_swarm(b, c.swarm); });
  v.block("sweep", [&](auto& b) {
    b("sizes", c.sweep.sizes);
    b("fractions", c.sweep.fractions);
    b("rounds", c.sweep.rounds);
    b("seeds", c.sweep.seeds);
  });
  v.block("sybil_sweep", [&](auto& b) {
    b("k", c.sybil_sweep.k);
    b("lambda", c.sybil_sweep.lambda);
    b("horizon", c.sybil_sweep.horizon);
  });
  v.block("mesh", [&](auto& b) {
    b("dim", c.mesh.dim);
    b("nodes", c.mesh.nodes);
    b("points_per_node", c.mesh.points_per_node);
    b("node_rate", c.mesh.node_rate);
    b("beta_cap", c.mesh.partition.beta_cap);
    b.unbounded("lambda_split", c.mesh.partition.lambda_split);
    b("query", c.mesh.query);
  });
  v.block("input", [&](auto& b) {
    b("comparisons", c.input.comparisons);
    b("use_weights", c.input.use_weights);
  });
}

template <typename Fn>
void as_config_error(std::string_view field, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(field), e.what());
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

// Artifacts are rendered in memory, checksummed and written.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    sums_[name] = to_hex(sha256(std::string_view(bytes)));
  }
  const std::map<std::string, std::string>& sums() const { return sums_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> sums_;
};

std::vector<mesh::SemanticPoint> synthetic_points(const MeshParams& params, std::uint64_t seed,
                                                  std::vector<double>& loads) {
  auto rng = make_rng(Sha256().update("swarmlab/mesh").update_u64(seed).finish());
  std::vector<mesh::SemanticPoint> points;
  loads.clear();
  const double share = params.node_rate / static_cast<double>(params.points_per_node);
  for (std::size_t n = 0; n < params.nodes; ++n) {
    std::vector<double> center(params.dim);
    for (auto& x : center) x = standard_normal(rng);
    for (std::size_t p = 0; p < params.points_per_node; ++p) {
      std::vector<double> v(params.dim);
      for (std::size_t k = 0; k < params.dim; ++k) v[k] = center[k] + 0.25 * standard_normal(rng);
      points.emplace_back("node-" + std::to_string(n), std::move(v));
      loads.push_back(share);
    }
  }
  return points;
}

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void run_round_experiment(const ExperimentConfig& cfg, const RunOptions& options, ArtifactSet& artifacts,
                          std::ostream& log) {
  sim::Swarm swarm(cfg.swarm);
  std::ostringstream trajectory, trace;
  std::vector<reputation::TrajectoryRow> rows;
  std::size_t played = 0, skipped = 0, correct = 0, solved = 0, majority_solved = 0, slashes = 0;
  for (std::size_t t = 0; t < cfg.swarm.rounds; ++t) {
    const auto out = swarm.run_round(t);
    if (out.skipped) ++skipped;
    if (!out.participants.empty()) {
      ++played;
      correct += out.correct;
      solved += out.solved;
      majority_solved += out.majority_solved;
    }
    slashes += out.slashed_nodes.size();
    for (std::size_t i = 0; i < swarm.profiles().size(); ++i) {
      const bool slashed = std::find(out.slashed_nodes.begin(), out.slashed_nodes.end(), i) != out.slashed_nodes.end();
      rows.push_back({static_cast<std::int64_t>(t), swarm.profiles()[i].id, swarm.profiles()[i].reputation, slashed});
    }
    if (options.trace) {
      json line;
      line["round"] = out.round;
      line["skipped"] = out.skipped;
      if (!out.diagnostic.empty()) line["diagnostic"] = out.diagnostic;
      json ids = json::array();
      for (auto p : out.participants) ids.push_back(swarm.profiles()[p].id);
      line["participants"] = std::move(ids);
      line["qualities"] = vector_json(out.response_qualities);
      line["theta"] = vector_json(out.fitted_scores.log_scores());
      line["winner"] = out.winner;
      line["majority_winner"] = out.majority_winner;
      line["correct"] = out.correct;
      line["solved"] = out.solved;
      line["round_weight"] = out.round_weight;
      json agreement = json::array();
      for (const auto& a : out.per_judge_agreement) agreement.push_back(a ? json(*a) : json(nullptr));
      line["agreement"] = std::move(agreement);
      line["comparisons"] = out.comparisons.size();
      line["fit_iterations"] = out.fit.iterations;
      json slashed = json::array();
      for (auto s : out.slashed_nodes) slashed.push_back(swarm.profiles()[s].id);
      line["slashed"] = std::move(slashed);
      trace << line.dump() << '\n';
    }
  }
  reputation::write_trajectory_csv(trajectory, rows);
  artifacts.add("trajectory.csv", trajectory.str());
  if (options.trace) artifacts.add("rounds.jsonl", trace.str());

  const auto rate = [&](std::size_t k) { return played ? static_cast<double>(k) / static_cast<double>(played) : 0.0; };
  json summary;
  summary["rounds"] = cfg.swarm.rounds;
  summary["skipped"] = skipped;
  summary["correct_rate"] = rate(correct);
  summary["solved_rate"] = rate(solved);
  summary["majority_solved_rate"] = rate(majority_solved);
  summary["slash_events"] = slashes;
  artifacts.add("summary.json", summary.dump(2) + "\n");
  log << "rounds " << cfg.swarm.rounds << ": solved " << format_double(rate(solved)) << ", argmax "
      << format_double(rate(correct)) << ", majority solved " << format_double(rate(majority_solved)) << ", "
      << slashes << " slash events\n";
}

}  // namespace

std::string_view kind_name(Kind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void ExperimentConfig::resolve() {
  swarm.master_seed = master_seed;
  swarm.fit = fit;
  as_config_error("fit", [&] { fit.validate(); });
  as_config_error("", [&] { swarm.validate(); });
  as_config_error("economics", [&] { economics.validate(); });
  if (sweep.seeds < 1) throw ConfigError("sweep.seeds", "must be >= 1");
  for (std::size_t k = 0; k < sweep.sizes.size(); ++k) {
    if (sweep.sizes[k] < 1) throw ConfigError("sweep.sizes[" + std::to_string(k) + "]", "must be >= 1");
  }
  for (std::size_t k = 0; k < sweep.fractions.size(); ++k) {
    const double f = sweep.fractions[k];
    if (!(f >= 0.0 && f <= 0.5)) throw ConfigError("sweep.fractions[" + std::to_string(k) + "]", "must lie in [0, 0.5]");
  }
  for (std::size_t k = 0; k < sybil_sweep.k.size(); ++k) {
    if (sybil_sweep.k[k] < 1) throw ConfigError("sybil_sweep.k[" + std::to_string(k) + "]", "must be >= 1");
    if (sybil_sweep.k[k] > swarm.n_nodes) {
      throw ConfigError("sybil_sweep.k[" + std::to_string(k) + "]", "exceeds swarm.n_nodes");
    }
  }
  for (std::size_t k = 0; k < sybil_sweep.lambda.size(); ++k) {
    if (!(sybil_sweep.lambda[k] >= 0.0)) {
      throw ConfigError("sybil_sweep.lambda[" + std::to_string(k) + "]", "must be >= 0");
    }
  }
  if (mesh.dim < 1) throw ConfigError("mesh.dim", "must be >= 1");
  if (mesh.nodes < 1) throw ConfigError("mesh.nodes", "must be >= 1");
  if (mesh.points_per_node < 1) throw ConfigError("mesh.points_per_node", "must be >= 1");
  if (!(mesh.node_rate >= 0.0)) throw ConfigError("mesh.node_rate", "must be >= 0");
  if (mesh.partition.beta_cap < 1) throw ConfigError("mesh.beta_cap", "must be >= 1");
  if (!(mesh.partition.lambda_split > 0.0)) throw ConfigError("mesh.lambda_split", "must be > 0");
  if (!mesh.query.empty() && mesh.query.size() != mesh.dim) {
    throw ConfigError("mesh.query", "must have mesh.dim coordinates");
  }
  if (kind == Kind::fit && input.comparisons.empty()) throw ConfigError("input.comparisons", "a comparison file is required");
}

ExperimentConfig parse_config(std::string_view json_text, std::optional<Kind> kind) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", "invalid JSON at line " + std::to_string(line_of(json_text, e.byte)) + ": " + e.what());
  }
  ExperimentConfig cfg;
  Reader root(doc, "");
  std::string schema;
  root("schema", schema);
  if (schema.empty()) throw ConfigError("schema", "missing (expected \"" + std::string(kSchema) + "\")");
  if (schema != kSchema) throw ConfigError("schema", "unsupported schema '" + schema + "'");
  if (const auto* e = root.find("experiment")) {
    if (!e->is_string() || !parse_kind(e->get<std::string>())) throw ConfigError("experiment", "unknown experiment kind");
    cfg.kind = *parse_kind(e->get<std::string>());
    if (kind && *kind != cfg.kind) {
      throw ConfigError("experiment", "config is for '" + std::string(kind_name(cfg.kind)) + "', not '" +
                                          std::string(kind_name(*kind)) + "'");
    }
  } else if (kind) {
    cfg.kind = *kind;
  } else {
    throw ConfigError("experiment", "missing");
  }
  visit_config(root, cfg);
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Kind> kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  auto cfg = parse_config(text.str(), kind);
  std::filesystem::path input = cfg.input.comparisons;
  if (!input.empty() && input.is_relative()) {
    cfg.input.comparisons = std::filesystem::absolute(path.parent_path() / input).lexically_normal().string();
  }
  return cfg;
}

std::string resolved_config_json(const ExperimentConfig& config) {
  json doc;
  doc["schema"] = std::string(kSchema);
  doc["experiment"] = std::string(kind_name(config.kind));
  Writer w(doc);
  visit_config(w, const_cast<ExperimentConfig&>(config));
  return doc.dump(2) + "\n";
}

bt::ComparisonTally read_comparisons(std::istream& in, std::size_t* records) {
  struct Record {
    std::size_t winner, loser;
    double weight;
  };
  std::vector<Record> parsed;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      if (line.rfind("winner,loser", 0) != 0) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'winner,loser,judge,weight'", line_no);
      }
      header = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto fail = [&](const std::string& what) {
      throw ParseError("line " + std::to_string(line_no) + ": " + what, line_no);
    };
    if (fields.size() < 2 || fields.size() > 4) fail("expected winner,loser,judge,weight");
    auto parse_id = [&](std::string_view text, const char* name) {
      std::size_t value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(std::string(name) + " must be a non-negative integer");
      }
      return value;
    };
    Record r{parse_id(fields[0], "winner"), parse_id(fields[1], "loser"), 1.0};
    if (r.winner == r.loser) fail("self-comparison of item " + std::to_string(r.winner));
    if (fields.size() == 4 && !fields[3].empty()) {
      auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), r.weight);
      if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size() || !std::isfinite(r.weight) ||
          r.weight < 0.0) {
        fail("weight must be a finite number >= 0");
      }
    }
    max_id = std::max({max_id, r.winner, r.loser});
    parsed.push_back(r);
  }
  if (records) *records = parsed.size();
  if (parsed.empty()) throw DomainError("no comparisons");
  bt::ComparisonTally tally(max_id + 1);
  for (const auto& r : parsed) tally.add(r.winner, r.loser, r.weight);
  return tally;
}

FitReport fit_from_file(const std::filesystem::path& path, bool use_weights, const bt::FitConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("input.comparisons", "cannot open '" + path.string() + "'");
  FitReport report;
  const auto tally = read_comparisons(in, &report.comparisons);
  report.result = bt::fit(tally, config, use_weights);
  report.weighted = use_weights;
  return report;
}

void write_fit_report(std::ostream& out, const FitReport& report) {
  const auto& scores = report.result.scores;
  const auto order = bt::rank_from_scores(scores);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  out << "item,theta,pi,rank\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << ',' << format_double(scores.log_scores()[i]) << ',' << format_double(scores.scores()[i]) << ','
        << rank[i] << '\n';
  }
  const auto& d = report.result.diagnostics;
  out << "# comparisons=" << report.comparisons << " weighted=" << (report.weighted ? "true" : "false")
      << " iterations=" << d.iterations << " gradient_norm=" << format_double(d.gradient_norm)
      << " objective=" << format_double(d.objective) << " converged=" << (d.converged ? "true" : "false") << '\n';
}

void run(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  std::filesystem::create_directories(options.out_dir);
  ArtifactSet artifacts(options.out_dir);
  const auto resolved = resolved_config_json(config);

  switch (config.kind) {
    case Kind::fit: {
      const auto report = fit_from_file(config.input.comparisons, config.input.use_weights, config.fit);
      std::ostringstream text;
      write_fit_report(text, report);
      artifacts.add("scores.csv", text.str());
      log << text.str();
      break;
    }
    case Kind::round:
      run_round_experiment(config, options, artifacts, log);
      break;
    case Kind::sweep_size: {
      const auto rows = sim::sweep_swarm_size(config.swarm, config.sweep.sizes, config.sweep.rounds, config.sweep.seeds);
      std::ostringstream text;
      sim::write_sweep_csv(text, rows);
      artifacts.add("sweep.csv", text.str());
      log << text.str();
      break;
    }
    case Kind::sweep_byzantine: {
      const auto rows =
          sim::sweep_byzantine(config.swarm, config.sweep.fractions, config.sweep.rounds, config.sweep.seeds);
      std::ostringstream text;
      sim::write_sweep_csv(text, rows);
      artifacts.add("sweep.csv", text.str());
      log << text.str();
      break;
    }
    case Kind::sweep_sybil: {
      const auto rows = sybil::sweep_sybil(config.sybil_sweep.k, config.sybil_sweep.lambda, config.sybil_sweep.horizon,
                                           config.economics, config.swarm.sybil, config.swarm);
      std::ostringstream text;
      sybil::write_sybil_csv(text, rows);
      artifacts.add("sybil.csv", text.str());
      log << text.str();
      break;
    }
    case Kind::mesh_build:
    case Kind::route: {
      std::vector<double> loads;
      auto points = synthetic_points(config.mesh, config.master_seed, loads);
      const auto first = points.front().vector();
      const auto tree = mesh::build_partition(std::move(points), config.mesh.partition, loads);
      for (const auto& w : tree.warnings()) log << "warning: " << w << '\n';
      if (config.kind == Kind::mesh_build) {
        std::ostringstream dump;
        tree.dump(dump);
        artifacts.add("partition.tsv", dump.str());
        json summary;
        summary["points"] = tree.points().size();
        summary["regions"] = tree.regions().size();
        summary["leaves"] = tree.leaves().size();
        summary["depth"] = tree.depth();
        summary["warnings"] = tree.warnings();
        artifacts.add("mesh.json", summary.dump(2) + "\n");
        log << tree.leaves().size() << " leaves, depth " << tree.depth() << '\n';
      } else {
        const auto query = config.mesh.query.empty() ? first : config.mesh.query;
        const auto route = tree.route(query);
        json result;
        result["query"] = vector_json(query);
        result["sub_mesh"] = route.id.to_string();
        result["members"] = route.members;
        result["steps"] = route.steps;
        artifacts.add("route.json", result.dump(2) + "\n");
        log << "sub-mesh '" << route.id.to_string() << "' after " << route.steps << " steps, "
            << route.members.size() << " members\n";
      }
      break;
    }
  }

  artifacts.add("resolved_config.json", resolved);
  json meta;
  meta["schema"] = std::string(kSchema);
  meta["experiment"] = std::string(kind_name(config.kind));
  meta["master_seed"] = config.master_seed;
  meta["config_sha256"] = to_hex(sha256(std::string_view(resolved)));
  meta["artifacts"] = artifacts.sums();
  std::ofstream(options.out_dir / "meta.json") << meta.dump(2) << '\n';
}

}  // namespace swarmlab::experiment
