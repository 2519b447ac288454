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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmlab/bt_engine.h"
#include "swarmlab/reputation.h"
#include "swarmlab/semantic_mesh.h"
#include "swarmlab/swarm_sim.h"
#include "swarmlab/sybil_economics.h"
#include "swarmlab/sybil_guard.h"

namespace swarmlab::experiment {

inline constexpr std::string_view kSchema = "swarmlab/v1";

enum class Kind { fit, round, sweep_size, sweep_byzantine, sweep_sybil, route, mesh_build };

std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);

// Invalid configuration; `field` is the dotted key path when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SweepParams {
  std::vector<std::size_t> sizes{1, 3, 5, 7, 10, 15, 20, 25, 30, 35};
  std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t rounds = 500;
  std::size_t seeds = 10;
};

struct SybilSweepParams {
  std::vector<std::size_t> k{1, 2, 3, 4, 5, 6};
  std::vector<double> lambda{0.0, 5.0, 10.0, 12.0, 15.0, 20.0};
  std::size_t horizon = 200;
};

struct MeshParams {
  std::size_t dim = 8;
  std::size_t nodes = 64;
  std::size_t points_per_node = 1;
  double node_rate = 1.0;  // request rate per node, spread over its points
  mesh::PartitionParams partition;
  std::vector<double> query;  // route target; empty routes the first point
};

struct InputParams {
  std::string comparisons;  // CSV path for `fit`
  bool use_weights = false;
};

struct ExperimentConfig {
  Kind kind = Kind::round;
  std::uint64_t master_seed = 42;
  bt::FitConfig fit;
  sim::SwarmConfig swarm;  // carries reputation and sybil parameters
  sybil::EconomicParams economics;
  SweepParams sweep;
  SybilSweepParams sybil_sweep;
  MeshParams mesh;
  InputParams input;

  // Pushes shared blocks (seed, fit, reputation, sybil) into the swarm
  // config and validates every parameter.
  void resolve();
};

// Strict parse: unknown keys, wrong types and out-of-range values are
// ConfigErrors naming the offending field. `kind` fills in the experiment
// when the document omits it and must agree with it otherwise.
ExperimentConfig parse_config(std::string_view json_text, std::optional<Kind> kind = std::nullopt);
// A relative input.comparisons resolves against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Kind> kind = std::nullopt);

// Canonical JSON for the fully resolved config (sorted keys, every field).
std::string resolved_config_json(const ExperimentConfig& config);

struct FitReport {
  bt::FitResult result;
  std::size_t comparisons = 0;
  bool weighted = false;
};

// Reads `winner,loser,judge,weight` records; item ids are non-negative
// integers and weight may be empty (1.0). Malformed lines and self-pairs are
// ParseErrors carrying the 1-based line number.
bt::ComparisonTally read_comparisons(std::istream& in, std::size_t* records = nullptr);
FitReport fit_from_file(const std::filesystem::path& path, bool use_weights, const bt::FitConfig& config);

// item,theta,pi,rank followed by a diagnostics line.
void write_fit_report(std::ostream& out, const FitReport& report);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool trace = false;
};

// Runs the experiment, writing its artifacts plus resolved_config.json and
// meta.json into out_dir. Human-readable progress goes to `log`.
void run(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

}  // namespace swarmlab::experiment
