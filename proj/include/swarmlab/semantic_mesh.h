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
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlab::mesh {

// A capability embedding owned by a node. Zero vectors are rejected.
class SemanticPoint {
 public:
  SemanticPoint(std::string owner, std::vector<double> vector);

  const std::string& owner() const { return owner_; }
  const std::vector<double>& vector() const { return vector_; }
  double norm() const { return norm_; }
  std::size_t dim() const { return vector_.size(); }

 private:
  std::string owner_;
  std::vector<double> vector_;
  double norm_;
};

// 1 - max cosine similarity over all cross pairs; lies in [0, 2].
double semantic_distance(std::span<const SemanticPoint> a, std::span<const SemanticPoint> b);

enum class Side { left, right };

struct SplitStep {
  Side side = Side::left;
  std::size_t dim = 0;

  friend bool operator==(const SplitStep&, const SplitStep&) = default;
};

// Path from the root to a leaf, serialized as "L-3|R-0|..."; the root is "".
struct SubMeshId {
  std::vector<SplitStep> path;

  std::size_t depth() const { return path.size(); }
  std::string to_string() const;
  static SubMeshId parse(std::string_view text);

  friend bool operator==(const SubMeshId&, const SubMeshId&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Split {
  std::size_t dim = 0;
  double median = 0.0;
};

struct Region {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::vector<Interval> bounds;  // closed box
  std::optional<Split> split;    // set on internal regions
  std::size_t left = npos;
  std::size_t right = npos;
  std::vector<std::size_t> points;   // indices into PartitionTree::points()
  std::vector<std::string> members;  // sorted distinct owners
  double load = 0.0;
  SubMeshId id;

  bool is_leaf() const { return !split.has_value(); }
};

struct PartitionParams {
  std::size_t beta_cap = 8;  // max distinct nodes per leaf
  double lambda_split = std::numeric_limits<double>::infinity();  // max load per leaf
};

struct RouteResult {
  SubMeshId id;
  std::vector<std::string> members;
  std::size_t region = 0;
  std::size_t steps = 0;  // internal regions visited
};

class PartitionTree {
 public:
  const std::vector<SemanticPoint>& points() const { return points_; }
  const std::vector<Region>& regions() const { return regions_; }
  const Region& root() const { return regions_.front(); }
  std::vector<std::size_t> leaves() const;
  std::size_t depth() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Left when the query coordinate is strictly below the split median.
  RouteResult route(std::span<const double> query) const;

  // One leaf per line: id <TAB> comma-separated members <TAB> lo:hi;lo:hi;...
  void dump(std::ostream& out) const;

 private:
  friend PartitionTree build_partition(std::vector<SemanticPoint>, const PartitionParams&, std::span<const double>);

  std::vector<SemanticPoint> points_;
  std::vector<Region> regions_;
  std::vector<std::string> warnings_;
};

// Splits every region holding more than beta_cap distinct nodes or carrying
// more than lambda_split load at the median of its highest-variance
// dimension. Points on the median go left or right by a coin that depends
// only on the owner id, region id and dimension. `loads` is per point and
// may be empty (all zero).
PartitionTree build_partition(std::vector<SemanticPoint> points, const PartitionParams& params,
                              std::span<const double> loads = {});

// True when the summed request rate of the leaf's members exceeds lambda_split.
bool check_split_trigger(const Region& leaf, const std::map<std::string, double>& request_rates,
                         double lambda_split);

struct CoverageState {
  double radius = 1.0;
  double bandwidth_limit = 1.0;
  double safety_margin = 0.8;  // < 1
  double step = 0.05;
};

// Grows the radius by (1 + step) while the load in the ball is below
// safety_margin * bandwidth_limit, shrinks it by (1 - step) otherwise.
CoverageState update_coverage_radius(const CoverageState& state, double observed_load_in_ball);

// Summed rate of the query points within `radius` of `center`.
double ball_load(std::span<const double> center, double radius, std::span<const std::vector<double>> query_points,
                 std::span<const double> query_rates);

}  // namespace swarmlab::mesh
