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

#include "swarmlab/semantic_mesh.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <ostream>
#include <set>

#include "swarmlab/errors.h"
#include "swarmlab/hashing.h"
#include "swarmlab/text.h"

namespace swarmlab::mesh {

namespace {

double cosine(const SemanticPoint& a, const SemanticPoint& b) {
  if (a.dim() != b.dim()) throw StructuralError("semantic_distance: dimension mismatch");
  double dot = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) dot += a.vector()[k] * b.vector()[k];
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

bool tie_goes_right(const std::string& owner, const SubMeshId& region, std::size_t dim) {
  const auto d = Sha256().update("swarmlab/median-tie").update(owner).update("|").update(region.to_string())
                     .update_u64(dim).finish();
  return (d[0] & 1u) != 0;
}

std::vector<std::string> distinct_owners(const std::vector<SemanticPoint>& pts, const std::vector<std::size_t>& idx) {
  std::set<std::string> owners;
  for (auto i : idx) owners.insert(pts[i].owner());
  return {owners.begin(), owners.end()};
}

// Population variance per dimension; returns the argmax (lowest dim on ties)
// and its variance.
std::pair<std::size_t, double> max_variance_dim(const std::vector<SemanticPoint>& pts,
                                                const std::vector<std::size_t>& idx, std::size_t dims) {
  std::size_t best_dim = 0;
  double best_var = -1.0;
  const double n = static_cast<double>(idx.size());
  for (std::size_t k = 0; k < dims; ++k) {
    double mean = 0.0;
    for (auto i : idx) mean += pts[i].vector()[k];
    mean /= n;
    double var = 0.0;
    for (auto i : idx) {
      const double d = pts[i].vector()[k] - mean;
      var += d * d;
    }
    var /= n;
    if (var > best_var) {
      best_var = var;
      best_dim = k;
    }
  }
  return {best_dim, best_var};
}

double median_of(const std::vector<SemanticPoint>& pts, const std::vector<std::size_t>& idx, std::size_t dim) {
  std::vector<double> values;
  values.reserve(idx.size());
  for (auto i : idx) values.push_back(pts[i].vector()[dim]);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SemanticPoint::SemanticPoint(std::string owner, std::vector<double> vector)
    : owner_(std::move(owner)), vector_(std::move(vector)), norm_(0.0) {
  double ss = 0.0;
  for (double x : vector_) {
    if (!std::isfinite(x)) throw DomainError("semantic point has a non-finite coordinate");
    ss += x * x;
  }
  norm_ = std::sqrt(ss);
  if (!(norm_ > 0.0)) throw DomainError("semantic point must not be the zero vector (owner " + owner_ + ")");
}

double semantic_distance(std::span<const SemanticPoint> a, std::span<const SemanticPoint> b) {
  if (a.empty() || b.empty()) throw DomainError("semantic_distance: point sets must be non-empty");
  double best = -1.0;
  for (const auto& x : a) {
    for (const auto& y : b) best = std::max(best, cosine(x, y));
  }
  return 1.0 - best;
}

std::string SubMeshId::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) out += '|';
    out += path[k].side == Side::left ? 'L' : 'R';
    out += '-';
    out += std::to_string(path[k].dim);
  }
  return out;
}

SubMeshId SubMeshId::parse(std::string_view text) {
  SubMeshId id;
  if (text.empty()) return id;
  std::size_t pos = 0;
  while (true) {
    if (pos >= text.size() || (text[pos] != 'L' && text[pos] != 'R')) {
      throw ParseError("sub-mesh id: expected 'L' or 'R'", pos);
    }
    const Side side = text[pos] == 'L' ? Side::left : Side::right;
    if (pos + 1 >= text.size() || text[pos + 1] != '-') throw ParseError("sub-mesh id: expected '-'", pos + 1);
    const auto start = pos + 2;
    auto end = text.find('|', start);
    if (end == std::string_view::npos) end = text.size();
    std::size_t dim = 0;
    const auto* first = text.data() + start;
    const auto* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, dim);
    if (start == end || ec != std::errc{} || ptr != last) throw ParseError("sub-mesh id: expected a dimension", start);
    id.path.push_back({side, dim});
    if (end == text.size()) break;
    pos = end + 1;
    if (pos == text.size()) throw ParseError("sub-mesh id: trailing separator", end);
  }
  return id;
}

std::vector<std::size_t> PartitionTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    if (regions_[r].is_leaf()) out.push_back(r);
  }
  return out;
}

std::size_t PartitionTree::depth() const {
  std::size_t d = 0;
  for (const auto& r : regions_) d = std::max(d, r.id.depth());
  return d;
}

RouteResult PartitionTree::route(std::span<const double> query) const {
  std::size_t at = 0;
  std::size_t steps = 0;
  while (!regions_[at].is_leaf()) {
    const auto& split = *regions_[at].split;
    if (split.dim >= query.size()) throw StructuralError("route_query: query dimension too small");
    at = query[split.dim] < split.median ? regions_[at].left : regions_[at].right;
    ++steps;
  }
  return {regions_[at].id, regions_[at].members, at, steps};
}

void PartitionTree::dump(std::ostream& out) const {
  for (auto leaf : leaves()) {
    const auto& r = regions_[leaf];
    out << r.id.to_string() << '\t';
    for (std::size_t k = 0; k < r.members.size(); ++k) out << (k ? "," : "") << r.members[k];
    out << '\t';
    for (std::size_t k = 0; k < r.bounds.size(); ++k) {
      out << (k ? ";" : "") << format_double(r.bounds[k].lo) << ':' << format_double(r.bounds[k].hi);
    }
    out << '\n';
  }
}

PartitionTree build_partition(std::vector<SemanticPoint> points, const PartitionParams& params,
                              std::span<const double> loads) {
  if (points.empty()) throw DomainError("build_partition: need at least one point");
  if (params.beta_cap < 1) throw DomainError("build_partition: beta_cap must be >= 1");
  if (!loads.empty() && loads.size() != points.size()) throw StructuralError("build_partition: one load per point");
  const std::size_t dims = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dims) throw StructuralError("build_partition: points differ in dimension");
  }

  PartitionTree tree;
  tree.points_ = std::move(points);
  const auto& pts = tree.points_;

  Region root;
  root.bounds.assign(dims, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < dims; ++k) {
      root.bounds[k].lo = std::min(root.bounds[k].lo, p.vector()[k]);
      root.bounds[k].hi = std::max(root.bounds[k].hi, p.vector()[k]);
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) root.points.push_back(i);
  tree.regions_.push_back(std::move(root));

  auto load_of = [&](const std::vector<std::size_t>& idx) {
    double total = 0.0;
    if (!loads.empty()) {
      for (auto i : idx) total += loads[i];
    }
    return total;
  };

  std::deque<std::size_t> pending{0};
  while (!pending.empty()) {
    const auto at = pending.front();
    pending.pop_front();
    auto& region = tree.regions_[at];
    region.members = distinct_owners(pts, region.points);
    region.load = load_of(region.points);
    const bool over_cap = region.members.size() > params.beta_cap || region.load > params.lambda_split;
    if (!over_cap) continue;

    const auto [dim, variance] = max_variance_dim(pts, region.points, dims);
    if (!(variance > 0.0)) {
      tree.warnings_.push_back("oversized leaf '" + region.id.to_string() + "': " +
                               std::to_string(region.points.size()) + " identical points cannot be split");
      continue;
    }
    const double median = median_of(pts, region.points, dim);
    std::vector<std::size_t> left, right, ties;
    for (auto i : region.points) {
      const double v = pts[i].vector()[dim];
      if (v < median) left.push_back(i);
      else if (v > median) right.push_back(i);
      else ties.push_back(i);
    }
    std::vector<std::size_t> ties_left, ties_right;
    for (auto i : ties) (tie_goes_right(pts[i].owner(), region.id, dim) ? ties_right : ties_left).push_back(i);
    if (left.empty() && ties_left.empty()) ties_left.swap(ties_right);
    else if (right.empty() && ties_right.empty()) ties_right.swap(ties_left);
    left.insert(left.end(), ties_left.begin(), ties_left.end());
    right.insert(right.end(), ties_right.begin(), ties_right.end());
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());

    Region lo, hi;
    lo.bounds = hi.bounds = region.bounds;
    lo.bounds[dim].hi = median;
    hi.bounds[dim].lo = median;
    lo.points = std::move(left);
    hi.points = std::move(right);
    lo.id = hi.id = region.id;
    lo.id.path.push_back({Side::left, dim});
    hi.id.path.push_back({Side::right, dim});

    region.split = Split{dim, median};
    region.points.clear();
    region.members.clear();
    const auto left_index = tree.regions_.size();
    tree.regions_[at].left = left_index;
    tree.regions_[at].right = left_index + 1;
    tree.regions_.push_back(std::move(lo));
    tree.regions_.push_back(std::move(hi));
    pending.push_back(left_index);
    pending.push_back(left_index + 1);
  }
  return tree;
}

bool check_split_trigger(const Region& leaf, const std::map<std::string, double>& request_rates,
                         double lambda_split) {
  double total = 0.0;
  for (const auto& m : leaf.members) {
    if (auto it = request_rates.find(m); it != request_rates.end()) total += it->second;
  }
  return total > lambda_split;
}

CoverageState update_coverage_radius(const CoverageState& state, double observed_load_in_ball) {
  if (!(state.step > 0.0 && state.step < 1.0)) throw DomainError("coverage step must lie in (0, 1)");
  if (!(state.radius > 0.0)) throw DomainError("coverage radius must be positive");
  CoverageState next = state;
  next.radius *= observed_load_in_ball < state.safety_margin * state.bandwidth_limit ? 1.0 + state.step
                                                                                      : 1.0 - state.step;
  return next;
}

double ball_load(std::span<const double> center, double radius, std::span<const std::vector<double>> query_points,
                 std::span<const double> query_rates) {
  if (query_points.size() != query_rates.size()) throw StructuralError("ball_load: one rate per query point");
  double total = 0.0;
  for (std::size_t q = 0; q < query_points.size(); ++q) {
    if (query_points[q].size() != center.size()) throw StructuralError("ball_load: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) {
      const double d = query_points[q][k] - center[k];
      d2 += d * d;
    }
    if (d2 <= radius * radius) total += query_rates[q];
  }
  return total;
}

}  // namespace swarmlab::mesh
