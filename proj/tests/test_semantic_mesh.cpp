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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "swarmlab/errors.h"
#include "swarmlab/hashing.h"
#include "swarmlab/random.h"
#include "swarmlab/semantic_mesh.h"

using namespace swarmlab;
using namespace swarmlab::mesh;

namespace {

std::vector<SemanticPoint> random_points(std::size_t n, std::size_t dim, std::string_view tag) {
  auto rng = make_rng(sha256(tag));
  std::vector<SemanticPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = standard_normal(rng);
    out.emplace_back("n" + std::to_string(i), std::move(v));
  }
  return out;
}

bool inside(const Region& r, const std::vector<double>& v) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < r.bounds[k].lo || v[k] > r.bounds[k].hi) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("semantic points reject zero and non-finite vectors") {
  CHECK_THROWS_AS(SemanticPoint("a", {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(SemanticPoint("a", {NAN, 1.0}), DomainError);
  CHECK(SemanticPoint("a", {3.0, 4.0}).norm() == 5.0);
}

TEST_CASE("semantic distance") {
  const SemanticPoint x("a", {1.0, 0.0}), y("b", {0.0, 1.0}), z("c", {-1.0, 0.0});
  const SemanticPoint a[] = {x};
  const SemanticPoint b[] = {y};
  const SemanticPoint c[] = {z};
  const SemanticPoint ab[] = {y, SemanticPoint("d", {2.0, 0.0})};
  CHECK(semantic_distance(a, a) == doctest::Approx(0.0));
  CHECK(semantic_distance(a, b) == doctest::Approx(1.0));
  CHECK(semantic_distance(a, c) == doctest::Approx(2.0));
  CHECK(semantic_distance(a, ab) == doctest::Approx(0.0));
  CHECK_THROWS_AS(semantic_distance(a, {}), DomainError);
}

TEST_CASE("sub-mesh ids round-trip and report parse positions") {
  SubMeshId id;
  id.path = {{Side::left, 3}, {Side::right, 0}, {Side::right, 12}};
  CHECK(id.to_string() == "L-3|R-0|R-12");
  CHECK(SubMeshId::parse(id.to_string()) == id);
  CHECK(SubMeshId::parse("").depth() == 0);
  auto position_of = [](std::string_view text) {
    try {
      SubMeshId::parse(text);
    } catch (const ParseError& e) {
      return e.position();
    }
    return std::size_t(999);
  };
  CHECK(position_of("X-1") == 0);
  CHECK(position_of("L1") == 1);
  CHECK(position_of("L-") == 2);
  CHECK(position_of("L-2|") == 3);
  CHECK(position_of("L-2|R-a") == 6);
}

TEST_CASE("single point is a single leaf") {
  std::vector<SemanticPoint> pts{SemanticPoint("a", {1.0, 2.0})};
  const auto tree = build_partition(pts, {});
  CHECK(tree.regions().size() == 1);
  CHECK(tree.root().is_leaf());
  CHECK(tree.depth() == 0);
  CHECK(tree.route(std::vector<double>{5.0, 5.0}).steps == 0);
}

TEST_CASE("partition properties on random points") {
  for (std::size_t n : {9u, 64u, 500u, 2000u}) {
    PartitionParams params;
    params.beta_cap = 8;
    const auto tree = build_partition(random_points(n, 6, "mesh-" + std::to_string(n)), params);
    const auto leaves = tree.leaves();

    // Every point lands in exactly one leaf, inside its box.
    std::vector<int> seen(n, 0);
    for (auto l : leaves) {
      const auto& r = tree.regions()[l];
      CHECK(r.members.size() <= params.beta_cap);
      for (auto p : r.points) {
        ++seen[p];
        CHECK(inside(r, tree.points()[p].vector()));
      }
    }
    for (int s : seen) CHECK(s == 1);

    // Splits are balanced within one point and children tile their parent.
    for (const auto& r : tree.regions()) {
      if (r.is_leaf()) continue;
      std::size_t left = 0, right = 0;
      std::vector<std::size_t> stack{r.left};
      auto count = [&](std::size_t root) {
        std::size_t total = 0;
        std::vector<std::size_t> todo{root};
        while (!todo.empty()) {
          const auto at = todo.back();
          todo.pop_back();
          const auto& x = tree.regions()[at];
          if (x.is_leaf()) total += x.points.size();
          else {
            todo.push_back(x.left);
            todo.push_back(x.right);
          }
        }
        return total;
      };
      left = count(r.left);
      right = count(r.right);
      CHECK(std::max(left, right) - std::min(left, right) <= 1);
      const auto& lo = tree.regions()[r.left];
      const auto& hi = tree.regions()[r.right];
      CHECK(lo.bounds[r.split->dim].hi == r.split->median);
      CHECK(hi.bounds[r.split->dim].lo == r.split->median);
    }

    const double cap = std::ceil(std::log2(static_cast<double>(n) / params.beta_cap));
    CHECK(static_cast<double>(tree.depth()) <= std::max(0.0, cap) + 1.0);

    // Every point routes to a leaf whose box contains it, in depth-many steps,
    // and that leaf holds it unless it sits on a split plane.
    for (std::size_t p = 0; p < n; ++p) {
      const auto& v = tree.points()[p].vector();
      const auto route = tree.route(v);
      const auto& leaf = tree.regions()[route.region];
      CHECK(route.steps == leaf.id.depth());
      CHECK(inside(leaf, v));
      const bool held = std::find(leaf.points.begin(), leaf.points.end(), p) != leaf.points.end();
      bool on_plane = false;
      for (std::size_t k = 0; k < v.size(); ++k) on_plane |= v[k] == leaf.bounds[k].lo;
      CHECK((held || on_plane));
    }
  }
}

TEST_CASE("duplicate points produce an oversized-leaf warning") {
  std::vector<SemanticPoint> pts;
  for (int i = 0; i < 5; ++i) pts.emplace_back("n" + std::to_string(i), std::vector<double>{1.0, 1.0});
  PartitionParams params;
  params.beta_cap = 2;
  const auto tree = build_partition(pts, params);
  CHECK(tree.regions().size() == 1);
  REQUIRE(tree.warnings().size() == 1);
  CHECK(tree.warnings()[0].find("oversized leaf") != std::string::npos);
}

TEST_CASE("median ties split deterministically and never leave a side empty") {
  std::vector<SemanticPoint> pts;
  for (int i = 0; i < 6; ++i) pts.emplace_back("n" + std::to_string(i), std::vector<double>{1.0, i < 3 ? 0.0 : 1.0});
  for (int i = 0; i < 4; ++i) pts.emplace_back("t" + std::to_string(i), std::vector<double>{1.0, 0.5});
  PartitionParams params;
  params.beta_cap = 4;
  const auto a = build_partition(pts, params);
  const auto b = build_partition(pts, params);
  std::ostringstream da, db;
  a.dump(da);
  b.dump(db);
  CHECK(da.str() == db.str());
  for (auto l : a.leaves()) CHECK_FALSE(a.regions()[l].points.empty());
}

TEST_CASE("multi-point nodes count once per leaf and can span leaves") {
  std::vector<SemanticPoint> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back("shared", std::vector<double>{static_cast<double>(i) + 1.0, 1.0});
    pts.emplace_back("n" + std::to_string(i), std::vector<double>{static_cast<double>(i) + 1.5, 1.0});
  }
  PartitionParams params;
  params.beta_cap = 3;
  const auto tree = build_partition(pts, params);
  std::size_t leaves_with_shared = 0;
  for (auto l : tree.leaves()) {
    const auto& m = tree.regions()[l].members;
    CHECK(std::set<std::string>(m.begin(), m.end()).size() == m.size());
    leaves_with_shared += std::count(m.begin(), m.end(), "shared");
  }
  CHECK(leaves_with_shared > 1);
}

TEST_CASE("load-triggered splits") {
  auto pts = random_points(16, 3, "load");
  std::vector<double> loads(16, 1.0);
  PartitionParams params;
  params.beta_cap = 100;
  params.lambda_split = 4.5;
  const auto tree = build_partition(pts, params, loads);
  for (auto l : tree.leaves()) CHECK(tree.regions()[l].load <= 4.5);
  CHECK(tree.leaves().size() == 4);

  Region leaf;
  leaf.members = {"a", "b"};
  const std::map<std::string, double> rates{{"a", 2.0}, {"b", 2.0}};
  CHECK_FALSE(check_split_trigger(leaf, rates, 4.0));
  CHECK(check_split_trigger(leaf, rates, 3.9));
}

TEST_CASE("coverage radius control") {
  CoverageState s;
  s.radius = 1.0;
  s.bandwidth_limit = 10.0;
  CHECK(update_coverage_radius(s, 5.0).radius == doctest::Approx(1.05));
  CHECK(update_coverage_radius(s, 8.0).radius == doctest::Approx(0.95));
  CHECK(update_coverage_radius(s, 9.0).radius == doctest::Approx(0.95));
  s.step = 1.0;
  CHECK_THROWS_AS(update_coverage_radius(s, 1.0), DomainError);

  // Under a fixed query field the radius settles where the ball load crosses the margin.
  CoverageState c;
  c.radius = 0.1;
  c.bandwidth_limit = 10.0;
  std::vector<std::vector<double>> queries;
  std::vector<double> rates;
  for (int i = 1; i <= 100; ++i) {
    queries.push_back({0.01 * i, 0.0});
    rates.push_back(1.0);
  }
  const std::vector<double> center{0.0, 0.0};
  for (int t = 0; t < 200; ++t) c = update_coverage_radius(c, ball_load(center, c.radius, queries, rates));
  const double load = ball_load(center, c.radius, queries, rates);
  CHECK(load >= 6.0);
  CHECK(load <= 10.0);
}
