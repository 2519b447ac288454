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

// Serial vs OpenMP likelihood kernel, and serial vs parallel sweep drivers.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "swarmlab/bt_kernels.h"
#include "swarmlab/parallel.h"
#include "swarmlab/swarm_sim.h"

namespace {

using swarmlab::bt::Edge;

struct Problem {
  std::vector<Edge> edges;
  std::vector<double> theta;
};

Problem make_problem(std::size_t items, std::size_t edges) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(items - 1));
  std::uniform_real_distribution<double> wins(0.0, 5.0);
  std::normal_distribution<double> strength(0.0, 1.0);
  Problem p;
  p.theta.resize(items);
  for (auto& t : p.theta) t = strength(rng);
  while (p.edges.size() < edges) {
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    p.edges.push_back({a, b, wins(rng), wins(rng)});
  }
  return p;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto p = make_problem(1000, static_cast<std::size_t>(state.range(0)));
  std::vector<double> grad(p.theta.size());
  for (auto _ : state) benchmark::DoNotOptimize(swarmlab::bt::evaluate_serial(p.edges, p.theta, grad));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto p = make_problem(1000, static_cast<std::size_t>(state.range(0)));
  std::vector<double> grad(p.theta.size());
  swarmlab::bt::EdgeScratch scratch;
  for (auto _ : state) benchmark::DoNotOptimize(swarmlab::bt::evaluate_parallel(p.edges, p.theta, grad, scratch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_EvaluateSerial)->RangeMultiplier(8)->Range(512, 262144);
BENCHMARK(BM_EvaluateParallel)->RangeMultiplier(8)->Range(512, 262144);

template <bool Parallel>
void BM_SweepRuns(benchmark::State& state) {
  swarmlab::sim::SwarmConfig base;
  base.n_nodes = 15;
  base.collusion_tracking = false;
  const std::size_t runs = 8;
  for (auto _ : state) {
    std::vector<double> solved(runs);
    auto body = [&](std::size_t r) {
      auto c = base;
      c.master_seed = swarmlab::sim::run_seed(1, 15.0, r);
      swarmlab::sim::Swarm swarm(c);
      for (std::size_t t = 0; t < 20; ++t) solved[r] += swarm.run_round(t).solved;
    };
    if constexpr (Parallel) {
      swarmlab::parallel_for(runs, body);
    } else {
      swarmlab::serial_for(runs, body);
    }
    benchmark::DoNotOptimize(solved.data());
  }
}

BENCHMARK(BM_SweepRuns<false>)->Name("BM_SweepSerial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepRuns<true>)->Name("BM_SweepParallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
