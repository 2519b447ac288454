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
#include <span>
#include <vector>

namespace swarmlab::bt {

// One compared pair with i < j and the (possibly weighted) win counts of each
// side. Pairs that were never compared do not appear.
struct Edge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double wins_i = 0.0;
  double wins_j = 0.0;
};

// Reusable per-edge buffers for evaluate_parallel.
struct EdgeScratch {
  std::vector<double> log_terms;
  std::vector<double> grad_terms;
};

// Unregularized log-likelihood at theta = log(pi). The gradient is written
// into `gradient` (resized by the caller to theta.size(), overwritten).
double evaluate_serial(std::span<const Edge> edges, std::span<const double> theta,
                       std::span<double> gradient);

// Same result, bit for bit: the per-edge transcendental work runs under
// OpenMP, accumulation stays serial in edge order.
double evaluate_parallel(std::span<const Edge> edges, std::span<const double> theta,
                         std::span<double> gradient, EdgeScratch& scratch);

// Edge count at which evaluate() switches to the parallel kernel.
inline constexpr std::size_t kParallelEdgeThreshold = 4096;

double evaluate(std::span<const Edge> edges, std::span<const double> theta,
                std::span<double> gradient, EdgeScratch& scratch);

}  // namespace swarmlab::bt
