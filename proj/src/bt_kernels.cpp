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

#include "swarmlab/bt_kernels.h"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "swarmlab/parallel.h"

namespace swarmlab::bt {

namespace {

struct EdgeTerms {
  double log_term;
  double grad_term;
};

// log sigma(d) = -softplus(-d), log sigma(-d) = -(d + softplus(-d)).
inline EdgeTerms edge_terms(const Edge& e, std::span<const double> theta) {
  const double d = theta[e.i] - theta[e.j];
  const double t = std::exp(-std::abs(d));
  const double softplus_neg = std::max(-d, 0.0) + std::log1p(t);
  const double p = d >= 0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
  return {-e.wins_i * softplus_neg - e.wins_j * (softplus_neg + d),
          e.wins_i - (e.wins_i + e.wins_j) * p};
}

}  // namespace

double evaluate_serial(std::span<const Edge> edges, std::span<const double> theta,
                       std::span<double> gradient) {
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double ll = 0.0;
  for (const auto& e : edges) {
    const auto terms = edge_terms(e, theta);
    ll += terms.log_term;
    gradient[e.i] += terms.grad_term;
    gradient[e.j] -= terms.grad_term;
  }
  return ll;
}

double evaluate_parallel(std::span<const Edge> edges, std::span<const double> theta,
                         std::span<double> gradient, EdgeScratch& scratch) {
  const auto m = edges.size();
  scratch.log_terms.resize(m);
  scratch.grad_terms.resize(m);
  double* log_terms = scratch.log_terms.data();
  double* grad_terms = scratch.grad_terms.data();
  const Edge* edge_data = edges.data();
  const auto n = static_cast<long long>(m);
  const int threads = thread_limit();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && !omp_in_parallel())
  for (long long k = 0; k < n; ++k) {
    const auto terms = edge_terms(edge_data[k], theta);
    log_terms[k] = terms.log_term;
    grad_terms[k] = terms.grad_term;
  }

  std::fill(gradient.begin(), gradient.end(), 0.0);
  double ll = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    ll += log_terms[k];
    gradient[edges[k].i] += grad_terms[k];
    gradient[edges[k].j] -= grad_terms[k];
  }
  return ll;
}

double evaluate(std::span<const Edge> edges, std::span<const double> theta,
                std::span<double> gradient, EdgeScratch& scratch) {
  if (edges.size() >= kParallelEdgeThreshold) return evaluate_parallel(edges, theta, gradient, scratch);
  return evaluate_serial(edges, theta, gradient);
}

}  // namespace swarmlab::bt
