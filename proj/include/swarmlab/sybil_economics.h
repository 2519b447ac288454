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
#include <span>
#include <vector>

#include "swarmlab/swarm_sim.h"
#include "swarmlab/sybil_guard.h"

namespace swarmlab::sybil {

struct EconomicParams {
  double c_test = 1.0;         // cost per qualification test
  std::size_t n_tests = 100;   // tests per identity
  double c_inference = 0.01;   // per identity per round
  double r_initial = 0.5;      // stake lost when slashed
  double alpha_slash = 1.0;
  double reward_per_round = 1.0;

  void validate() const;
};

struct SybilLedger {
  std::size_t k = 0;
  double lambda = 0.0;
  std::size_t rounds = 0;
  double revenue = 0.0;
  double cost_entry = 0.0;
  double cost_operation = 0.0;
  double cost_slashing = 0.0;
  double net = 0.0;
  bool profitable = false;
  double detected_fraction = 0.0;  // rounds in which an intra-clique support rate exceeded tau
};

// Plants one clique of k colluders in `swarm` (replacing any configured
// cliques), runs `horizon` rounds with the given penalty parameters and
// accounts the clique's revenue against entry, operation and expected
// slashing costs.
SybilLedger simulate_sybil_economics(std::size_t k, std::size_t horizon, const EconomicParams& econ,
                                     const SybilParams& params, const sim::SwarmConfig& swarm);

// One ledger per (k, lambda), k-major; runs are independent and parallel.
std::vector<SybilLedger> sweep_sybil(std::span<const std::size_t> ks, std::span<const double> lambdas,
                                     std::size_t horizon, const EconomicParams& econ, const SybilParams& params,
                                     const sim::SwarmConfig& swarm);

// k,lambda,rounds,revenue,cost_entry,cost_operation,cost_slashing,net,profitable
void write_sybil_csv(std::ostream& out, std::span<const SybilLedger> rows);

}  // namespace swarmlab::sybil
