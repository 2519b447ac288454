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

#include "swarmlab/sybil_economics.h"

#include <ostream>

#include "swarmlab/errors.h"
#include "swarmlab/parallel.h"
#include "swarmlab/text.h"

namespace swarmlab::sybil {

void EconomicParams::validate() const {
  if (!(c_test >= 0.0)) throw DomainError("economics.c_test must be >= 0");
  if (!(c_inference >= 0.0)) throw DomainError("economics.c_inference must be >= 0");
  if (!(r_initial >= 0.0)) throw DomainError("economics.r_initial must be >= 0");
  if (!(alpha_slash >= 0.0)) throw DomainError("economics.alpha_slash must be >= 0");
  if (!(reward_per_round >= 0.0)) throw DomainError("economics.reward_per_round must be >= 0");
}

SybilLedger simulate_sybil_economics(std::size_t k, std::size_t horizon, const EconomicParams& econ,
                                     const SybilParams& params, const sim::SwarmConfig& swarm) {
  econ.validate();
  if (k < 1) throw DomainError("sybil economics: k must be >= 1");
  sim::SwarmConfig cfg = swarm;
  cfg.colluder_clique_sizes = {k};
  cfg.sybil = params;
  sim::Swarm sim(cfg);

  std::vector<std::size_t> clique;
  for (std::size_t i = 0; i < sim.profiles().size(); ++i) {
    if (sim.profiles()[i].clique == 0) clique.push_back(i);
  }
  const double tau = sim.sybil_params().tau_collusion;

  SybilLedger ledger;
  ledger.k = k;
  ledger.lambda = params.lambda;
  ledger.rounds = horizon;
  const double kd = static_cast<double>(k);
  std::size_t detected = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto out = sim.run_round(t);
    for (std::size_t r = 0; r < out.participants.size() && !out.reward_share.empty(); ++r) {
      if (sim.profiles()[out.participants[r]].clique == 0) ledger.revenue += out.reward_share[r] * econ.reward_per_round;
    }
    bool flagged = false;
    for (auto i : clique) {
      for (auto j : clique) {
        if (i == j) continue;
        const auto c = sim.actionable_support(i, j);
        if (c && *c > tau) flagged = true;
      }
    }
    detected += flagged ? 1 : 0;
    const double f_detected = static_cast<double>(detected) / static_cast<double>(t + 1);
    ledger.cost_slashing += kd * econ.r_initial * econ.alpha_slash * f_detected;
  }
  ledger.cost_entry = kd * econ.c_test * static_cast<double>(econ.n_tests);
  ledger.cost_operation = kd * econ.c_inference * static_cast<double>(horizon);
  ledger.net = ledger.revenue - ledger.cost_entry - ledger.cost_operation - ledger.cost_slashing;
  ledger.profitable = ledger.net > 0.0;
  ledger.detected_fraction = horizon ? static_cast<double>(detected) / static_cast<double>(horizon) : 0.0;
  return ledger;
}

std::vector<SybilLedger> sweep_sybil(std::span<const std::size_t> ks, std::span<const double> lambdas,
                                     std::size_t horizon, const EconomicParams& econ, const SybilParams& params,
                                     const sim::SwarmConfig& swarm) {
  std::vector<SybilLedger> out(ks.size() * lambdas.size());
  parallel_for(out.size(), [&](std::size_t task) {
    SybilParams p = params;
    p.lambda = lambdas[task % lambdas.size()];
    out[task] = simulate_sybil_economics(ks[task / lambdas.size()], horizon, econ, p, swarm);
  });
  return out;
}

void write_sybil_csv(std::ostream& out, std::span<const SybilLedger> rows) {
  out << "k,lambda,rounds,revenue,cost_entry,cost_operation,cost_slashing,net,profitable\n";
  for (const auto& r : rows) {
    out << r.k << ',' << format_double(r.lambda) << ',' << r.rounds << ',' << format_double(r.revenue) << ','
        << format_double(r.cost_entry) << ',' << format_double(r.cost_operation) << ','
        << format_double(r.cost_slashing) << ',' << format_double(r.net) << ',' << (r.profitable ? "true" : "false")
        << '\n';
  }
}

}  // namespace swarmlab::sybil
