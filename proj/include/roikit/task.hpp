//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/rng.hpp"

namespace roikit {

// Tr over the second factor of a bipartite operator on C^da (x) C^db.
inline Cmat partial_trace_second(const Cmat& m, int da, int db) {
  Cmat out = Cmat::Zero(da, da);
  for (int ia = 0; ia < da; ++ia)
    for (int ja = 0; ja < da; ++ja)
      for (int ib = 0; ib < db; ++ib) out(ia, ja) += m(ia * db + ib, ja * db + ib);
  return out;
}

inline Cmat partial_trace_first(const Cmat& m, int da, int db) {
  Cmat out = Cmat::Zero(db, db);
  for (int ib = 0; ib < db; ++ib)
    for (int jb = 0; jb < db; ++jb)
      for (int ia = 0; ia < da; ++ia) out(ib, jb) += m(ia * db + ib, ia * db + jb);
  return out;
}

// State-guessing task: an ensemble label y is drawn with prior q(y), then a
// state b inside that ensemble with weight q(b|y). States live on the
// tensor product of the parties' local spaces.
struct WeightedState {
  double weight = 0.0;
  HermitianOperator rho;
};

struct Ensemble {
  double prior = 0.0;
  std::vector<WeightedState> states;
};

struct DiscriminationTask {
  std::vector<int> party_dims;
  std::vector<Ensemble> ensembles;

  int n_parties() const { return static_cast<int>(party_dims.size()); }
  int n_ensembles() const { return static_cast<int>(ensembles.size()); }

  int total_dim() const {
    int d = 1;
    for (int pd : party_dims) d *= pd;
    return d;
  }

  void validate(const Tolerances& tol = {}) const {
    if (party_dims.empty() || ensembles.empty())
      throw SchemaError("DiscriminationTask: empty party_dims or ensembles");
    for (int pd : party_dims)
      if (pd < 2) throw SchemaError("DiscriminationTask: party dimension < 2");
    const int d = total_dim();
    double prior_sum = 0.0;
    for (std::size_t y = 0; y < ensembles.size(); ++y) {
      const Ensemble& e = ensembles[y];
      if (e.prior < -tol.row_stochastic)
        throw ValidationError("DiscriminationTask: negative prior at ensemble " +
                              std::to_string(y));
      prior_sum += e.prior;
      if (e.states.empty())
        throw SchemaError("DiscriminationTask: ensemble " + std::to_string(y) +
                          " has no states");
      double weight_sum = 0.0;
      for (std::size_t b = 0; b < e.states.size(); ++b) {
        const WeightedState& ws = e.states[b];
        if (ws.weight < -tol.row_stochastic)
          throw ValidationError("DiscriminationTask: negative weight at state " +
                                std::to_string(b) + " of ensemble " + std::to_string(y));
        weight_sum += ws.weight;
        if (ws.rho.dim() != d)
          throw SchemaError("DiscriminationTask: state dimension " +
                            std::to_string(ws.rho.dim()) + " != product dimension " +
                            std::to_string(d));
        if (psd_residual(ws.rho) < -tol.psd)
          throw ValidationError("DiscriminationTask: state is not PSD at ensemble " +
                                std::to_string(y));
        if (std::abs(ws.rho.mat().trace().real() - 1.0) > tol.row_stochastic)
          throw ValidationError("DiscriminationTask: state trace != 1 at ensemble " +
                                std::to_string(y));
      }
      if (std::abs(weight_sum - 1.0) > tol.row_stochastic)
        throw ValidationError("DiscriminationTask: weights of ensemble " +
                              std::to_string(y) + " sum to " +
                              std::to_string(weight_sum));
    }
    if (std::abs(prior_sum - 1.0) > tol.row_stochastic)
      throw ValidationError("DiscriminationTask: priors sum to " +
                            std::to_string(prior_sum));
  }
};

// Success probability of announcing the most likely state of each ensemble
// without measuring anything. Every measurement-assisted value must beat it.
inline double baseline_guess(const DiscriminationTask& task) {
  double value = 0.0;
  for (const Ensemble& e : task.ensembles) {
    double best = 0.0;
    for (const WeightedState& ws : e.states) best = std::max(best, ws.weight);
    value += e.prior * best;
  }
  return value;
}

inline DiscriminationTask random_task(const std::vector<int>& party_dims,
                                      int n_ensembles, int states_per_ensemble,
                                      std::uint64_t seed) {
  CounterRng rng(seed);
  DiscriminationTask task;
  task.party_dims = party_dims;
  int d = 1;
  for (int pd : party_dims) d *= pd;
  std::vector<double> priors(n_ensembles);
  double prior_sum = 0.0;
  for (double& p : priors) prior_sum += (p = rng.uniform() + 0.1);
  for (int y = 0; y < n_ensembles; ++y) {
    Ensemble e;
    e.prior = priors[y] / prior_sum;
    std::vector<double> weights(states_per_ensemble);
    double wsum = 0.0;
    for (double& w : weights) wsum += (w = rng.uniform() + 0.1);
    for (int b = 0; b < states_per_ensemble; ++b) {
      WeightedState ws;
      ws.weight = weights[b] / wsum;
      ws.rho = random_state(d, rng);
      e.states.push_back(std::move(ws));
    }
    task.ensembles.push_back(std::move(e));
  }
  return task;
}

}  // namespace roikit
