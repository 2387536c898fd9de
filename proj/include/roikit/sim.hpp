//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/psg.hpp"
#include "roikit/rng.hpp"
#include "roikit/task.hpp"

namespace roikit {

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double empirical_rate = 0.0;
  double std_error = 0.0;
};

namespace sim_detail {

// CDF inversion over a nonnegative weight vector. Weights may miss exact
// normalization by solver noise; sampling against the running total keeps
// the draw a distribution regardless.
inline int sample_index(double u, const std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) total += std::max(x, 0.0);
  double acc = 0.0;
  const double target = u * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += std::max(w[i], 0.0);
    if (target < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

inline SimulationResult finish(std::uint64_t trials, std::uint64_t successes) {
  SimulationResult res;
  res.trials = trials;
  res.successes = successes;
  res.empirical_rate = trials ? static_cast<double>(successes) / trials : 0.0;
  res.std_error =
      trials ? std::sqrt(res.empirical_rate * (1.0 - res.empirical_rate) / trials) : 0.0;
  return res;
}

}  // namespace sim_detail

// Plays the guessing game by sampling: ensemble, state, measurement
// choices, joint outcome from the Born weights, then the guess. Counts a
// success when the announced label equals the drawn state.
inline SimulationResult simulate_game(const DiscriminationTask& task,
                                      const MeasurementSet& ma, const MeasurementSet& mb,
                                      const StrategyLO& strat, std::uint64_t trials,
                                      std::uint64_t seed) {
  validate_strategy(task, ma, mb, strat);
  const BornTensor born(task, {ma, mb});
  CounterRng rng(seed);

  std::vector<double> priors;
  for (const Ensemble& e : task.ensembles) priors.push_back(e.prior);

  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const int y = sim_detail::sample_index(rng.uniform(), priors);
    const Ensemble& ens = task.ensembles[y];
    std::vector<double> weights;
    for (const WeightedState& ws : ens.states) weights.push_back(ws.weight);
    const int b = sim_detail::sample_index(rng.uniform(), weights);
    const int k = sim_detail::sample_index(rng.uniform(), strat.choose_a[y]);
    const int l = sim_detail::sample_index(rng.uniform(), strat.choose_b[y]);
    const int kf = born.flatten_choice({k, l});
    const int nd = born.outcome_radix(kf)[1];
    std::vector<double> joint(born.n_outcomes(kf));
    for (int cf = 0; cf < born.n_outcomes(kf); ++cf) joint[cf] = born.at(y, kf, b, cf);
    const int cf = sim_detail::sample_index(rng.uniform(), joint);
    const auto [c, d] = unpair_index(cf, nd);
    const int g = sim_detail::sample_index(rng.uniform(), strat.guess[y][c][d]);
    if (g == b) ++successes;
  }
  return sim_detail::finish(trials, successes);
}

// One-way variant: party A's outcome is drawn from its marginal first, then
// party B picks its measurement from that outcome and the conditional joint
// outcome is drawn.
inline SimulationResult simulate_game(const DiscriminationTask& task,
                                      const MeasurementSet& ma, const MeasurementSet& mb,
                                      const StrategyLocc1& strat, std::uint64_t trials,
                                      std::uint64_t seed) {
  validate_strategy(task, ma, mb, strat);
  const BornTensor born(task, {ma, mb});
  CounterRng rng(seed);

  std::vector<double> priors;
  for (const Ensemble& e : task.ensembles) priors.push_back(e.prior);

  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const int y = sim_detail::sample_index(rng.uniform(), priors);
    const Ensemble& ens = task.ensembles[y];
    std::vector<double> weights;
    for (const WeightedState& ws : ens.states) weights.push_back(ws.weight);
    const int b = sim_detail::sample_index(rng.uniform(), weights);
    const int k = sim_detail::sample_index(rng.uniform(), strat.choose_a[y]);

    // Party A's marginal does not depend on the later choice of l.
    const int kf0 = born.flatten_choice({k, 0});
    const int nc = born.outcome_radix(kf0)[0];
    std::vector<double> marginal(nc, 0.0);
    for (int c = 0; c < nc; ++c)
      for (int d = 0; d < born.outcome_radix(kf0)[1]; ++d)
        marginal[c] += born.at(y, kf0, b, pair_index(c, d, born.outcome_radix(kf0)[1]));
    const int c = sim_detail::sample_index(rng.uniform(), marginal);

    const int l = sim_detail::sample_index(rng.uniform(), strat.choose_b[y][c]);
    const int kf = born.flatten_choice({k, l});
    const int nd = born.outcome_radix(kf)[1];
    std::vector<double> conditional(nd);
    for (int d = 0; d < nd; ++d) conditional[d] = born.at(y, kf, b, pair_index(c, d, nd));
    const int d = sim_detail::sample_index(rng.uniform(), conditional);
    const int g = sim_detail::sample_index(rng.uniform(), strat.guess[y][c][d]);
    if (g == b) ++successes;
  }
  return sim_detail::finish(trials, successes);
}

}  // namespace roikit
