//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/povm.hpp"
#include "roikit/psg.hpp"
#include "roikit/rng.hpp"
#include "roikit/task.hpp"

// Reference optimizers by literal enumeration. Every deterministic strategy
// is generated digit by digit and evaluated from the Born terms with no
// exchange of maxima, so these are deliberately slow and structurally
// unrelated to the nested-max optimizers they check. The strategy count is
// computed in closed form up front and capped.

namespace roikit {

struct BruteForceLoResult {
  double value = -1.0;
  std::uint64_t n_strategies = 0;
  StrategyLoN strategy;
};

struct BruteForceLocc1Result {
  double value = -1.0;
  std::uint64_t n_strategies = 0;
  StrategyLocc1 strategy;
};

namespace oracle_detail {

// Mixed-radix counter; increment returns false after the last tuple.
struct MixedRadix {
  std::vector<int> radix;
  std::vector<int> digit;

  explicit MixedRadix(std::vector<int> r) : radix(std::move(r)), digit(radix.size(), 0) {}

  bool advance() {
    for (std::size_t i = digit.size(); i-- > 0;) {
      if (++digit[i] < radix[i]) return true;
      digit[i] = 0;
    }
    return false;
  }
};

inline void check_cap(double count, const Limits& limits, const char* what) {
  if (!(count <= static_cast<double>(limits.brute_force_cap)))
    throw ResourceError(std::string("brute force ") + what + ": " +
                        std::to_string(count) + " strategies exceed cap " +
                        std::to_string(limits.brute_force_cap));
}

}  // namespace oracle_detail

// Exhaustive n-party local optimum. Strategies are pairs of a choice
// function y -> (k_1..k_n) and a guess function over the reachable joint
// outcomes; there are prod_y sum_kf B_y^{n_out(kf)} of them.
inline BruteForceLoResult brute_force_lo(const DiscriminationTask& task,
                                         const std::vector<MeasurementSet>& sets,
                                         const Limits& limits = {}) {
  const BornTensor born(task, sets);
  const int ny = task.n_ensembles();

  double count = 1.0;
  for (int y = 0; y < ny; ++y) {
    const double nb = static_cast<double>(task.ensembles[y].states.size());
    double per_y = 0.0;
    for (int kf = 0; kf < born.n_choices(); ++kf)
      per_y += std::pow(nb, born.n_outcomes(kf));
    count *= per_y;
  }
  oracle_detail::check_cap(count, limits, "LO");

  BruteForceLoResult res;
  oracle_detail::MixedRadix choices(std::vector<int>(ny, born.n_choices()));
  do {
    // Guess cells for this choice function, flattened over (y, joint outcome).
    std::vector<int> cell_radix;
    std::vector<int> cell_offset(ny);
    for (int y = 0; y < ny; ++y) {
      cell_offset[y] = static_cast<int>(cell_radix.size());
      const int nb = static_cast<int>(task.ensembles[y].states.size());
      cell_radix.insert(cell_radix.end(), born.n_outcomes(choices.digit[y]), nb);
    }
    oracle_detail::MixedRadix guesses(cell_radix);
    do {
      double value = 0.0;
      for (int y = 0; y < ny; ++y) {
        const Ensemble& ens = task.ensembles[y];
        const int kf = choices.digit[y];
        double vy = 0.0;
        for (int cf = 0; cf < born.n_outcomes(kf); ++cf) {
          const int b = guesses.digit[cell_offset[y] + cf];
          vy += ens.states[b].weight * born.at(y, kf, b, cf);
        }
        value += ens.prior * vy;
      }
      ++res.n_strategies;
      if (value > res.value) {
        res.value = value;
        res.strategy.choice.assign(born.n_parties(), std::vector<int>(ny));
        res.strategy.guess.assign(ny, {});
        for (int y = 0; y < ny; ++y) {
          const std::vector<int> ks = born.unflatten_choice(choices.digit[y]);
          for (int i = 0; i < born.n_parties(); ++i) res.strategy.choice[i][y] = ks[i];
          res.strategy.guess[y].assign(
              guesses.digit.begin() + cell_offset[y],
              guesses.digit.begin() + cell_offset[y] + born.n_outcomes(choices.digit[y]));
        }
      }
    } while (guesses.advance());
  } while (choices.advance());
  return res;
}

// Exhaustive one-way adaptive optimum for two parties. For each choice
// function y -> k, party B's table is a function (y, c) -> l and the guess a
// function (y, c, d) -> b with d ranging in the outcomes of l(y, c).
inline BruteForceLocc1Result brute_force_locc1(const DiscriminationTask& task,
                                               const MeasurementSet& ma,
                                               const MeasurementSet& mb,
                                               const Limits& limits = {}) {
  const BornTensor born(task, {ma, mb});
  const int ny = task.n_ensembles();
  const int nk = ma.n_measurements();
  const int nl = mb.n_measurements();

  double count = 1.0;
  for (int y = 0; y < ny; ++y) {
    const double nb = static_cast<double>(task.ensembles[y].states.size());
    double inner_l = 0.0;
    for (int l = 0; l < nl; ++l) inner_l += std::pow(nb, mb.povm(l).n_outcomes());
    double per_y = 0.0;
    for (int k = 0; k < nk; ++k) per_y += std::pow(inner_l, ma.povm(k).n_outcomes());
    count *= per_y;
  }
  oracle_detail::check_cap(count, limits, "LOCC1");

  BruteForceLocc1Result res;
  oracle_detail::MixedRadix k_table(std::vector<int>(ny, nk));
  do {
    // Party B cells (y, c) for the current k-table.
    std::vector<int> l_offset(ny);
    std::vector<int> l_radix;
    for (int y = 0; y < ny; ++y) {
      l_offset[y] = static_cast<int>(l_radix.size());
      l_radix.insert(l_radix.end(), ma.povm(k_table.digit[y]).n_outcomes(), nl);
    }
    oracle_detail::MixedRadix l_assign(l_radix);
    do {
      // Guess cells (y, c, d); d ranges in the outcomes of the assigned l.
      std::vector<int> g_radix;
      std::vector<std::vector<int>> g_offset(ny);
      for (int y = 0; y < ny; ++y) {
        const int nb = static_cast<int>(task.ensembles[y].states.size());
        const int nc = ma.povm(k_table.digit[y]).n_outcomes();
        g_offset[y].resize(nc);
        for (int c = 0; c < nc; ++c) {
          g_offset[y][c] = static_cast<int>(g_radix.size());
          const int l = l_assign.digit[l_offset[y] + c];
          g_radix.insert(g_radix.end(), mb.povm(l).n_outcomes(), nb);
        }
      }
      oracle_detail::MixedRadix guesses(g_radix);
      do {
        double value = 0.0;
        for (int y = 0; y < ny; ++y) {
          const Ensemble& ens = task.ensembles[y];
          const int k = k_table.digit[y];
          const int nc = ma.povm(k).n_outcomes();
          double vy = 0.0;
          for (int c = 0; c < nc; ++c) {
            const int l = l_assign.digit[l_offset[y] + c];
            const int kf = born.flatten_choice({k, l});
            const int nd = mb.povm(l).n_outcomes();
            for (int d = 0; d < nd; ++d) {
              const int b = guesses.digit[g_offset[y][c] + d];
              vy += ens.states[b].weight * born.at(y, kf, b, pair_index(c, d, nd));
            }
          }
          value += ens.prior * vy;
        }
        ++res.n_strategies;
        if (value > res.value) {
          res.value = value;
          res.strategy.choose_a.assign(ny, {});
          res.strategy.choose_b.assign(ny, {});
          res.strategy.guess.assign(ny, {});
          for (int y = 0; y < ny; ++y) {
            const int k = k_table.digit[y];
            const int nb = static_cast<int>(task.ensembles[y].states.size());
            res.strategy.choose_a[y] = psg_detail::delta_row(nk, k);
            const int nc = ma.povm(k).n_outcomes();
            res.strategy.choose_b[y].resize(nc);
            res.strategy.guess[y].resize(nc);
            for (int c = 0; c < nc; ++c) {
              const int l = l_assign.digit[l_offset[y] + c];
              res.strategy.choose_b[y][c] = psg_detail::delta_row(nl, l);
              const int nd = mb.povm(l).n_outcomes();
              res.strategy.guess[y][c].resize(nd);
              for (int d = 0; d < nd; ++d)
                res.strategy.guess[y][c][d] =
                    psg_detail::delta_row(nb, guesses.digit[g_offset[y][c] + d]);
            }
          }
        }
      } while (guesses.advance());
    } while (l_assign.advance());
  } while (k_table.advance());
  return res;
}

// Compatible by construction: a random parent POVM pushed through a random
// row-stochastic response. The robustness of the result is zero up to
// solver tolerance, which makes these sets ground truth for soundness runs.
inline MeasurementSet random_compatible_set(int dim, int n_meas, int n_out,
                                            int parent_out, std::uint64_t seed) {
  if (dim < 2 || n_meas < 1 || n_out < 1 || parent_out < 1)
    throw SchemaError("random_compatible_set: positive arguments required");
  CounterRng rng(seed);
  const Povm parent = random_povm(dim, parent_out, rng);
  ResponseTable table;
  table.entries.resize(n_meas);
  for (int k = 0; k < n_meas; ++k) {
    table.entries[k].resize(parent_out);
    for (int lam = 0; lam < parent_out; ++lam) {
      std::vector<double> row(n_out);
      double sum = 0.0;
      for (double& x : row) sum += (x = rng.uniform() + 1e-3);
      for (double& x : row) x /= sum;
      table.entries[k][lam] = std::move(row);
    }
  }
  return apply_parent(parent, table);
}

}  // namespace roikit
