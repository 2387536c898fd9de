//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/psg.hpp"
#include "roikit/rng.hpp"
#include "roikit/sdp_compile.hpp"
#include "roikit/sdp_problem.hpp"
#include "roikit/task.hpp"

namespace roikit {

// Alternating maximization of the compatible guessing value
//   sum_y q(y) sum_{lambda,nu} q(g(y,lambda,nu)|y) tr[rho (G_lambda (x) H_nu)]
// over one parent POVM per party and the guess assignment g. The value is
// linear in each parent with the other two blocks fixed, so each sweep
// solves two small SDPs and refreshes g by argmax; every block step is an
// exact maximization, which makes the sweep values non-decreasing. The
// result is a feasible strategy, hence a certified lower bound on the
// compatible optimum; it carries no optimality claim.

struct SeesawOptions {
  int max_iter = 200;
  double rel_tol = 1e-9;
  Tolerances tol{};
  // Initial parents for the first restart; later restarts draw random ones.
  std::vector<Povm> warm_start{};
};

struct SeesawResult {
  double value = 0.0;
  Povm parent_a;
  Povm parent_b;
  std::vector<std::vector<int>> assignment;  // [y][pair_index(lambda, nu)]
  int iterations = 0;                        // sweeps of the best restart
  std::vector<double> restart_values;
  std::vector<double> trace;                 // sweep values of the best restart
};

namespace seesaw_detail {

// q(b|y) tr[rho_{b|y} (G_lambda (x) H_nu)] for all labels; the argmax over b
// per (y, lambda, nu) is the refreshed assignment and the sum of row maxima
// the current objective.
struct SweepEval {
  double value = 0.0;
  std::vector<std::vector<int>> assignment;
};

inline SweepEval evaluate(const DiscriminationTask& task, const Povm& ga, const Povm& gb) {
  const BornTensor born(task, {MeasurementSet({ga}), MeasurementSet({gb})});
  const int width = gb.n_outcomes();
  SweepEval ev;
  ev.assignment.resize(task.n_ensembles());
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    ev.assignment[y].resize(ga.n_outcomes() * width);
    double vy = 0.0;
    for (int idx = 0; idx < ga.n_outcomes() * width; ++idx) {
      double best = -1.0;
      int arg = 0;
      for (std::size_t b = 0; b < ens.states.size(); ++b) {
        const double t = ens.states[b].weight * born.at(y, 0, static_cast<int>(b), idx);
        if (t > best) {
          best = t;
          arg = static_cast<int>(b);
        }
      }
      ev.assignment[y][idx] = arg;
      vy += best;
    }
    ev.value += ens.prior * vy;
  }
  return ev;
}

// maximize sum_lambda tr[G_lambda A_lambda] over POVMs {G_lambda}.
inline Povm best_povm(const std::vector<Cmat>& coeff, int dim, const Tolerances& tol) {
  SdpProblem p;
  for (std::size_t lam = 0; lam < coeff.size(); ++lam)
    p.add_psd_var("g" + std::to_string(lam), dim);
  SdpProblem::OpExpr completeness(dim);
  completeness.constant = -identity_c(dim);
  for (std::size_t lam = 0; lam < coeff.size(); ++lam)
    completeness.add(static_cast<int>(lam), 1.0);
  p.op_equalities.push_back(std::move(completeness));
  p.maximize = true;
  for (std::size_t lam = 0; lam < coeff.size(); ++lam)
    p.objective.add(static_cast<int>(lam), coeff[lam]);

  SolveOptions opt;
  opt.tol = tol;
  const SdpSolution sol = solve_sdp(p, opt);
  if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::inaccurate)
    throw SolverError("seesaw parent step failed: " + sol.message);
  Povm g;
  for (const Cmat& m : sol.psd_values) g.effects.emplace_back(m, 1e-8);
  return g;
}

// Coefficients of the party-A step: A_lambda collects the other party and
// the assignment, so that the objective is sum_lambda tr[G_lambda A_lambda].
inline std::vector<Cmat> party_a_coeff(const DiscriminationTask& task, const Povm& gb,
                                       const std::vector<std::vector<int>>& assignment,
                                       int n_a) {
  const int da = task.party_dims[0];
  const int db = task.party_dims[1];
  std::vector<Cmat> coeff(n_a, Cmat::Zero(da, da));
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    for (int lam = 0; lam < n_a; ++lam) {
      for (int nu = 0; nu < gb.n_outcomes(); ++nu) {
        const WeightedState& ws =
            ens.states[assignment[y][pair_index(lam, nu, gb.n_outcomes())]];
        const Cmat m = partial_trace_second(
            Cmat(kron(identity_c(da), gb.effects[nu].mat()) * ws.rho.mat()), da, db);
        coeff[lam] += ens.prior * ws.weight * 0.5 * (m + m.adjoint().eval());
      }
    }
  }
  return coeff;
}

inline std::vector<Cmat> party_b_coeff(const DiscriminationTask& task, const Povm& ga,
                                       const std::vector<std::vector<int>>& assignment,
                                       int n_b) {
  const int da = task.party_dims[0];
  const int db = task.party_dims[1];
  std::vector<Cmat> coeff(n_b, Cmat::Zero(db, db));
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    for (int nu = 0; nu < n_b; ++nu) {
      for (int lam = 0; lam < ga.n_outcomes(); ++lam) {
        const WeightedState& ws = ens.states[assignment[y][pair_index(lam, nu, n_b)]];
        const Cmat m = partial_trace_first(
            Cmat(kron(ga.effects[lam].mat(), identity_c(db)) * ws.rho.mat()), da, db);
        coeff[nu] += ens.prior * ws.weight * 0.5 * (m + m.adjoint().eval());
      }
    }
  }
  return coeff;
}

}  // namespace seesaw_detail

inline SeesawResult psg_compatible_seesaw(const DiscriminationTask& task, int n_parent_a,
                                          int n_parent_b, int restarts,
                                          std::uint64_t seed,
                                          const SeesawOptions& opts = {}) {
  if (task.n_parties() != 2)
    throw SchemaError("psg_compatible_seesaw: exactly two parties supported");
  if (n_parent_a < 1 || n_parent_b < 1 || restarts < 1)
    throw SchemaError("psg_compatible_seesaw: positive sizes and restarts required");
  task.validate(opts.tol);
  const int da = task.party_dims[0];
  const int db = task.party_dims[1];

  CounterRng rng(seed);
  SeesawResult best;
  best.value = -1.0;
  for (int r = 0; r < restarts; ++r) {
    Povm ga, gb;
    if (r == 0 && opts.warm_start.size() == 2) {
      ga = opts.warm_start[0];
      gb = opts.warm_start[1];
    } else {
      CounterRng sub = rng.fork(static_cast<std::uint64_t>(r));
      ga = random_povm(da, n_parent_a, sub);
      gb = random_povm(db, n_parent_b, sub);
    }

    std::vector<double> trace;
    seesaw_detail::SweepEval ev = seesaw_detail::evaluate(task, ga, gb);
    trace.push_back(ev.value);
    int iter = 1;
    for (; iter <= opts.max_iter; ++iter) {
      ga = seesaw_detail::best_povm(
          seesaw_detail::party_a_coeff(task, gb, ev.assignment, ga.n_outcomes()), da,
          opts.tol);
      gb = seesaw_detail::best_povm(
          seesaw_detail::party_b_coeff(task, ga, ev.assignment, gb.n_outcomes()), db,
          opts.tol);
      const seesaw_detail::SweepEval next = seesaw_detail::evaluate(task, ga, gb);
      const bool converged =
          next.value - ev.value <= opts.rel_tol * std::max(1.0, std::abs(next.value));
      ev = next;
      trace.push_back(ev.value);
      if (converged) break;
    }

    if (ev.value > best.value) {
      best.value = ev.value;
      best.parent_a = ga;
      best.parent_b = gb;
      best.assignment = ev.assignment;
      best.iterations = iter;
      best.trace = std::move(trace);
    }
    best.restart_values.push_back(ev.value);
  }
  return best;
}

}  // namespace roikit
