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
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/psg.hpp"
#include "roikit/roi.hpp"
#include "roikit/seesaw.hpp"
#include "roikit/task.hpp"

namespace roikit {

// Bound-achieving discrimination task assembled from two dual witnesses.
// Ensembles are indexed by measurement pairs (k, l), states by outcome
// pairs (c, d), with
//   q(cd, kl) = tr[w_ck] tr[z_dl] / (M* N*),   rho = (w_ck (x) z_dl) / traces,
//   M* = sum tr[w_ck],                         N* = sum tr[z_dl].
// Playing the matching measurements and echoing the outcomes then wins with
// probability (1+I_M)(1+I_N)/(M* N*), while no compatible pair of sets can
// exceed 1/(M* N*), so the advantage ratio meets the product bound exactly.
struct OptimalTaskBundle {
  DiscriminationTask task;
  double m_star = 0.0;
  double n_star = 0.0;
  std::vector<std::pair<int, int>> ensemble_labels;               // y -> (k, l)
  std::vector<std::vector<std::pair<int, int>>> state_labels;     // y, b -> (c, d)
  double dropped_mass = 0.0;  // joint weight of zero-trace labels, removed
};

namespace construct_detail {

struct Factor {
  // Per measurement k: total mass [k] and per-outcome traces [k][c].
  std::vector<double> mass;
  std::vector<std::vector<double>> trace;
  double star = 0.0;  // sum of all traces
  int dim = 0;
};

inline Factor witness_factor(const RoiCertificate& cert, double zero_weight) {
  Factor f;
  f.mass.resize(cert.witness_w.size());
  f.trace.resize(cert.witness_w.size());
  for (std::size_t k = 0; k < cert.witness_w.size(); ++k) {
    f.trace[k].resize(cert.witness_w[k].size());
    for (std::size_t c = 0; c < cert.witness_w[k].size(); ++c) {
      f.dim = static_cast<int>(cert.witness_w[k][c].rows());
      double t = cert.witness_w[k][c].trace().real();
      if (t <= zero_weight) t = 0.0;
      f.trace[k][c] = t;
      f.mass[k] += t;
      f.star += t;
    }
  }
  return f;
}

}  // namespace construct_detail

inline OptimalTaskBundle build_optimal_task(const RoiCertificate& cert_a,
                                            const RoiCertificate& cert_b,
                                            const Tolerances& tol = {}) {
  const construct_detail::Factor fa =
      construct_detail::witness_factor(cert_a, tol.zero_weight);
  const construct_detail::Factor fb =
      construct_detail::witness_factor(cert_b, tol.zero_weight);
  if (fa.star <= 1e-12 || fb.star <= 1e-12)
    throw ValidationError("build_optimal_task: vanishing witness normalizer");

  OptimalTaskBundle bundle;
  bundle.m_star = fa.star;
  bundle.n_star = fb.star;
  bundle.task.party_dims = {fa.dim, fb.dim};

  // Joint mass of labels kept after the zero-weight cut; the remainder is
  // reported and renormalized away.
  double kept = 0.0;
  for (std::size_t k = 0; k < fa.trace.size(); ++k)
    for (std::size_t l = 0; l < fb.trace.size(); ++l)
      for (double tw : fa.trace[k])
        for (double tz : fb.trace[l])
          if (tw > 0.0 && tz > 0.0) kept += tw * tz / (fa.star * fb.star);
  bundle.dropped_mass = 1.0 - kept;

  for (std::size_t k = 0; k < fa.trace.size(); ++k) {
    for (std::size_t l = 0; l < fb.trace.size(); ++l) {
      const double pair_mass = fa.mass[k] * fb.mass[l] / (fa.star * fb.star);
      if (pair_mass <= tol.zero_weight) continue;
      Ensemble ens;
      ens.prior = pair_mass / kept;
      std::vector<std::pair<int, int>> labels;
      for (std::size_t c = 0; c < fa.trace[k].size(); ++c) {
        for (std::size_t d = 0; d < fb.trace[l].size(); ++d) {
          const double tw = fa.trace[k][c];
          const double tz = fb.trace[l][d];
          if (tw <= 0.0 || tz <= 0.0) continue;
          WeightedState ws;
          ws.weight = tw * tz / (fa.mass[k] * fb.mass[l]);
          ws.rho = HermitianOperator(
              Cmat(kron(cert_a.witness_w[k][c], cert_b.witness_w[l][d]) / (tw * tz)),
              1e-8);
          ens.states.push_back(std::move(ws));
          labels.emplace_back(static_cast<int>(c), static_cast<int>(d));
        }
      }
      bundle.task.ensembles.push_back(std::move(ens));
      bundle.ensemble_labels.emplace_back(static_cast<int>(k), static_cast<int>(l));
      bundle.state_labels.push_back(std::move(labels));
    }
  }
  bundle.task.validate(tol);
  return bundle;
}

// One party's factor ensembles: q(k) = mass_k / M*, q(c|k) = tr[w_ck]/mass_k,
// rho_{c|k} = w_ck / tr[w_ck]. The two-party task is their product.
inline DiscriminationTask single_party_factors(const RoiCertificate& cert,
                                               const Tolerances& tol = {}) {
  const construct_detail::Factor f =
      construct_detail::witness_factor(cert, tol.zero_weight);
  if (f.star <= 1e-12)
    throw ValidationError("single_party_factors: vanishing witness normalizer");

  double kept = 0.0;
  for (std::size_t k = 0; k < f.trace.size(); ++k)
    if (f.mass[k] > tol.zero_weight) kept += f.mass[k] / f.star;

  DiscriminationTask task;
  task.party_dims = {f.dim};
  for (std::size_t k = 0; k < f.trace.size(); ++k) {
    if (f.mass[k] <= tol.zero_weight) continue;
    Ensemble ens;
    ens.prior = f.mass[k] / (f.star * kept);
    for (std::size_t c = 0; c < f.trace[k].size(); ++c) {
      if (f.trace[k][c] <= 0.0) continue;
      WeightedState ws;
      ws.weight = f.trace[k][c] / f.mass[k];
      ws.rho =
          HermitianOperator(Cmat(cert.witness_w[k][c] / f.trace[k][c]), 1e-8);
      ens.states.push_back(std::move(ws));
    }
    task.ensembles.push_back(std::move(ens));
  }
  task.validate(tol);
  return task;
}

// The echo strategy: play the ensemble's own measurement pair and announce
// the observed outcome pair. Outcome pairs whose label was dropped guess
// the first state; they carry at most the dropped mass.
inline StrategyLO identity_strategy(const OptimalTaskBundle& bundle,
                                    const MeasurementSet& ma, const MeasurementSet& mb) {
  StrategyLO s;
  const int ny = bundle.task.n_ensembles();
  s.choose_a.resize(ny);
  s.choose_b.resize(ny);
  s.guess.resize(ny);
  for (int y = 0; y < ny; ++y) {
    const auto [k, l] = bundle.ensemble_labels[y];
    s.choose_a[y] = psg_detail::delta_row(ma.n_measurements(), k);
    s.choose_b[y] = psg_detail::delta_row(mb.n_measurements(), l);
    const int nc = ma.povm(k).n_outcomes();
    const int nd = mb.povm(l).n_outcomes();
    const int nb = static_cast<int>(bundle.task.ensembles[y].states.size());
    s.guess[y].assign(nc, std::vector<std::vector<double>>(nd));
    for (int c = 0; c < nc; ++c)
      for (int d = 0; d < nd; ++d) s.guess[y][c][d] = psg_detail::delta_row(nb, 0);
    for (int b = 0; b < nb; ++b) {
      const auto [c, d] = bundle.state_labels[y][b];
      s.guess[y][c][d] = psg_detail::delta_row(nb, b);
    }
  }
  return s;
}

// End-to-end achievability audit of a constructed task. The four checks and
// their tolerances:
//   1. the echo strategy attains (1+I_M)(1+I_N)/(M* N*)  (1e-6);
//   2. the local optimum equals that same value           (1e-6);
//   3. the see-saw baseline reaches 1/(M* N*) from below  (-1e-4 / +1e-6);
//   4. the advantage ratio equals (1+I_M)(1+I_N)          (1e-4).
// The ratio divides the local optimum by the exact compatible value
// 1/(M* N*); the see-saw estimate is reported alongside, not in the ratio.
struct AchievabilityReport {
  double target = 0.0;         // (1+I_M)(1+I_N)/(M* N*)
  double identity_play = 0.0;  // echo strategy value
  double lo_value = 0.0;
  double compat_target = 0.0;  // 1/(M* N*)
  double seesaw_value = 0.0;
  int seesaw_restarts = 0;
  double ratio = 0.0;          // lo_value * M* * N*
  double ratio_target = 0.0;   // (1+I_M)(1+I_N)
  double dropped_mass = 0.0;
  bool identity_ok = false;
  bool lo_ok = false;
  bool seesaw_ok = false;
  bool ratio_ok = false;
  bool pass = false;
};

struct AchievabilityOptions {
  int restarts = 20;
  std::uint64_t seed = 7;
  Tolerances tol{};
};

inline AchievabilityReport verify_achievability(const OptimalTaskBundle& bundle,
                                                const MeasurementSet& ma,
                                                const MeasurementSet& mb,
                                                const RoiCertificate& cert_a,
                                                const RoiCertificate& cert_b,
                                                const AchievabilityOptions& opts = {}) {
  AchievabilityReport rep;
  const double stars = bundle.m_star * bundle.n_star;
  rep.ratio_target = cert_a.dual_value * cert_b.dual_value;
  rep.target = rep.ratio_target / stars;
  rep.compat_target = 1.0 / stars;
  rep.dropped_mass = bundle.dropped_mass;

  rep.identity_play = psg_fixed(bundle.task, ma, mb, identity_strategy(bundle, ma, mb));
  rep.lo_value = psg_best_lo(bundle.task, ma, mb).value;
  rep.ratio = rep.lo_value * stars;

  SeesawOptions sopts;
  sopts.tol = opts.tol;
  sopts.warm_start = {certificate_parent(cert_a), certificate_parent(cert_b)};
  const SeesawResult ss = psg_compatible_seesaw(
      bundle.task, static_cast<int>(cert_a.strings.size()),
      static_cast<int>(cert_b.strings.size()), opts.restarts, opts.seed, sopts);
  rep.seesaw_value = ss.value;
  rep.seesaw_restarts = opts.restarts;

  rep.identity_ok = std::abs(rep.identity_play - rep.target) <= 1e-6;
  rep.lo_ok = std::abs(rep.lo_value - rep.target) <= 1e-6;
  rep.seesaw_ok = rep.seesaw_value >= rep.compat_target - 1e-4 &&
                  rep.seesaw_value <= rep.compat_target + 1e-6;
  rep.ratio_ok = std::abs(rep.ratio - rep.ratio_target) <= 1e-4;
  rep.pass = rep.identity_ok && rep.lo_ok && rep.seesaw_ok && rep.ratio_ok;
  return rep;
}

}  // namespace roikit
