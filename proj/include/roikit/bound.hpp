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
#include "roikit/roi.hpp"
#include "roikit/seesaw.hpp"
#include "roikit/task.hpp"

namespace roikit {

// Verdict of the incompatibility-advantage chain on one task: every local
// (or one-way adaptive) strategy with the given sets is dominated by
//   prod_i (1 + I_i) * [best parent-guessing value],
// because each effect is dominated by its scaled-parent post-processing,
// PSD domination survives tensor products against PSD coefficients, and the
// composite post-processing is absorbed into the parent guess. A small
// additive margin covers solver residue in the certificates.
struct BoundReport {
  static constexpr double margin = 1e-7;

  int parties = 0;
  std::vector<double> roi;      // certified I_i per party
  double product = 1.0;         // prod_i (1 + I_i)
  double parent_guess = 0.0;    // guessing value of the certificate parents
  double bound = 0.0;           // product * parent_guess + margin
  double p_lo = 0.0;
  bool has_locc1 = false;       // two parties only
  double p_locc1 = 0.0;
  bool has_seesaw = false;      // informational compatible baseline
  double seesaw_value = 0.0;
  double ratio_seesaw = 0.0;    // p_lo / seesaw_value
  bool pass = false;
};

struct BoundOptions {
  Tolerances tol{};
  Limits limits{};
  bool run_seesaw = true;  // two parties only; ignored otherwise
  int seesaw_restarts = 4;
  std::uint64_t seed = 1;
};

inline BoundReport bound_report(const DiscriminationTask& task,
                                const std::vector<MeasurementSet>& sets,
                                const BoundOptions& opts = {}) {
  if (sets.size() != task.party_dims.size())
    throw SchemaError("bound_report: one measurement set per party required");
  task.validate(opts.tol);

  BoundReport rep;
  rep.parties = static_cast<int>(sets.size());

  std::vector<Povm> parents;
  std::vector<int> parent_sizes;
  for (const MeasurementSet& set : sets) {
    const RoiCertificate cert = compute_roi(set, opts.tol, opts.limits);
    rep.roi.push_back(cert.roi);
    rep.product *= 1.0 + cert.roi;
    parents.push_back(certificate_parent(cert));
    parent_sizes.push_back(static_cast<int>(cert.strings.size()));
  }

  rep.parent_guess = psg_parents_n(task, parents);
  rep.bound = rep.product * rep.parent_guess + BoundReport::margin;
  rep.p_lo = psg_best_lo_n(task, sets).value;

  if (rep.parties == 2) {
    rep.has_locc1 = true;
    rep.p_locc1 = psg_best_locc1(task, sets[0], sets[1]).value;
    if (opts.run_seesaw) {
      SeesawOptions sopts;
      sopts.tol = opts.tol;
      sopts.warm_start = parents;
      const SeesawResult ss = psg_compatible_seesaw(
          task, parent_sizes[0], parent_sizes[1], opts.seesaw_restarts, opts.seed, sopts);
      rep.has_seesaw = true;
      rep.seesaw_value = ss.value;
      rep.ratio_seesaw = ss.value > 0.0 ? rep.p_lo / ss.value : 0.0;
    }
  }

  rep.pass = rep.p_lo <= rep.bound && (!rep.has_locc1 || rep.p_locc1 <= rep.bound);
  return rep;
}

}  // namespace roikit
