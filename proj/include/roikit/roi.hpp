//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/sdp_compile.hpp"

namespace roikit {

// Robustness of incompatibility. A set {M_{c|k}} is jointly measurable iff
// a single parent POVM {G_lambda} reproduces every M_{c|k} by classical
// post-processing, and it suffices to index lambda by deterministic outcome
// strings. The robustness I is the least amount r of arbitrary noise whose
// admixture (M + r*Lambda)/(1+r) makes the set jointly measurable.
//
// Scaled-parent program (value 1 + I):
//
//   min s   s.t.  sum_{strings} Gt_str = s*I,   Gt_str >= 0,
//                 sum_{str: str_k = c} Gt_str >= M_{c|k}  for all (k, c).
//
// Witness program (same value by conic duality):
//
//   max sum_{c,k} tr[w_{ck} M_{c|k}]   s.t.  w_{ck} >= 0,  tr[X] = 1,
//       X >= sum_k w_{str_k, k}  for every string.
//
// The two programs are built and solved independently; agreement of their
// values is a genuine numerical cross-check, not a tautology.

struct RoiPrimalResult {
  double value = 0.0;  // I = s - 1, clamped at zero
  double scale = 1.0;  // s
  std::vector<std::vector<int>> strings;
  std::vector<Cmat> parent;  // scaled parent Gt per string; sums to s*I
  SolveStatus status = SolveStatus::failed;
  int iterations = 0;
};

struct RoiDualResult {
  double value = 0.0;  // tr[sum w M] - 1
  std::vector<std::vector<Cmat>> w;  // w[k][c]
  Cmat x;
  SolveStatus status = SolveStatus::failed;
  int iterations = 0;
};

struct CertResiduals {
  double parent_min_eig = 0.0;
  double completeness = 0.0;       // |sum Gt - s*I| max entry
  double domination_min_eig = 0.0; // min eig of sum_{str_k=c} Gt - M over (k,c)
  double witness_min_eig = 0.0;
  double string_lmi_min_eig = 0.0; // min eig of X - sum_k w over strings
  double x_trace_err = 0.0;
  double scale_consistency = 0.0;  // |s - (1 + roi)|
  double gap = 0.0;
};

struct RoiCertificate {
  double roi = 0.0;
  double scale = 1.0;
  double primal_value = 1.0;
  double dual_value = 1.0;
  double gap = 0.0;
  std::vector<std::vector<int>> strings;
  std::vector<Cmat> parent;
  std::vector<std::vector<Cmat>> witness_w;
  Cmat witness_x;
  CertResiduals residuals;
};

class InaccurateCertificateError : public ValidationError {
 public:
  InaccurateCertificateError(double primal, double dual, double tol)
      : ValidationError("primal/dual disagreement " +
                        std::to_string(std::abs(primal - dual)) + " exceeds " +
                        std::to_string(tol) + " (primal " + std::to_string(primal) +
                        ", dual " + std::to_string(dual) + ")"),
        primal_value(primal),
        dual_value(dual) {}
  double primal_value;
  double dual_value;
};

inline SdpProblem build_roi_primal(const MeasurementSet& set,
                                   const std::vector<std::vector<int>>& strings) {
  const int d = set.dim();
  SdpProblem p;
  std::vector<int> gvar;
  gvar.reserve(strings.size());
  for (std::size_t s = 0; s < strings.size(); ++s)
    gvar.push_back(p.add_psd_var("Gt" + std::to_string(s), d));
  const int s_var = p.add_scalar_var("s");

  SdpProblem::OpExpr completeness(d);
  for (int g : gvar) completeness.add(g, 1.0);
  completeness.add_scalar(s_var, Cmat(-identity_c(d)));
  p.op_equalities.push_back(std::move(completeness));

  for (int k = 0; k < set.n_measurements(); ++k) {
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c) {
      SdpProblem::OpExpr dom(d);
      dom.constant = -set.effect(k, c);
      for (std::size_t s = 0; s < strings.size(); ++s)
        if (strings[s][k] == c) dom.add(gvar[s], 1.0);
      p.lmi_constraints.push_back(std::move(dom));
    }
  }
  p.objective.add_scalar(s_var, 1.0);
  p.maximize = false;
  return p;
}

inline SdpProblem build_roi_dual(const MeasurementSet& set,
                                 const std::vector<std::vector<int>>& strings) {
  const int d = set.dim();
  SdpProblem p;
  std::vector<std::vector<int>> wvar(set.n_measurements());
  for (int k = 0; k < set.n_measurements(); ++k) {
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c) {
      wvar[k].push_back(
          p.add_psd_var("w" + std::to_string(k) + "_" + std::to_string(c), d));
      p.objective.add(wvar[k][c], set.effect(k, c));
    }
  }
  const int x_var = p.add_psd_var("X", d);
  SdpProblem::LinFunc trace_one;
  trace_one.add(x_var, identity_c(d));
  trace_one.constant = -1.0;
  p.scalar_equalities.push_back(std::move(trace_one));

  for (const auto& str : strings) {
    SdpProblem::OpExpr lmi(d);
    lmi.add(x_var, 1.0);
    for (int k = 0; k < set.n_measurements(); ++k) lmi.add(wvar[k][str[k]], -1.0);
    p.lmi_constraints.push_back(std::move(lmi));
  }
  p.maximize = true;
  return p;
}

namespace roi_detail {

inline void require_valid(const MeasurementSet& set, const Tolerances& tol) {
  const auto violations = validate_set(set, tol);
  if (!violations.empty()) {
    throw ValidationError("measurement set fails validation: " +
                          std::to_string(violations.size()) + " violation(s), first: " +
                          violations.front().kind + " at povm " +
                          std::to_string(violations.front().povm));
  }
}

inline void require_solved(SolveStatus status, const std::string& which,
                           const std::string& message) {
  if (status != SolveStatus::optimal) {
    throw SolverError(which + " program did not reach optimality (" +
                      std::string(to_string(status)) +
                      (message.empty() ? "" : ": " + message) + ")");
  }
}

}  // namespace roi_detail

inline RoiPrimalResult roi_primal(const MeasurementSet& set, const Tolerances& tol = {},
                                  const Limits& limits = {}) {
  roi_detail::require_valid(set, tol);
  RoiPrimalResult out;
  out.strings = deterministic_strings(set.outcome_counts(), limits.max_strings);
  SdpProblem p = build_roi_primal(set, out.strings);
  SolveOptions opt;
  opt.tol = tol;
  SdpSolution sol = solve_sdp(p, opt);
  out.status = sol.status;
  out.iterations = sol.iterations;
  roi_detail::require_solved(sol.status, "scaled-parent", sol.message);
  out.scale = sol.scalar_values[0];
  const double raw = out.scale - 1.0;
  if (raw < -tol.clamp) {
    throw SolverError("scaled-parent program returned s = " + std::to_string(out.scale) +
                      " below 1 beyond the clamp window");
  }
  out.value = std::max(raw, 0.0);
  out.parent.assign(sol.psd_values.begin(),
                    sol.psd_values.begin() + static_cast<long>(out.strings.size()));
  return out;
}

inline RoiDualResult roi_dual(const MeasurementSet& set, const Tolerances& tol = {},
                              const Limits& limits = {}) {
  roi_detail::require_valid(set, tol);
  RoiDualResult out;
  const auto strings = deterministic_strings(set.outcome_counts(), limits.max_strings);
  SdpProblem p = build_roi_dual(set, strings);
  SolveOptions opt;
  opt.tol = tol;
  SdpSolution sol = solve_sdp(p, opt);
  out.status = sol.status;
  out.iterations = sol.iterations;
  roi_detail::require_solved(sol.status, "witness", sol.message);
  out.value = sol.objective - 1.0;
  out.w.resize(set.n_measurements());
  int idx = 0;
  for (int k = 0; k < set.n_measurements(); ++k)
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c)
      out.w[k].push_back(sol.psd_values[idx++]);
  out.x = sol.psd_values[idx];
  return out;
}

// Recomputes every certificate invariant from scratch against the set.
inline CertResiduals check_certificate(const RoiCertificate& cert,
                                       const MeasurementSet& set) {
  CertResiduals r;
  const int d = set.dim();

  double parent_min = std::numeric_limits<double>::infinity();
  Cmat sum = Cmat::Zero(d, d);
  for (const Cmat& g : cert.parent) {
    parent_min = std::min(parent_min, psd_residual(g));
    sum += g;
  }
  r.parent_min_eig = parent_min;
  r.completeness = (sum - cert.scale * identity_c(d)).cwiseAbs().maxCoeff();

  double dom_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < set.n_measurements(); ++k) {
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c) {
      Cmat acc = -set.effect(k, c);
      for (std::size_t s = 0; s < cert.strings.size(); ++s)
        if (cert.strings[s][k] == c) acc += cert.parent[s];
      dom_min = std::min(dom_min, psd_residual(acc));
    }
  }
  r.domination_min_eig = dom_min;

  double w_min = std::numeric_limits<double>::infinity();
  for (const auto& per_k : cert.witness_w)
    for (const Cmat& w : per_k) w_min = std::min(w_min, psd_residual(w));
  r.witness_min_eig = w_min;

  double lmi_min = std::numeric_limits<double>::infinity();
  for (const auto& str : cert.strings) {
    Cmat acc = cert.witness_x;
    for (int k = 0; k < set.n_measurements(); ++k) acc -= cert.witness_w[k][str[k]];
    lmi_min = std::min(lmi_min, psd_residual(acc));
  }
  r.string_lmi_min_eig = lmi_min;

  r.x_trace_err = std::abs(cert.witness_x.trace().real() - 1.0);
  r.scale_consistency = std::abs(cert.scale - (1.0 + cert.roi));
  r.gap = std::abs(cert.primal_value - cert.dual_value);
  return r;
}

inline bool certificate_ok(const CertResiduals& r, const Tolerances& tol) {
  const double solver_slack = 10.0 * tol.solver;
  return r.parent_min_eig >= -tol.psd && r.completeness <= solver_slack &&
         r.domination_min_eig >= -solver_slack && r.witness_min_eig >= -tol.psd &&
         r.string_lmi_min_eig >= -solver_slack && r.x_trace_err <= solver_slack &&
         r.scale_consistency <= tol.clamp && r.gap <= tol.gap;
}

inline RoiCertificate compute_roi(const MeasurementSet& set, const Tolerances& tol = {},
                                  const Limits& limits = {}) {
  RoiPrimalResult primal = roi_primal(set, tol, limits);
  RoiDualResult dual = roi_dual(set, tol, limits);

  RoiCertificate cert;
  cert.primal_value = primal.scale;
  cert.dual_value = dual.value + 1.0;
  cert.gap = std::abs(cert.primal_value - cert.dual_value);
  if (cert.gap > tol.gap) {
    throw InaccurateCertificateError(cert.primal_value, cert.dual_value, tol.gap);
  }
  cert.roi = primal.value;
  cert.scale = primal.scale;
  cert.strings = std::move(primal.strings);
  cert.parent = std::move(primal.parent);
  cert.witness_w = std::move(dual.w);
  cert.witness_x = std::move(dual.x);
  cert.residuals = check_certificate(cert, set);
  if (!certificate_ok(cert.residuals, tol)) {
    throw ValidationError(
        "certificate failed its invariants (parent min eig " +
        std::to_string(cert.residuals.parent_min_eig) + ", completeness " +
        std::to_string(cert.residuals.completeness) + ", domination " +
        std::to_string(cert.residuals.domination_min_eig) + ", witness min eig " +
        std::to_string(cert.residuals.witness_min_eig) + ", gap " +
        std::to_string(cert.residuals.gap) + ")");
  }
  return cert;
}

inline bool is_compatible(const MeasurementSet& set, const Tolerances& tol = {},
                          double threshold = 1e-6, const Limits& limits = {}) {
  return compute_roi(set, tol, limits).roi <= threshold;
}

// Normalized parent POVM of a certificate: the scaled parent divided by its
// completeness scale, one effect per deterministic string.
inline Povm certificate_parent(const RoiCertificate& cert) {
  Povm g;
  g.effects.reserve(cert.parent.size());
  for (const Cmat& gt : cert.parent) g.effects.emplace_back(Cmat(gt / cert.scale), 1e-8);
  return g;
}

struct NoiseDecomposition {
  MeasurementSet lambda;
  double r = 0.0;
  double completeness_residual = 0.0;
  double min_eig = 0.0;
  // max entrywise error of (M + r*Lambda)/(1+r) against the post-processed
  // normalized parent; zero up to rounding by construction.
  double reconstruction_residual = 0.0;
};

// Inverts the noisy-mixture relation: the scaled parent of an incompatible
// set encodes which noise Lambda, admixed with weight r = s - 1, lands the
// set exactly on the jointly measurable boundary.
inline NoiseDecomposition extract_noise(const MeasurementSet& set,
                                        const RoiCertificate& cert,
                                        const Tolerances& tol = {}) {
  const double r = cert.scale - 1.0;
  if (r <= tol.clamp) {
    throw ValidationError("extract_noise: set is compatible (r = " + std::to_string(r) +
                          "), no noise direction exists");
  }
  const int d = set.dim();
  NoiseDecomposition out;
  out.r = r;

  std::vector<Povm> povms;
  double min_eig = std::numeric_limits<double>::infinity();
  double completeness = 0.0;
  for (int k = 0; k < set.n_measurements(); ++k) {
    Povm p;
    Cmat sum = Cmat::Zero(d, d);
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c) {
      Cmat acc = -set.effect(k, c);
      for (std::size_t s = 0; s < cert.strings.size(); ++s)
        if (cert.strings[s][k] == c) acc += cert.parent[s];
      Cmat lam = acc / r;
      min_eig = std::min(min_eig, psd_residual(lam));
      sum += lam;
      p.effects.emplace_back(lam, tol.herm);
    }
    completeness = std::max(completeness, (sum - identity_c(d)).cwiseAbs().maxCoeff());
    povms.push_back(std::move(p));
  }
  out.lambda = MeasurementSet(std::move(povms));
  out.min_eig = min_eig;
  out.completeness_residual = completeness;

  // (M + r*Lambda)/(1+r) == sum_str D_str(c|k) * (Gt_str / s), entrywise.
  double recon = 0.0;
  for (int k = 0; k < set.n_measurements(); ++k) {
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c) {
      Cmat lhs = (set.effect(k, c) + r * out.lambda.effect(k, c)) / (1.0 + r);
      Cmat rhs = Cmat::Zero(d, d);
      for (std::size_t s = 0; s < cert.strings.size(); ++s)
        if (cert.strings[s][k] == c) rhs += cert.parent[s] / cert.scale;
      recon = std::max(recon, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  out.reconstruction_residual = recon;
  return out;
}

struct TensorRoiResult {
  RoiCertificate cert_a;
  RoiCertificate cert_b;
  RoiCertificate cert_ab;
  double residual = 0.0;  // |(1 + I_ab) - (1 + I_a)(1 + I_b)|
};

// Robustness is multiplicative under tensor products at the level of
// (1 + I); both sides are computed from their own programs and compared.
inline TensorRoiResult tensor_roi(const MeasurementSet& a, const MeasurementSet& b,
                                  const Tolerances& tol = {}, const Limits& limits = {}) {
  TensorRoiResult out;
  out.cert_a = compute_roi(a, tol, limits);
  out.cert_b = compute_roi(b, tol, limits);
  out.cert_ab = compute_roi(tensor_sets(a, b), tol, limits);
  out.residual = std::abs((1.0 + out.cert_ab.roi) -
                          (1.0 + out.cert_a.roi) * (1.0 + out.cert_b.roi));
  return out;
}

}  // namespace roikit
