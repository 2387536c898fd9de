//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/sdp_ipm.hpp"
#include "roikit/sdp_problem.hpp"

namespace roikit {

struct SolveOptions {
  Tolerances tol{};
  // automatic picks the compilation with the smaller Schur complement.
  enum class Form { automatic, primal, dual } form = Form::automatic;
  int max_iter = 200;
};

namespace sdp_detail {

// Coordinates of the full variable vector: each Hermitian variable
// contributes dim^2 real coordinates (diagonal entries, then Re/Im pairs,
// in hermitian_basis order), each scalar one coordinate.
struct CoordLayout {
  std::vector<int> var_offset;
  std::vector<int> scalar_offset;
  int total = 0;
};

inline CoordLayout make_layout(const SdpProblem& p) {
  CoordLayout lay;
  for (const auto& v : p.psd_vars) {
    lay.var_offset.push_back(lay.total);
    lay.total += v.dim * v.dim;
  }
  for (std::size_t u = 0; u < p.scalar_vars.size(); ++u) {
    lay.scalar_offset.push_back(lay.total);
    lay.total += 1;
  }
  return lay;
}

// <B_alpha, H> = w_alpha * coord_alpha(H): 1 on diagonal coordinates, 2 on
// off-diagonal ones.
inline Rvec hermitian_weights(int d) {
  Rvec w(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      if (i == j) {
        w(idx++) = 1.0;
      } else {
        w(idx++) = 2.0;
        w(idx++) = 2.0;
      }
    }
  return w;
}

// ---------------------------------------------------------------------
// Form "primal": user variables become cone blocks, every constraint
// becomes equality rows against the Hermitian basis functionals, LMIs get
// slack blocks. Matches (P) of the backend pair.
// ---------------------------------------------------------------------

struct PrimalLowering {
  sdp::BlockProblem bp;
  std::vector<int> var_block;
  std::vector<int> scalar_block;
  std::vector<int> scalar_neg_block;  // -1 unless the scalar is Free
  int n_rows = 0;
};

inline PrimalLowering lower_primal(const SdpProblem& p) {
  PrimalLowering low;
  auto& bp = low.bp;

  auto add_matrix_block = [&](int cdim) {
    const int idx = static_cast<int>(bp.dims.size());
    bp.dims.push_back(2 * cdim);
    std::vector<Rmat> gens;
    for (const Cmat& basis : hermitian_basis(cdim)) gens.push_back(0.5 * realify(basis));
    bp.gens.push_back(std::move(gens));
    bp.C.emplace_back(Rmat::Zero(2 * cdim, 2 * cdim));
    return idx;
  };
  auto add_unit_block = [&]() {
    const int idx = static_cast<int>(bp.dims.size());
    bp.dims.push_back(1);
    bp.gens.push_back({Rmat::Ones(1, 1)});
    bp.C.emplace_back(Rmat::Zero(1, 1));
    return idx;
  };

  for (const auto& v : p.psd_vars) low.var_block.push_back(add_matrix_block(v.dim));
  for (const auto& s : p.scalar_vars) {
    low.scalar_block.push_back(add_unit_block());
    low.scalar_neg_block.push_back(
        s.sign == SdpProblem::ScalarSign::Free ? add_unit_block() : -1);
  }

  const double obj_sign = p.maximize ? -1.0 : 1.0;
  for (auto& [t, k] : p.objective.mat_terms)
    bp.C[low.var_block[t]] += obj_sign * 0.5 * realify(k);
  for (auto& [u, c] : p.objective.scalar_terms) {
    bp.C[low.scalar_block[u]](0, 0) += obj_sign * c;
    if (low.scalar_neg_block[u] >= 0) bp.C[low.scalar_neg_block[u]](0, 0) -= obj_sign * c;
  }

  std::vector<double> bvals;
  auto add_scalar_entry = [&](std::vector<sdp::BlockProblem::Entry>& row, int u,
                              double coeff) {
    row.push_back({low.scalar_block[u], 0, coeff});
    if (low.scalar_neg_block[u] >= 0) row.push_back({low.scalar_neg_block[u], 0, -coeff});
  };

  // One row per Hermitian basis functional of an operator constraint; the
  // slack block index is < 0 for plain equalities.
  auto add_op_rows = [&](const SdpProblem::OpExpr& e, int slack_block) {
    const auto basis = hermitian_basis(e.dim);
    for (int a = 0; a < e.dim * e.dim; ++a) {
      std::vector<sdp::BlockProblem::Entry> row;
      for (auto& [t, coeff] : e.mat_terms) row.push_back({low.var_block[t], a, coeff});
      for (auto& [u, k] : e.scalar_terms) {
        const double c = frob_inner(basis[a], k);
        if (c != 0.0) add_scalar_entry(row, u, c);
      }
      if (slack_block >= 0) row.push_back({slack_block, a, -1.0});
      bp.rows.push_back(std::move(row));
      bvals.push_back(-frob_inner(basis[a], e.constant));
    }
  };

  for (const auto& e : p.op_equalities) add_op_rows(e, -1);
  for (const auto& f : p.scalar_equalities) {
    std::vector<sdp::BlockProblem::Entry> row;
    for (auto& [t, k] : f.mat_terms) {
      const Rvec coords = hermitian_coords(k);
      for (int a = 0; a < coords.size(); ++a)
        if (coords(a) != 0.0) row.push_back({low.var_block[t], a, coords(a)});
    }
    for (auto& [u, c] : f.scalar_terms) add_scalar_entry(row, u, c);
    bp.rows.push_back(std::move(row));
    bvals.push_back(-f.constant);
  }
  for (const auto& e : p.lmi_constraints) add_op_rows(e, add_matrix_block(e.dim));

  bp.b = Eigen::Map<Rvec>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
  low.n_rows = static_cast<int>(bp.rows.size());
  return low;
}

// ---------------------------------------------------------------------
// Form "dual": user variables become coordinates of the backend dual
// vector y, equalities are eliminated by an affine reparametrization
// y = y0 + N u, and every cone requirement (variable PSDness, scalar signs,
// LMIs) becomes one block of the single dual LMI. Matches (D) of the
// backend pair, with A_j = -F_j and C = F(y0).
// ---------------------------------------------------------------------

struct SparseCol {
  std::vector<std::pair<int, double>> nz;  // (coordinate, value)
};

struct EqElimination {
  bool consistent = true;
  double residual = 0.0;
  Rvec y0;
  std::vector<SparseCol> null_cols;
};

// Gauss-Jordan elimination with full pivoting. Returns a particular
// solution and a sparse basis of the nullspace: each free coordinate maps
// to itself plus back-substituted pivot coordinates, so downstream row
// construction stays sparse.
inline EqElimination eliminate_equalities(Rmat e, Rvec g, int n_coords) {
  EqElimination out;
  const int m = static_cast<int>(e.rows());
  out.y0 = Rvec::Zero(n_coords);
  const double scale = m > 0 ? std::max(1.0, e.cwiseAbs().maxCoeff()) : 1.0;
  const double tol = 1e-11 * scale;

  std::vector<bool> col_used(n_coords, false);
  std::vector<std::pair<int, int>> pivots;  // (row, col)
  int r = 0;
  while (r < m) {
    int pi = -1, pj = -1;
    double best = tol;
    for (int i = r; i < m; ++i) {
      for (int j = 0; j < n_coords; ++j) {
        if (col_used[j]) continue;
        const double v = std::abs(e(i, j));
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    }
    if (pi < 0) break;
    e.row(r).swap(e.row(pi));
    std::swap(g(r), g(pi));
    const double piv = e(r, pj);
    e.row(r) /= piv;
    g(r) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = e(i, pj);
      if (f != 0.0) {
        e.row(i) -= f * e.row(r);
        g(i) -= f * g(r);
      }
    }
    col_used[pj] = true;
    pivots.emplace_back(r, pj);
    ++r;
  }
  for (int i = r; i < m; ++i) out.residual = std::max(out.residual, std::abs(g(i)));
  if (out.residual > 1e-9 * std::max(1.0, g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0))
    out.consistent = false;

  for (auto& [row, col] : pivots) out.y0(col) = g(row);
  for (int f = 0; f < n_coords; ++f) {
    if (col_used[f]) continue;
    SparseCol col;
    col.nz.emplace_back(f, 1.0);
    for (auto& [row, pcol] : pivots) {
      const double v = e(row, f);
      if (std::abs(v) > tol * 1e-2) col.nz.emplace_back(pcol, -v);
    }
    out.null_cols.push_back(std::move(col));
  }
  return out;
}

struct DualLowering {
  sdp::BlockProblem bp;
  CoordLayout layout;
  EqElimination elim;
};

// Linear coefficient vector of a LinFunc over the coordinate layout.
inline Rvec linfunc_coefficients(const SdpProblem& p, const CoordLayout& lay,
                                 const SdpProblem::LinFunc& f) {
  Rvec ell = Rvec::Zero(lay.total);
  for (auto& [t, k] : f.mat_terms) {
    const int d = p.psd_vars[t].dim;
    const Rvec w = hermitian_weights(d);
    const Rvec coords = hermitian_coords(k);
    for (int a = 0; a < d * d; ++a) ell(lay.var_offset[t] + a) += w(a) * coords(a);
  }
  for (auto& [u, c] : f.scalar_terms) ell(lay.scalar_offset[u]) += c;
  return ell;
}

inline DualLowering lower_dual(const SdpProblem& p, EqElimination elim,
                               const CoordLayout& lay) {
  DualLowering low;
  low.layout = lay;
  low.elim = std::move(elim);
  auto& bp = low.bp;
  const int n_params = static_cast<int>(low.elim.null_cols.size());
  bp.rows.resize(n_params);

  // Dense coordinate vectors are never materialized: every block's data is
  // accumulated directly in basis coordinates from the sparse null columns.
  auto add_lmi_block = [&](int cdim) {
    const int idx = static_cast<int>(bp.dims.size());
    bp.dims.push_back(2 * cdim);
    std::vector<Rmat> gens;
    for (const Cmat& basis : hermitian_basis(cdim)) gens.push_back(realify(basis));
    bp.gens.push_back(std::move(gens));
    bp.C.emplace_back(Rmat::Zero(2 * cdim, 2 * cdim));
    return idx;
  };

  // Variable cones.
  for (std::size_t t = 0; t < p.psd_vars.size(); ++t) {
    const int d = p.psd_vars[t].dim;
    const int blk = add_lmi_block(d);
    const int off = lay.var_offset[t];
    bp.C[blk] = realify(from_hermitian_coords(low.elim.y0.segment(off, d * d), d));
    for (int j = 0; j < n_params; ++j) {
      for (auto& [coord, val] : low.elim.null_cols[j].nz) {
        if (coord >= off && coord < off + d * d)
          bp.rows[j].push_back({blk, coord - off, -val});
      }
    }
  }
  for (std::size_t u = 0; u < p.scalar_vars.size(); ++u) {
    if (p.scalar_vars[u].sign != SdpProblem::ScalarSign::NonNegative) continue;
    const int blk = static_cast<int>(bp.dims.size());
    bp.dims.push_back(1);
    bp.gens.push_back({Rmat::Ones(1, 1)});
    bp.C.emplace_back(Rmat::Ones(1, 1) * low.elim.y0(lay.scalar_offset[u]));
    for (int j = 0; j < n_params; ++j) {
      for (auto& [coord, val] : low.elim.null_cols[j].nz) {
        if (coord == lay.scalar_offset[u]) bp.rows[j].push_back({blk, 0, -val});
      }
    }
  }

  // Constraint LMIs. Coordinates of the affine expression at y0 give the
  // constant block; each parameter contributes its sparse image through the
  // expression's linear part.
  for (const auto& e : p.lmi_constraints) {
    const int d = e.dim;
    const int blk = add_lmi_block(d);
    // value at y0
    Rvec c0 = hermitian_coords(e.constant);
    for (auto& [t, coeff] : e.mat_terms)
      c0 += coeff * low.elim.y0.segment(lay.var_offset[t], d * d);
    for (auto& [u, k] : e.scalar_terms)
      c0 += low.elim.y0(lay.scalar_offset[u]) * hermitian_coords(k);
    bp.C[blk] = realify(from_hermitian_coords(c0, d));

    std::vector<Rvec> scalar_k_coords;
    for (auto& [u, k] : e.scalar_terms) {
      (void)u;
      scalar_k_coords.push_back(hermitian_coords(k));
    }
    for (int j = 0; j < n_params; ++j) {
      Eigen::VectorXd acc;  // lazy: only allocate if touched
      auto touch = [&]() {
        if (acc.size() == 0) acc = Rvec::Zero(d * d);
      };
      for (auto& [coord, val] : low.elim.null_cols[j].nz) {
        for (auto& [t, coeff] : e.mat_terms) {
          const int off = lay.var_offset[t];
          if (coord >= off && coord < off + d * d) {
            touch();
            acc(coord - off) += coeff * val;
          }
        }
        for (std::size_t si = 0; si < e.scalar_terms.size(); ++si) {
          if (coord == lay.scalar_offset[e.scalar_terms[si].first]) {
            touch();
            acc += val * scalar_k_coords[si];
          }
        }
      }
      if (acc.size() > 0) {
        for (int a = 0; a < d * d; ++a)
          if (acc(a) != 0.0) bp.rows[j].push_back({blk, a, -acc(a)});
      }
    }
  }

  // Backend maximizes b^T y; flip for minimization.
  const double obj_sign = p.maximize ? 1.0 : -1.0;
  const Rvec ell = linfunc_coefficients(p, lay, p.objective);
  bp.b = Rvec::Zero(n_params);
  for (int j = 0; j < n_params; ++j) {
    double acc = 0.0;
    for (auto& [coord, val] : low.elim.null_cols[j].nz) acc += ell(coord) * val;
    bp.b(j) = obj_sign * acc;
  }
  return low;
}

// Equality system in coordinate form, shared by the dual lowering and the
// form-selection heuristic.
inline std::pair<Rmat, Rvec> equality_system(const SdpProblem& p, const CoordLayout& lay) {
  int n_rows = 0;
  for (const auto& e : p.op_equalities) n_rows += e.dim * e.dim;
  n_rows += static_cast<int>(p.scalar_equalities.size());
  Rmat E = Rmat::Zero(n_rows, lay.total);
  Rvec g = Rvec::Zero(n_rows);
  int r = 0;
  for (const auto& e : p.op_equalities) {
    const auto basis = hermitian_basis(e.dim);
    const Rvec w = hermitian_weights(e.dim);
    for (int a = 0; a < e.dim * e.dim; ++a, ++r) {
      for (auto& [t, coeff] : e.mat_terms) E(r, lay.var_offset[t] + a) += coeff * w(a);
      for (auto& [u, k] : e.scalar_terms)
        E(r, lay.scalar_offset[u]) += frob_inner(basis[a], k);
      g(r) = -frob_inner(basis[a], e.constant);
    }
  }
  for (const auto& f : p.scalar_equalities) {
    const Rvec ell = linfunc_coefficients(p, lay, f);
    E.row(r) = ell.transpose();
    g(r) = -f.constant;
    ++r;
  }
  return {std::move(E), std::move(g)};
}

}  // namespace sdp_detail

// Solves a structured problem by lowering it to the block backend. Complex
// Hermitian data rides through the realify embedding; values are lifted
// back and re-verified against the original problem, and the status label
// reflects those independently recomputed residuals, not the backend's
// internal ones.
inline SdpSolution solve_sdp(const SdpProblem& p, const SolveOptions& opt = {}) {
  p.check_well_formed();
  const auto lay = sdp_detail::make_layout(p);

  int m_primal = 0;
  for (const auto& e : p.op_equalities) m_primal += e.dim * e.dim;
  m_primal += static_cast<int>(p.scalar_equalities.size());
  for (const auto& e : p.lmi_constraints) m_primal += e.dim * e.dim;

  sdp::IpmOptions iopt;
  iopt.max_iter = opt.max_iter;
  iopt.tol_feas = std::min(1e-10, 0.01 * opt.tol.solver);
  iopt.tol_gap = std::min(1e-10, 0.01 * opt.tol.solver);
  // Residuals the backend accepts from a stalled run match the accuracy the
  // status gate demands, so near-misses at the tighter internal targets do
  // not discard an answer the verifier would certify.
  iopt.tol_accept = opt.tol.solver;

  SdpSolution sol;

  auto finalize = [&](const sdp::IpmResult& ipm) {
    sol.iterations = ipm.iterations;
    sol.backend_gap = ipm.relgap;
    sol.backend_pfeas = ipm.pfeas;
    sol.backend_dfeas = ipm.dfeas;
    const VerifyReport rep = verify_solution(p, sol);
    sol.objective = rep.objective;
    const double worst = rep.worst(opt.tol.solver);
    if (ipm.converged && worst <= opt.tol.solver) {
      sol.status = SolveStatus::optimal;
    } else if (worst <= 1e-4 && ipm.relgap <= 1e-3) {
      // Close but not to target: the values are usable, the label is not
      // optimal. A large backend gap means the numbers cannot be trusted at
      // all (divergence or unboundedness), which is a failure.
      sol.status = SolveStatus::inaccurate;
      sol.message = "residual " + std::to_string(worst) + "; " + ipm.message;
    } else {
      sol.status = SolveStatus::failed;
      sol.message = ipm.message;
    }
  };

  bool use_dual = false;
  sdp_detail::EqElimination elim;
  if (opt.form != SolveOptions::Form::primal) {
    auto [E, g] = sdp_detail::equality_system(p, lay);
    elim = sdp_detail::eliminate_equalities(std::move(E), std::move(g), lay.total);
    if (!elim.consistent) {
      sol.status = SolveStatus::infeasible;
      sol.message = "equality constraints are inconsistent (residual " +
                    std::to_string(elim.residual) + ")";
      return sol;
    }
    const int n_dual = static_cast<int>(elim.null_cols.size());
    use_dual = opt.form == SolveOptions::Form::dual || n_dual < m_primal;
  }

  if (use_dual) {
    auto low = sdp_detail::lower_dual(p, std::move(elim), lay);
    const sdp::IpmResult ipm = sdp::solve_block_sdp(low.bp, iopt);
    Rvec coords = low.elim.y0;
    for (int j = 0; j < static_cast<int>(low.elim.null_cols.size()); ++j)
      for (auto& [coord, val] : low.elim.null_cols[j].nz) coords(coord) += val * ipm.y(j);
    for (std::size_t t = 0; t < p.psd_vars.size(); ++t) {
      const int d = p.psd_vars[t].dim;
      sol.psd_values.push_back(
          from_hermitian_coords(coords.segment(lay.var_offset[t], d * d), d));
    }
    for (std::size_t u = 0; u < p.scalar_vars.size(); ++u)
      sol.scalar_values.push_back(coords(lay.scalar_offset[u]));
    sol.form = "dual";
    finalize(ipm);
  } else {
    auto low = sdp_detail::lower_primal(p);
    const sdp::IpmResult ipm = sdp::solve_block_sdp(low.bp, iopt);
    for (std::size_t t = 0; t < p.psd_vars.size(); ++t)
      sol.psd_values.push_back(complexify(ipm.X[low.var_block[t]]));
    for (std::size_t u = 0; u < p.scalar_vars.size(); ++u) {
      double v = ipm.X[low.scalar_block[u]](0, 0);
      if (low.scalar_neg_block[u] >= 0) v -= ipm.X[low.scalar_neg_block[u]](0, 0);
      sol.scalar_values.push_back(v);
    }
    sol.form = "primal";
    finalize(ipm);
  }
  return sol;
}

}  // namespace roikit
