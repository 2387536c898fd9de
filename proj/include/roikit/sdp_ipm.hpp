//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"

namespace roikit::sdp {

// Standard-form pair over a product of real symmetric PSD cones:
//
//   (P)  min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   (D)  max b^T y    s.t.  C - sum_i y_i A_i = S >= 0
//
// X, S and the data are block diagonal. Every A_i is stored as a sparse
// combination of per-block symmetric "generator" matrices; the lowerings in
// this library emit few distinct generators per block, which lets the Schur
// complement be assembled from one small generator Gram matrix per block
// instead of one X*A*S^{-1} product per (constraint, block) pair.
struct BlockProblem {
  std::vector<int> dims;
  std::vector<std::vector<Rmat>> gens;  // symmetric, per block
  std::vector<Rmat> C;                  // symmetric, per block; may be zero

  struct Entry {
    int block = 0;
    int gen = 0;
    double coeff = 0.0;
  };
  std::vector<std::vector<Entry>> rows;
  Rvec b;
};

struct IpmOptions {
  int max_iter = 200;
  double tol_feas = 1e-10;
  double tol_gap = 1e-10;  // relative duality gap
  // A run that stalls short of the targets above still counts as converged
  // if every residual of its best iterate is within this band. Callers set
  // it to the accuracy they actually need; the targets stay tighter so the
  // solver does not settle early.
  double tol_accept = 1e-9;
  double step_frac = 0.98;  // fraction of the distance to the cone boundary
};

struct IpmResult {
  bool converged = false;
  int iterations = 0;
  std::vector<Rmat> X, S;
  Rvec y;
  double pobj = 0.0, dobj = 0.0;
  double pfeas = std::numeric_limits<double>::infinity();
  double dfeas = std::numeric_limits<double>::infinity();
  double relgap = std::numeric_limits<double>::infinity();
  std::string message;
};

namespace detail {

// Per-block view of the constraint rows: which rows touch the block and
// with which generator combination.
struct BlockRows {
  struct Ref {
    int row;
    std::vector<std::pair<int, double>> combo;  // (generator index, coefficient)
  };
  std::vector<Ref> refs;
};

inline double trace_dot(const Rmat& a, const Rmat& b) {
  // tr(a b) for symmetric a; b need not be symmetric, the symmetric part is
  // what the trace picks out.
  return (a.array() * b.transpose().array()).sum();
}

// Largest t with P + t*D >= 0, given the Cholesky factor L of P.
inline double max_cone_step(const Eigen::LLT<Rmat>& llt, const Rmat& d) {
  Rmat w = llt.matrixL().solve(d);
  w = llt.matrixL().solve(w.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Rmat> es(0.5 * (w + w.transpose().eval()),
                                         Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace detail

// Primal-dual interior-point method with the HKM search direction and a
// Mehrotra predictor-corrector step. Dense per-block linear algebra; the
// Schur complement matrix tr(A_i X A_j S^{-1}) is symmetric positive
// definite at interior iterates and is factored by Cholesky with a ridge
// fallback. Iterates keep X, S strictly inside the cone; equality and dual
// feasibility are reached in the limit, so residuals are reported and the
// caller decides what is acceptable.
inline IpmResult solve_block_sdp(const BlockProblem& bp_in, const IpmOptions& opt = {}) {
  const int nblocks = static_cast<int>(bp_in.dims.size());
  const int m = static_cast<int>(bp_in.rows.size());
  IpmResult res;

  // Static per-block generator Grams, used for row norms.
  std::vector<Rmat> gen_gram(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    const int p = static_cast<int>(bp_in.gens[b].size());
    gen_gram[b].resize(p, p);
    for (int a = 0; a < p; ++a)
      for (int c = a; c < p; ++c)
        gen_gram[b](a, c) = gen_gram[b](c, a) =
            detail::trace_dot(bp_in.gens[b][a], bp_in.gens[b][c]);
  }

  // Group each row's entries by block and normalize the row to unit-order
  // Frobenius norm. The returned y is rescaled back at the end.
  std::vector<detail::BlockRows> block_rows(nblocks);
  Rvec row_scale = Rvec::Ones(std::max(m, 1));
  Rvec b_scaled = bp_in.b;
  {
    std::vector<std::vector<std::pair<int, double>>> per_block(nblocks);
    for (int i = 0; i < m; ++i) {
      for (int b = 0; b < nblocks; ++b) per_block[b].clear();
      for (const auto& e : bp_in.rows[i]) {
        auto& combo = per_block[e.block];
        bool merged = false;
        for (auto& [g, c] : combo) {
          if (g == e.gen) {
            c += e.coeff;
            merged = true;
            break;
          }
        }
        if (!merged) combo.emplace_back(e.gen, e.coeff);
      }
      double norm2 = 0.0;
      for (int b = 0; b < nblocks; ++b) {
        const auto& combo = per_block[b];
        for (const auto& [g1, c1] : combo)
          for (const auto& [g2, c2] : combo) norm2 += c1 * c2 * gen_gram[b](g1, g2);
      }
      const double nu = std::max(1.0, std::sqrt(std::max(norm2, 0.0)));
      row_scale(i) = nu;
      b_scaled(i) /= nu;
      for (int b = 0; b < nblocks; ++b) {
        if (per_block[b].empty()) continue;
        auto combo = per_block[b];
        for (auto& [g, c] : combo) {
          (void)g;
          c /= nu;
        }
        block_rows[b].refs.push_back({i, std::move(combo)});
      }
    }
  }

  int total_dim = 0;
  for (int d : bp_in.dims) total_dim += d;
  const double n_cone = std::max(1, total_dim);

  const double bnorm = m > 0 ? b_scaled.cwiseAbs().maxCoeff() : 0.0;
  double cnorm = 0.0;
  for (int b = 0; b < nblocks; ++b)
    if (bp_in.C[b].size() > 0) cnorm = std::max(cnorm, bp_in.C[b].cwiseAbs().maxCoeff());

  // Starting point: multiples of the identity sized to the data.
  const double xi = 10.0 * std::max(1.0, bnorm);
  const double eta = 10.0 * std::max(1.0, cnorm);
  std::vector<Rmat> X(nblocks), S(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    X[b] = xi * Rmat::Identity(bp_in.dims[b], bp_in.dims[b]);
    S[b] = eta * Rmat::Identity(bp_in.dims[b], bp_in.dims[b]);
  }
  Rvec y = Rvec::Zero(m);

  // r_i = sum_b <A_i^b, Z_b>, evaluated through the generators.
  auto apply_rows = [&](const std::vector<Rmat>& z) {
    Rvec r = Rvec::Zero(m);
    for (int b = 0; b < nblocks; ++b) {
      if (block_rows[b].refs.empty()) continue;
      const int p = static_cast<int>(bp_in.gens[b].size());
      Rvec t(p);
      for (int a = 0; a < p; ++a) t(a) = detail::trace_dot(bp_in.gens[b][a], z[b]);
      for (const auto& ref : block_rows[b].refs) {
        double acc = 0.0;
        for (const auto& [g, c] : ref.combo) acc += c * t(g);
        r(ref.row) += acc;
      }
    }
    return r;
  };

  // Per-block sum_i w_i A_i^b for a weight vector w.
  auto combine_rows = [&](const Rvec& w) {
    std::vector<Rmat> out(nblocks);
    for (int b = 0; b < nblocks; ++b) {
      out[b] = Rmat::Zero(bp_in.dims[b], bp_in.dims[b]);
      if (block_rows[b].refs.empty()) continue;
      const int p = static_cast<int>(bp_in.gens[b].size());
      Rvec acc = Rvec::Zero(p);
      for (const auto& ref : block_rows[b].refs)
        for (const auto& [g, c] : ref.combo) acc(g) += w(ref.row) * c;
      for (int a = 0; a < p; ++a)
        if (acc(a) != 0.0) out[b] += acc(a) * bp_in.gens[b][a];
    }
    return out;
  };

  auto snapshot_status = [&](double pf, double df, double rg) {
    return std::max({pf, df, rg});
  };

  // Gram matrix of the scaled rows, factored once. Equality feasibility is
  // reached only in the limit, so near the end an iterate's equality residual
  // can dominate an otherwise excellent point. The least-squares projection
  // X + A*(G^{-1}(b - A(X))) removes that residual exactly; each iterate is
  // scored both raw and projected, and the snapshot keeps the better one.
  Rmat row_gram;
  Eigen::LDLT<Rmat> eq_gram;
  if (m > 0) {
    row_gram = Rmat::Zero(m, m);
    for (int b = 0; b < nblocks; ++b) {
      for (const auto& r1 : block_rows[b].refs) {
        for (const auto& r2 : block_rows[b].refs) {
          if (r2.row < r1.row) continue;
          double acc = 0.0;
          for (const auto& [g1, c1] : r1.combo)
            for (const auto& [g2, c2] : r2.combo) acc += c1 * c2 * gen_gram[b](g1, g2);
          row_gram(r1.row, r2.row) += acc;
          if (r1.row != r2.row) row_gram(r2.row, r1.row) += acc;
        }
      }
    }
    eq_gram.compute(row_gram);
  }

  struct Polished {
    bool ok = false;
    std::vector<Rmat> X;
    double pf = 0, pobj = 0, rg = 0;
  };
  // Alternating projections between the equality manifold and the cone.
  // The affine step is exact through the row Gram; the cone step clips
  // negative eigenvalues. Both violations shrink together, and the best
  // affine-feasible point seen is returned with its own honest score.
  auto project_equalities = [&](const std::vector<Rmat>& Xin, double dobj) {
    Polished out;
    if (m == 0 || eq_gram.info() != Eigen::Success) return out;
    std::vector<Rmat> Z = Xin;
    double best_score = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 8; ++round) {
      const Rvec rp = b_scaled - apply_rows(Z);
      Rvec lam = eq_gram.solve(rp);
      lam += eq_gram.solve(Rvec(rp - row_gram.selfadjointView<Eigen::Upper>() * lam));
      const std::vector<Rmat> corr = combine_rows(lam);
      double dent = 0.0;
      std::vector<Eigen::SelfAdjointEigenSolver<Rmat>> es(nblocks);
      for (int b = 0; b < nblocks; ++b) {
        Z[b] += corr[b];
        Z[b] = 0.5 * (Z[b] + Z[b].transpose().eval());
        es[b].compute(Z[b]);
        dent = std::max(dent, std::max(0.0, -es[b].eigenvalues().minCoeff()));
      }
      const double resid = (b_scaled - apply_rows(Z)).cwiseAbs().maxCoeff();
      const double score = std::max(resid, dent);
      if (score < best_score) {
        best_score = score;
        out.X = Z;
      }
      if (dent <= 0.0) break;
      for (int b = 0; b < nblocks; ++b) {
        const Rvec ev = es[b].eigenvalues().cwiseMax(0.0);
        Z[b] = es[b].eigenvectors() * ev.asDiagonal() * es[b].eigenvectors().transpose();
        Z[b] = 0.5 * (Z[b] + Z[b].transpose().eval());
      }
    }
    if (out.X.empty()) return out;
    for (int b = 0; b < nblocks; ++b)
      if (bp_in.C[b].size() > 0) out.pobj += detail::trace_dot(bp_in.C[b], out.X[b]);
    out.pf = best_score / (1.0 + bnorm);
    out.rg = std::abs(out.pobj - dobj) / (1.0 + std::abs(out.pobj) + std::abs(dobj));
    out.ok = std::isfinite(out.pf) && std::isfinite(out.pobj);
    return out;
  };

  double best_merit = std::numeric_limits<double>::infinity();
  std::vector<Rmat> bestX = X, bestS = S;
  Rvec best_y = y;
  double best_pobj = 0, best_dobj = 0, best_pf = 1, best_df = 1, best_rg = 1;
  int stall = 0;
  std::string stop_reason = "iteration limit";

  std::vector<Eigen::LLT<Rmat>> lltX(nblocks), lltS(nblocks);
  std::vector<Rmat> Sinv(nblocks), Rd(nblocks);

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    bool factor_ok = true;
    for (int b = 0; b < nblocks && factor_ok; ++b) {
      lltX[b].compute(X[b]);
      lltS[b].compute(S[b]);
      if (lltX[b].info() != Eigen::Success || lltS[b].info() != Eigen::Success)
        factor_ok = false;
    }
    if (!factor_ok) {
      stop_reason = "cone factorization lost positive definiteness";
      break;
    }
    for (int b = 0; b < nblocks; ++b)
      Sinv[b] = lltS[b].solve(Rmat::Identity(bp_in.dims[b], bp_in.dims[b]));

    double mu = 0.0, pobj = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      mu += (X[b].array() * S[b].array()).sum();
      if (bp_in.C[b].size() > 0) pobj += detail::trace_dot(bp_in.C[b], X[b]);
    }
    mu /= n_cone;
    const double dobj = m > 0 ? b_scaled.dot(y) : 0.0;

    const Rvec rp = b_scaled - apply_rows(X);
    const std::vector<Rmat> yA = combine_rows(y);
    double dfeas = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      Rd[b] = -S[b] - yA[b];
      if (bp_in.C[b].size() > 0) Rd[b] += bp_in.C[b];
      dfeas = std::max(dfeas, Rd[b].cwiseAbs().maxCoeff());
    }
    const double pfeas = (m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + bnorm);
    dfeas /= 1.0 + cnorm;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    double cand_merit = snapshot_status(pfeas, dfeas, relgap);
    Polished pol;
    // Projection pays off only when the equality residual dominates the
    // score and the iterate is already in the near-feasible regime.
    if (pfeas > opt.tol_feas && pfeas <= 1e-4 && pfeas >= std::max(dfeas, relgap)) {
      pol = project_equalities(X, dobj);
      if (pol.ok && snapshot_status(pol.pf, dfeas, pol.rg) < cand_merit)
        cand_merit = snapshot_status(pol.pf, dfeas, pol.rg);
      else
        pol.ok = false;
    }
    if (cand_merit < best_merit) {
      if (cand_merit < 0.9 * best_merit) stall = 0;
      best_merit = cand_merit;
      bestX = pol.ok ? pol.X : X;
      bestS = S;
      best_y = y;
      best_pobj = pol.ok ? pol.pobj : pobj;
      best_dobj = dobj;
      best_pf = pol.ok ? pol.pf : pfeas;
      best_df = dfeas;
      best_rg = pol.ok ? pol.rg : relgap;
    } else {
      ++stall;
    }

    if (best_pf <= opt.tol_feas && best_df <= opt.tol_feas && best_rg <= opt.tol_gap) {
      stop_reason = "converged";
      break;
    }
    if (stall >= 25) {
      stop_reason = "no further progress";
      break;
    }

    // Schur complement M_ij = tr(A_i X A_j S^{-1}), assembled per block from
    // the generator Gram G_ab = tr(g_a X g_b S^{-1}).
    Rmat M = Rmat::Zero(m, m);
    for (int b = 0; b < nblocks; ++b) {
      const auto& refs = block_rows[b].refs;
      if (refs.empty()) continue;
      const int p = static_cast<int>(bp_in.gens[b].size());
      std::vector<Rmat> q(p);
      for (int a = 0; a < p; ++a) q[a] = X[b] * bp_in.gens[b][a] * Sinv[b];
      Rmat G(p, p);
      for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) G(a, c) = detail::trace_dot(bp_in.gens[b][a], q[c]);
      G = 0.5 * (G + G.transpose().eval());
      for (std::size_t ii = 0; ii < refs.size(); ++ii) {
        for (std::size_t jj = ii; jj < refs.size(); ++jj) {
          double val = 0.0;
          for (const auto& [g1, c1] : refs[ii].combo)
            for (const auto& [g2, c2] : refs[jj].combo) val += c1 * c2 * G(g1, g2);
          const int r1 = std::min(refs[ii].row, refs[jj].row);
          const int r2 = std::max(refs[ii].row, refs[jj].row);
          M(r1, r2) += val;
        }
      }
    }

    Eigen::LLT<Rmat> lltM;
    if (m > 0) {
      const double mdiag = M.diagonal().cwiseAbs().maxCoeff() + 1e-300;
      double ridge = 0.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        Rmat Mreg = M.selfadjointView<Eigen::Upper>();
        if (ridge > 0.0) Mreg.diagonal().array() += ridge * mdiag;
        lltM.compute(Mreg);
        if (lltM.info() == Eigen::Success) break;
        ridge = (ridge == 0.0) ? 1e-13 : ridge * 100.0;
      }
      if (lltM.info() != Eigen::Success) {
        stop_reason = "Schur complement factorization failed";
        break;
      }
    }

    // Common right-hand-side piece A(X Rd S^{-1}).
    std::vector<Rmat> xrs(nblocks);
    for (int b = 0; b < nblocks; ++b) xrs[b] = X[b] * Rd[b] * Sinv[b];
    const Rvec a_xrs = apply_rows(xrs);

    // The Schur complement's condition number grows like 1/mu, so a plain
    // Cholesky solve loses enough digits near convergence to stall progress
    // around 1e-9. One round of iterative refinement restores them.
    auto schur_solve = [&](const Rvec& rhs) {
      Rvec v = lltM.solve(rhs);
      v += lltM.solve(Rvec(rhs - M.selfadjointView<Eigen::Upper>() * v));
      return v;
    };

    auto solve_direction = [&](const Rvec& rhs, const std::vector<Rmat>& v_sinv,
                               Rvec& dy, std::vector<Rmat>& dX, std::vector<Rmat>& dS) {
      dy = m > 0 ? schur_solve(rhs) : Rvec();
      const std::vector<Rmat> dyA = combine_rows(dy);
      dX.resize(nblocks);
      dS.resize(nblocks);
      for (int b = 0; b < nblocks; ++b) {
        dS[b] = Rd[b] - dyA[b];
        Rmat raw = -X[b] - X[b] * dS[b] * Sinv[b];
        if (v_sinv[b].size() > 0) raw += v_sinv[b];
        dX[b] = 0.5 * (raw + raw.transpose().eval());
      }
    };

    // Predictor: target XS -> 0.
    std::vector<Rmat> zero_blocks(nblocks);
    Rvec dy_aff;
    std::vector<Rmat> dX_aff, dS_aff;
    solve_direction(b_scaled + a_xrs, zero_blocks, dy_aff, dX_aff, dS_aff);

    double ap_aff = 1.0, ad_aff = 1.0;
    for (int b = 0; b < nblocks; ++b) {
      ap_aff = std::min(ap_aff, opt.step_frac * detail::max_cone_step(lltX[b], dX_aff[b]));
      ad_aff = std::min(ad_aff, opt.step_frac * detail::max_cone_step(lltS[b], dS_aff[b]));
    }
    double mu_aff = 0.0;
    for (int b = 0; b < nblocks; ++b)
      mu_aff += ((X[b] + ap_aff * dX_aff[b]).array() * (S[b] + ad_aff * dS_aff[b]).array())
                    .sum();
    mu_aff = std::max(mu_aff / n_cone, 0.0);
    const double sigma = std::min(1.0, std::pow(mu_aff / std::max(mu, 1e-300), 3));

    // Corrector: target sigma*mu*I - dX_aff dS_aff.
    std::vector<Rmat> v_sinv(nblocks);
    for (int b = 0; b < nblocks; ++b)
      v_sinv[b] = sigma * mu * Sinv[b] - dX_aff[b] * dS_aff[b] * Sinv[b];
    const Rvec a_vs = apply_rows(v_sinv);

    Rvec dy;
    std::vector<Rmat> dX, dS;
    solve_direction(b_scaled - a_vs + a_xrs, v_sinv, dy, dX, dS);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nblocks; ++b) {
      ap = std::min(ap, opt.step_frac * detail::max_cone_step(lltX[b], dX[b]));
      ad = std::min(ad, opt.step_frac * detail::max_cone_step(lltS[b], dS[b]));
    }
    if (ap < 1e-10 && ad < 1e-10) {
      stop_reason = "step size collapsed";
      break;
    }

    // The boundary distance above is computed in floating point, and near
    // convergence its rounding error can push a 0.98 step outside the cone.
    // Accept a step only if the stepped blocks still factorize, halving
    // until they do, so every iteration starts strictly inside the cone.
    auto try_step = [&](const std::vector<Rmat>& base, const std::vector<Rmat>& dir,
                        double alpha, std::vector<Rmat>& out) {
      for (int b = 0; b < nblocks; ++b) {
        out[b] = base[b] + alpha * dir[b];
        out[b] = 0.5 * (out[b] + out[b].transpose().eval());
        if (Eigen::LLT<Rmat>(out[b]).info() != Eigen::Success) return false;
      }
      return true;
    };
    std::vector<Rmat> Xn(nblocks), Sn(nblocks);
    bool x_ok = false, s_ok = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      if ((x_ok = try_step(X, dX, ap, Xn))) break;
      ap *= 0.5;
    }
    for (int attempt = 0; attempt < 40; ++attempt) {
      if ((s_ok = try_step(S, dS, ad, Sn))) break;
      ad *= 0.5;
    }
    if (!x_ok || !s_ok) {
      stop_reason = "cone step rejected";
      break;
    }
    X.swap(Xn);
    S.swap(Sn);
    if (m > 0) y += ad * dy;
  }

  // A final projection of the returned iterate covers runs whose best
  // snapshot was taken before projection became worthwhile in-loop.
  if (m > 0 && best_pf > opt.tol_feas && best_pf <= 1e-4) {
    const Polished pol = project_equalities(bestX, best_dobj);
    if (pol.ok && pol.pf < best_pf) {
      bestX = pol.X;
      best_pf = pol.pf;
      best_pobj = pol.pobj;
      best_rg = pol.rg;
    }
  }

  res.iterations = iter;
  res.X = std::move(bestX);
  res.S = std::move(bestS);
  res.y = best_y;
  for (int i = 0; i < m; ++i) res.y(i) /= row_scale(i);
  res.pobj = best_pobj;
  res.dobj = best_dobj;
  res.pfeas = best_pf;
  res.dfeas = best_df;
  res.relgap = best_rg;
  res.converged = best_pf <= opt.tol_feas && best_df <= opt.tol_feas &&
                  best_rg <= opt.tol_gap;
  // A stalled run whose best iterate sits within the acceptance band still
  // counts; the caller re-verifies every residual against its own
  // tolerances before trusting the label.
  if (!res.converged && best_pf <= opt.tol_accept && best_df <= opt.tol_accept &&
      best_rg <= opt.tol_accept) {
    res.converged = true;
  }
  res.message = stop_reason;
  return res;
}

}  // namespace roikit::sdp
