//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#include <catch2/catch_amalgamated.hpp>

#include "roikit/sdp_compile.hpp"
#include "roikit/sdp_ipm.hpp"
#include "roikit/sdp_problem.hpp"
#include "test_util.hpp"

using namespace roikit;

namespace {

SolveOptions with_form(SolveOptions::Form f) {
  SolveOptions opt;
  opt.form = f;
  return opt;
}

}  // namespace

TEST_CASE("backend solves a two-variable LP", "[sdp]") {
  // min x + y  s.t.  x + 2y = 2,  x, y >= 0. Optimum 1 at (0, 1).
  sdp::BlockProblem bp;
  bp.dims = {1, 1};
  bp.gens = {{Rmat::Ones(1, 1)}, {Rmat::Ones(1, 1)}};
  bp.C = {Rmat::Ones(1, 1), Rmat::Ones(1, 1)};
  bp.rows = {{{0, 0, 1.0}, {1, 0, 2.0}}};
  bp.b = Rvec::Constant(1, 2.0);
  auto res = sdp::solve_block_sdp(bp);
  REQUIRE(res.converged);
  REQUIRE(res.pobj == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(res.X[0](0, 0) == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(res.X[1](0, 0) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("backend pins diagonal entries of a PSD block", "[sdp]") {
  // min tr X  s.t.  X_00 = 1, X_11 = 2, X >= 0 (2x2 real). Trace is forced
  // to 3; the solver must stay PSD while the off-diagonal is unconstrained.
  sdp::BlockProblem bp;
  bp.dims = {2};
  Rmat e00 = Rmat::Zero(2, 2), e11 = Rmat::Zero(2, 2);
  e00(0, 0) = 1;
  e11(1, 1) = 1;
  bp.gens = {{e00, e11}};
  bp.C = {Rmat::Identity(2, 2)};
  bp.rows = {{{0, 0, 1.0}}, {{0, 1, 1.0}}};
  bp.b = Rvec(2);
  bp.b << 1.0, 2.0;
  auto res = sdp::solve_block_sdp(bp);
  REQUIRE(res.converged);
  REQUIRE(res.pobj == Catch::Approx(3.0).margin(1e-7));
  REQUIRE(res.X[0](0, 0) == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(res.X[0](1, 1) == Catch::Approx(2.0).margin(1e-7));
  Eigen::SelfAdjointEigenSolver<Rmat> es(res.X[0], Eigen::EigenvaluesOnly);
  REQUIRE(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("largest eigenvalue as an LMI program in both forms", "[sdp]") {
  CounterRng rng(71);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + trial % 3;
    Cmat a = testutil::random_hermitian(d, rng);
    const double lmax = -psd_residual(Cmat(-a));

    for (auto form : {SolveOptions::Form::primal, SolveOptions::Form::dual}) {
      SdpProblem p;
      const int t = p.add_scalar_var("t", SdpProblem::ScalarSign::Free);
      SdpProblem::OpExpr cone(d);
      cone.constant = -a;
      cone.add_scalar(t, identity_c(d));
      p.lmi_constraints.push_back(cone);
      p.objective.add_scalar(t, 1.0);
      p.maximize = false;

      auto sol = solve_sdp(p, with_form(form));
      REQUIRE(sol.status == SolveStatus::optimal);
      REQUIRE(sol.objective == Catch::Approx(lmax).margin(1e-7));
      // The optimal-status contract: independently recomputed residuals
      // sit below the solver tolerance.
      auto rep = verify_solution(p, sol);
      REQUIRE(rep.worst(0.0) <= Tolerances{}.solver);
    }
  }
}

TEST_CASE("smallest eigenvalue via a density-matrix variable", "[sdp]") {
  CounterRng rng(72);
  for (auto form : {SolveOptions::Form::primal, SolveOptions::Form::dual}) {
    const int d = 3;
    Cmat a = testutil::random_hermitian(d, rng);
    const double lmin = psd_residual(a);

    SdpProblem p;
    const int rho = p.add_psd_var("rho", d);
    SdpProblem::LinFunc trace_one;
    trace_one.add(rho, identity_c(d));
    trace_one.constant = -1.0;
    p.scalar_equalities.push_back(trace_one);
    p.objective.add(rho, a);

    auto sol = solve_sdp(p, with_form(form));
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == Catch::Approx(lmin).margin(1e-7));
    REQUIRE(sol.psd_values[0].trace().real() == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(psd_residual(sol.psd_values[0]) > -1e-9);
  }
}

TEST_CASE("maximization path and scalar extraction", "[sdp]") {
  CounterRng rng(73);
  const int d = 3;
  Cmat g = testutil::random_hermitian(d, rng);
  Cmat w = g * g;  // PSD
  const double lmax = -psd_residual(Cmat(-w));
  for (auto form : {SolveOptions::Form::primal, SolveOptions::Form::dual}) {
    SdpProblem p;
    const int rho = p.add_psd_var("rho", d);
    SdpProblem::LinFunc trace_one;
    trace_one.add(rho, identity_c(d));
    trace_one.constant = -1.0;
    p.scalar_equalities.push_back(trace_one);
    p.objective.add(rho, w);
    p.maximize = true;
    auto sol = solve_sdp(p, with_form(form));
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == Catch::Approx(lmax).margin(1e-7));
  }
}

TEST_CASE("both compilations agree on random equality-constrained programs", "[sdp]") {
  CounterRng rng(74);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 3;
    // Strictly feasible by construction: constraints pin random functionals
    // to their values at an interior point.
    Cmat x0 = testutil::random_hermitian(d, rng);
    x0 = x0 * x0 + identity_c(d);
    SdpProblem p;
    const int x = p.add_psd_var("x", d);
    for (int i = 0; i < 3; ++i) {
      Cmat k = testutil::random_hermitian(d, rng);
      SdpProblem::LinFunc f;
      f.add(x, k);
      f.constant = -frob_inner(k, x0);
      p.scalar_equalities.push_back(f);
    }
    // Positive definite objective keeps the program bounded below.
    Cmat c = testutil::random_hermitian(d, rng);
    p.objective.add(x, Cmat(c * c + 0.1 * identity_c(d)));

    auto sol_p = solve_sdp(p, with_form(SolveOptions::Form::primal));
    auto sol_d = solve_sdp(p, with_form(SolveOptions::Form::dual));
    REQUIRE(sol_p.status == SolveStatus::optimal);
    REQUIRE(sol_d.status == SolveStatus::optimal);
    REQUIRE(sol_p.form == "primal");
    REQUIRE(sol_d.form == "dual");
    REQUIRE(sol_p.objective == Catch::Approx(sol_d.objective).margin(2e-7));
  }
}

TEST_CASE("operator equalities with scalar coefficient matrices", "[sdp]") {
  // min s  s.t.  G0 + G1 = s*I, G_i >= 0, tr[P G0] = 0.4 with P a projector.
  // Forces s >= 0.4 through the projector component; optimum is s = 0.4
  // achieved by G0 = 0.4 P + a*(I-P) ... a = 0: G1 = s I - G0 >= 0.
  const int d = 2;
  Cmat proj = 0.5 * (identity_c(2) + pauli_z());
  for (auto form : {SolveOptions::Form::primal, SolveOptions::Form::dual}) {
    SdpProblem p;
    const int g0 = p.add_psd_var("g0", d);
    const int g1 = p.add_psd_var("g1", d);
    const int s = p.add_scalar_var("s");
    SdpProblem::OpExpr completeness(d);
    completeness.add(g0, 1.0).add(g1, 1.0);
    completeness.add_scalar(s, Cmat(-identity_c(d)));
    p.op_equalities.push_back(completeness);
    SdpProblem::LinFunc pin;
    pin.add(g0, proj);
    pin.constant = -0.4;
    p.scalar_equalities.push_back(pin);
    p.objective.add_scalar(s, 1.0);
    auto sol = solve_sdp(p, with_form(form));
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == Catch::Approx(0.4).margin(1e-7));
    REQUIRE(sol.scalar_values[0] == Catch::Approx(0.4).margin(1e-7));
  }
}

TEST_CASE("inconsistent equalities are reported infeasible", "[sdp]") {
  SdpProblem p;
  const int s = p.add_scalar_var("s");
  SdpProblem::LinFunc f1, f2;
  f1.add_scalar(s, 1.0);
  f1.constant = -1.0;
  f2.add_scalar(s, 1.0);
  f2.constant = -2.0;
  p.scalar_equalities.push_back(f1);
  p.scalar_equalities.push_back(f2);
  p.objective.add_scalar(s, 1.0);
  auto sol = solve_sdp(p, with_form(SolveOptions::Form::dual));
  REQUIRE(sol.status == SolveStatus::infeasible);
}

TEST_CASE("verify_solution flags corrupted values", "[sdp]") {
  const int d = 2;
  SdpProblem p;
  const int rho = p.add_psd_var("rho", d);
  SdpProblem::LinFunc trace_one;
  trace_one.add(rho, identity_c(d));
  trace_one.constant = -1.0;
  p.scalar_equalities.push_back(trace_one);
  p.objective.add(rho, pauli_z());
  auto sol = solve_sdp(p);
  REQUIRE(sol.status == SolveStatus::optimal);

  SdpSolution corrupted = sol;
  corrupted.psd_values[0] += 0.1 * identity_c(d);
  auto rep = verify_solution(p, corrupted);
  REQUIRE(rep.max_eq_residual > 0.19);

  SdpSolution negated = sol;
  negated.psd_values[0] -= 0.05 * identity_c(d);
  negated.psd_values[0](0, 0) -= 1.0;
  auto rep2 = verify_solution(p, negated);
  REQUIRE(rep2.min_var_eig < -0.5);
}

TEST_CASE("complex data exercises the real embedding end to end", "[sdp]") {
  // A sigma_y-weighted objective has purely imaginary off-diagonal data, so
  // any mishandling of the embedding shows up as a wrong optimum.
  SdpProblem p;
  const int rho = p.add_psd_var("rho", 2);
  SdpProblem::LinFunc trace_one;
  trace_one.add(rho, identity_c(2));
  trace_one.constant = -1.0;
  p.scalar_equalities.push_back(trace_one);
  Cmat h = 0.3 * pauli_x() + 0.4 * pauli_y() + 0.2 * pauli_z();
  p.objective.add(rho, h);
  p.maximize = true;
  const double expect = std::sqrt(0.3 * 0.3 + 0.4 * 0.4 + 0.2 * 0.2);
  for (auto form : {SolveOptions::Form::primal, SolveOptions::Form::dual}) {
    auto sol = solve_sdp(p, with_form(form));
    REQUIRE(sol.status == SolveStatus::optimal);
    REQUIRE(sol.objective == Catch::Approx(expect).margin(1e-7));
    REQUIRE(herm_residual(sol.psd_values[0]) < 1e-12);
  }
}
