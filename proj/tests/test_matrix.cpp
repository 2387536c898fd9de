//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#include <catch2/catch_amalgamated.hpp>

#include "roikit/matrix.hpp"
#include "roikit/rng.hpp"
#include "test_util.hpp"

using namespace roikit;

TEST_CASE("kron of identities is the identity", "[matrix]") {
  Cmat out = kron(identity_c(2), identity_c(2));
  REQUIRE((out - identity_c(4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron of diagonal matrices", "[matrix]") {
  Cmat a = Cmat::Zero(2, 2), b = Cmat::Zero(2, 2);
  a.diagonal() << 1, 2;
  b.diagonal() << 3, 4;
  Cmat expect = Cmat::Zero(4, 4);
  expect.diagonal() << 3, 4, 6, 8;
  REQUIRE((kron(a, b) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron index convention is row-major", "[matrix]") {
  // sigma_x (x) sigma_z expanded by hand from (A(x)B)[i*2+k, j*2+l] = A[i,j]B[k,l].
  Cmat expect(4, 4);
  expect << 0, 0, 1, 0,
            0, 0, 0, -1,
            1, 0, 0, 0,
            0, -1, 0, 0;
  REQUIRE((kron(pauli_x(), pauli_z()) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frob_inner on Pauli pairs", "[matrix]") {
  REQUIRE(frob_inner(pauli_x(), pauli_x()) == Catch::Approx(2.0));
  REQUIRE(frob_inner(pauli_x(), pauli_z()) == Catch::Approx(0.0).margin(1e-15));
  Cmat rho = 0.5 * identity_c(2);
  REQUIRE(frob_inner(identity_c(2), rho) == Catch::Approx(1.0));
}

TEST_CASE("psd_residual is the smallest eigenvalue", "[matrix]") {
  REQUIRE(psd_residual(identity_c(3)) == Catch::Approx(1.0));
  Cmat m = Cmat::Zero(2, 2);
  m.diagonal() << 1.0, -0.5;
  REQUIRE(psd_residual(m) == Catch::Approx(-0.5));
  Cmat proj = 0.5 * (identity_c(2) + pauli_x());
  REQUIRE(psd_residual(proj) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("HermitianOperator rejects non-Hermitian input", "[matrix]") {
  Cmat bad(2, 2);
  bad << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(HermitianOperator(bad), ValidationError);
  Cmat rect(2, 3);
  rect.setZero();
  REQUIRE_THROWS_AS(HermitianOperator(rect), SchemaError);
  // Residuals inside tolerance are accepted and symmetrized away.
  Cmat almost = pauli_x();
  almost(0, 1) += Complex(0, 5e-11);
  HermitianOperator h(almost);
  REQUIRE(herm_residual(h.mat()) == 0.0);
}

TEST_CASE("kron and trace interplay on random operators", "[matrix]") {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int da = 2 + rng.uniform_int(2), db = 2 + rng.uniform_int(2);
    Cmat a = testutil::random_hermitian(da, rng);
    Cmat b = testutil::random_hermitian(db, rng);
    Cmat k = kron(a, b);
    REQUIRE(herm_residual(k) < 1e-12);
    REQUIRE(k.trace().real() ==
            Catch::Approx(a.trace().real() * b.trace().real()).margin(1e-10));
    // frob_inner factorizes over tensor products.
    Cmat a2 = testutil::random_hermitian(da, rng);
    Cmat b2 = testutil::random_hermitian(db, rng);
    REQUIRE(frob_inner(k, kron(a2, b2)) ==
            Catch::Approx(frob_inner(a, a2) * frob_inner(b, b2)).margin(1e-9));
  }
}

TEST_CASE("frob_inner is symmetric and linear on Hermitians", "[matrix]") {
  CounterRng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + rng.uniform_int(3);
    Cmat a = testutil::random_hermitian(d, rng);
    Cmat b = testutil::random_hermitian(d, rng);
    Cmat c = testutil::random_hermitian(d, rng);
    const double alpha = rng.gaussian();
    REQUIRE(frob_inner(a, b) == Catch::Approx(frob_inner(b, a)).margin(1e-10));
    REQUIRE(frob_inner(a, Cmat(alpha * b + c)) ==
            Catch::Approx(alpha * frob_inner(a, b) + frob_inner(a, c)).margin(1e-9));
  }
}

TEST_CASE("psd_residual shifts exactly with the identity", "[matrix]") {
  CounterRng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + rng.uniform_int(3);
    Cmat a = testutil::random_hermitian(d, rng);
    const double eps = std::abs(rng.gaussian());
    REQUIRE(psd_residual(Cmat(a + eps * identity_c(d))) ==
            Catch::Approx(psd_residual(a) + eps).margin(1e-10));
  }
}

TEST_CASE("hermitian basis spans with the documented coordinates", "[matrix]") {
  CounterRng rng(14);
  for (int d = 2; d <= 4; ++d) {
    auto basis = hermitian_basis(d);
    REQUIRE(basis.size() == static_cast<std::size_t>(d * d));
    for (const auto& b : basis) REQUIRE(herm_residual(b) == 0.0);
    Cmat h = testutil::random_hermitian(d, rng);
    Rvec coords = hermitian_coords(h);
    // Reconstruction from coordinates.
    Cmat rebuilt = Cmat::Zero(d, d);
    for (int a = 0; a < d * d; ++a) rebuilt += coords(a) * basis[a];
    REQUIRE((rebuilt - h).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((from_hermitian_coords(coords, d) - h).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("real embedding preserves spectra and inner products", "[matrix]") {
  CounterRng rng(15);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = 2 + rng.uniform_int(3);
    Cmat a = testutil::random_hermitian(d, rng);
    Cmat x = testutil::random_hermitian(d, rng);
    Rmat ta = realify(a);
    REQUIRE((ta - ta.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    // Eigenvalues double up.
    Eigen::SelfAdjointEigenSolver<Cmat> esc(a, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Rmat> esr(ta, Eigen::EigenvaluesOnly);
    for (int i = 0; i < d; ++i) {
      REQUIRE(esr.eigenvalues()(2 * i) ==
              Catch::Approx(esc.eigenvalues()(i)).margin(1e-10));
      REQUIRE(esr.eigenvalues()(2 * i + 1) ==
              Catch::Approx(esc.eigenvalues()(i)).margin(1e-10));
    }
    // <T(A)/2, T(X)> = tr[A X]: the scaling convention the lowering relies on.
    REQUIRE(0.5 * (ta.transpose() * realify(x)).trace() ==
            Catch::Approx(frob_inner(a, x)).margin(1e-10));
    // Round trip, including through the J-average of an unstructured matrix.
    REQUIRE((complexify(ta) - a).cwiseAbs().maxCoeff() < 1e-14);
    Rmat noise = Rmat::Random(2 * d, 2 * d);
    noise = 0.5 * (noise + noise.transpose().eval());
    Cmat lifted = complexify(Rmat(ta + noise));
    REQUIRE(herm_residual(lifted) < 1e-13);
  }
}

TEST_CASE("complexify projection is PSD-safe", "[matrix]") {
  // The J-average of a PSD symmetric matrix stays PSD, so lifting a solver
  // iterate cannot leave the cone.
  CounterRng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3;
    Rmat g = Rmat::NullaryExpr(2 * d, 2 * d, [&](Eigen::Index, Eigen::Index) {
      return rng.gaussian();
    });
    Rmat z = g * g.transpose();
    REQUIRE(psd_residual(complexify(z)) > -1e-12);
  }
}
