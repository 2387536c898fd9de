//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "roikit/config.hpp"

namespace roikit {

using Complex = std::complex<double>;
using Cmat = Eigen::MatrixXcd;
using Rmat = Eigen::MatrixXd;
using Rvec = Eigen::VectorXd;

inline double herm_residual(const Cmat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Value type for Hermitian matrices. Construction rejects non-square or
// non-Hermitian input and stores the symmetrized matrix, so every instance
// satisfies H == H^dag exactly.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(const Cmat& m, double herm_tol = Tolerances{}.herm) {
    if (m.rows() != m.cols()) {
      throw SchemaError("HermitianOperator: matrix is not square (" +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
    }
    if (m.rows() == 0) throw SchemaError("HermitianOperator: empty matrix");
    const double res = herm_residual(m);
    if (!(res <= herm_tol)) {
      throw ValidationError("HermitianOperator: hermiticity residual " +
                            std::to_string(res) + " exceeds tolerance");
    }
    mat_ = 0.5 * (m + m.adjoint().eval());
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Cmat& mat() const { return mat_; }

 private:
  Cmat mat_;
};

// tr[A^dag B]. Real for Hermitian arguments; the real part is returned and
// the (numerically tiny) imaginary part discarded.
inline double frob_inner(const Cmat& a, const Cmat& b) {
  return (a.adjoint() * b).trace().real();
}

inline double frob_inner(const HermitianOperator& a, const HermitianOperator& b) {
  return frob_inner(a.mat(), b.mat());
}

// Kronecker product with row-major index convention:
//   (A (x) B)[i*p + k, j*q + l] = A[i,j] * B[k,l]   for B of size p x q.
inline Cmat kron(const Cmat& a, const Cmat& b) {
  Cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.mat(), b.mat()));
}

// Smallest eigenvalue. Nonnegative iff the operator is PSD; the magnitude of
// a negative value measures the violation.
inline double psd_residual(const Cmat& h) {
  Eigen::SelfAdjointEigenSolver<Cmat> es(0.5 * (h + h.adjoint().eval()),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double psd_residual(const HermitianOperator& h) { return psd_residual(h.mat()); }

inline Cmat identity_c(int d) { return Cmat::Identity(d, d); }

inline Cmat pauli_x() {
  Cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Cmat pauli_y() {
  Cmat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Cmat pauli_z() {
  Cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Basis of the real vector space of d x d Hermitian matrices, in a fixed
// order: for i <= j ascending, E_ii on the diagonal, then for each i < j the
// pair E_ij + E_ji and i(E_ij - E_ji). The expansion coefficients of H are
// (H_ii, Re H_ij, Im H_ij) in the same order; note <B_a, H> equals the
// coefficient for diagonal elements but twice it for off-diagonal ones, so
// code below always goes through the coordinate helpers instead of assuming
// orthonormality.
inline std::vector<Cmat> hermitian_basis(int d) {
  std::vector<Cmat> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (i == j) {
        Cmat e = Cmat::Zero(d, d);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
      } else {
        Cmat s = Cmat::Zero(d, d);
        s(i, j) = 1.0;
        s(j, i) = 1.0;
        basis.push_back(std::move(s));
        Cmat a = Cmat::Zero(d, d);
        a(i, j) = Complex(0, 1);
        a(j, i) = Complex(0, -1);
        basis.push_back(std::move(a));
      }
    }
  }
  return basis;
}

inline Rvec hermitian_coords(const Cmat& h) {
  const int d = static_cast<int>(h.rows());
  Rvec v(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (i == j) {
        v(idx++) = h(i, i).real();
      } else {
        v(idx++) = h(i, j).real();
        v(idx++) = h(i, j).imag();
      }
    }
  }
  return v;
}

inline Cmat from_hermitian_coords(const Rvec& v, int d) {
  Cmat h = Cmat::Zero(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (i == j) {
        h(i, i) = v(idx++);
      } else {
        const double re = v(idx++);
        const double im = v(idx++);
        h(i, j) = Complex(re, im);
        h(j, i) = Complex(re, -im);
      }
    }
  }
  return h;
}

// Real symmetric embedding of a Hermitian matrix,
//
//   T(H) = [ Re H  -Im H ]
//          [ Im H   Re H ]
//
// T preserves eigenvalues (each with doubled multiplicity), so H >= 0 iff
// T(H) >= 0, and satisfies <T(A)/2, T(X)> = tr[A X] for Hermitian A, X.
// That factor of one half is applied by the solver lowering, not here.
inline Rmat realify(const Cmat& h) {
  const int d = static_cast<int>(h.rows());
  Rmat z(2 * d, 2 * d);
  z.topLeftCorner(d, d) = h.real();
  z.topRightCorner(d, d) = -h.imag();
  z.bottomLeftCorner(d, d) = h.imag();
  z.bottomRightCorner(d, d) = h.real();
  return z;
}

// Inverse of realify on the range of T. A general symmetric Z is first
// averaged with J Z J^T (J the embedding of i*I), which projects onto the
// image of T without leaving the PSD cone; the projection of a solver
// iterate is what the lift of a complex-valued program consumes.
inline Cmat complexify(const Rmat& z) {
  const int d = static_cast<int>(z.rows()) / 2;
  Rmat re = 0.5 * (z.topLeftCorner(d, d) + z.bottomRightCorner(d, d));
  Rmat im = 0.5 * (z.bottomLeftCorner(d, d) - z.topRightCorner(d, d));
  Cmat h = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return 0.5 * (h + h.adjoint().eval());
}

}  // namespace roikit
