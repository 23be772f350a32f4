// SPDX-License-Identifier: Apache-2.0

// Spectral calculus on real symmetric matrices: eigendecomposition, matrix
// functions, Loewner-order comparison and congruence transforms.
//
// Everything here is templated on the scalar type and works on dense Eigen
// matrices. The checked wrappers (SymmetricMatrix, PsdMatrix, PdMatrix) carry
// their eigendecomposition so that repeated functional calculus on the same
// operand costs a single solve.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "opconn/error.hpp"

namespace opconn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Numerical thresholds shared by every module.
struct Tolerances {
  double psd_tol = 1e-10;    // eigenvalue floor for PSD / PD validation
  double order_tol = 1e-8;   // Loewner comparisons
  double range_tol = 1e-8;   // spectrum-in-range gate of the solver
  double solve_rtol = 1e-7;  // relative residual accepted for a solution

  void validate() const {
    if (!(psd_tol >= 0 && order_tol >= 0 && range_tol >= 0 && solve_rtol >= 0))
      throw Error(ErrorKind::DomainError, "tolerances must be nonnegative");
  }
};

/// Largest harness dimension.
inline constexpr int kMaxHarnessDim = 32;

template <typename Scalar>
struct EigenDecomposition {
  Vector<Scalar> eigenvalues;   // ascending
  Matrix<Scalar> eigenvectors;  // orthonormal columns

  Eigen::Index dim() const { return eigenvalues.size(); }

  Matrix<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }

  /// Q diag(values) Q^T, exactly symmetrized.
  Matrix<Scalar> compose(const Vector<Scalar> &values) const {
    Matrix<Scalar> m = eigenvectors * values.asDiagonal() * eigenvectors.transpose();
    return Scalar(0.5) * (m + m.transpose());
  }
};

namespace detail {

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived> &m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << ", expected square";
    throw Error(ErrorKind::DimMismatch, os.str());
  }
  if (m.rows() == 0) throw Error(ErrorKind::DimMismatch, "matrix dimension must be positive");
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has NaN or infinite entries");
}

template <typename A, typename B>
void require_same_dim(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "operand dimensions differ: " << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols();
    throw Error(ErrorKind::DimMismatch, os.str());
  }
}

} // namespace detail

/// Eigendecomposition of a symmetric matrix. Only the lower triangle is read.
template <typename Derived>
EigenDecomposition<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived> &a) {
  using Scalar = typename Derived::Scalar;
  detail::require_square_finite(a);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.derived().eval());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NonFinite, "symmetric eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// A real symmetric matrix. Construction symmetrizes via (M + M^T)/2.
template <typename Scalar>
class SymmetricMatrix {
public:
  SymmetricMatrix() = default;

  template <typename Derived>
  explicit SymmetricMatrix(const Eigen::MatrixBase<Derived> &m) {
    detail::require_square_finite(m);
    Matrix<Scalar> full = m.template cast<Scalar>();
    asymmetry_ = Scalar(0.5) * (full - full.transpose()).norm();
    m_ = Scalar(0.5) * (full + full.transpose());
  }

  static SymmetricMatrix identity(Eigen::Index n) {
    return SymmetricMatrix(Matrix<Scalar>::Identity(n, n));
  }

  const Matrix<Scalar> &matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  /// Frobenius norm of the antisymmetric part removed at construction.
  Scalar asymmetry() const { return asymmetry_; }

  EigenDecomposition<Scalar> eigh() const { return opconn::eigh(m_); }

protected:
  Matrix<Scalar> m_;
  Scalar asymmetry_ = 0;
};

/// Positive semidefinite matrix. Eigenvalues in [-tol, 0) are clamped to zero.
template <typename Scalar>
class PsdMatrix : public SymmetricMatrix<Scalar> {
public:
  PsdMatrix() = default;

  template <typename Derived>
  explicit PsdMatrix(const Eigen::MatrixBase<Derived> &m, Scalar tol = Scalar(1e-10))
      : SymmetricMatrix<Scalar>(m), tol_(tol) {
    validate();
  }

  explicit PsdMatrix(const SymmetricMatrix<Scalar> &s, Scalar tol = Scalar(1e-10))
      : SymmetricMatrix<Scalar>(s), tol_(tol) {
    validate();
  }

  /// Builds Q diag(values) Q^T without re-solving; values must already be >= 0.
  static PsdMatrix from_decomposition(EigenDecomposition<Scalar> eig, Scalar tol = Scalar(1e-10)) {
    PsdMatrix out;
    out.tol_ = tol;
    out.m_ = eig.compose(eig.eigenvalues);
    out.eig_ = std::move(eig);
    out.clamp();
    return out;
  }

  static PsdMatrix identity(Eigen::Index n) { return PsdMatrix(Matrix<Scalar>::Identity(n, n)); }
  static PsdMatrix zero(Eigen::Index n) { return PsdMatrix(Matrix<Scalar>::Zero(n, n)); }

  const EigenDecomposition<Scalar> &eig() const { return eig_; }
  Scalar min_eigenvalue() const { return eig_.eigenvalues(0); }
  Scalar max_eigenvalue() const { return eig_.eigenvalues(eig_.dim() - 1); }
  Scalar tolerance() const { return tol_; }

protected:
  void validate() {
    eig_ = opconn::eigh(this->m_);
    if (eig_.eigenvalues(0) < -tol_) {
      std::ostringstream os;
      os << "min eigenvalue " << eig_.eigenvalues(0) << " below -" << tol_;
      throw Error(ErrorKind::NotPsd, os.str());
    }
    clamp();
  }

  void clamp() {
    if (eig_.eigenvalues(0) >= 0) return;
    eig_.eigenvalues = eig_.eigenvalues.cwiseMax(Scalar(0));
    this->m_ = eig_.compose(eig_.eigenvalues);
  }

  EigenDecomposition<Scalar> eig_;
  Scalar tol_ = Scalar(1e-10);
};

/// Strictly positive definite matrix: min eigenvalue > tol.
template <typename Scalar>
class PdMatrix : public PsdMatrix<Scalar> {
public:
  PdMatrix() = default;

  template <typename Derived>
  explicit PdMatrix(const Eigen::MatrixBase<Derived> &m, Scalar tol = Scalar(1e-10))
      : PsdMatrix<Scalar>(m, tol) {
    require_pd();
  }

  explicit PdMatrix(const PsdMatrix<Scalar> &p) : PsdMatrix<Scalar>(p) { require_pd(); }

  static PdMatrix identity(Eigen::Index n) { return PdMatrix(Matrix<Scalar>::Identity(n, n)); }

private:
  void require_pd() const {
    if (!(this->min_eigenvalue() > this->tol_)) {
      std::ostringstream os;
      os << "min eigenvalue " << this->min_eigenvalue() << " not above " << this->tol_;
      throw Error(ErrorKind::NotPd, os.str());
    }
  }
};

using SymmetricMatrixXd = SymmetricMatrix<double>;
using PsdMatrixXd = PsdMatrix<double>;
using PdMatrixXd = PdMatrix<double>;

/// Zeroes eigenvalues at roundoff level, |lambda| <= 16 n eps max|lambda|, so that
/// phi(0) conventions apply to numerically singular operands.
template <typename Scalar>
EigenDecomposition<Scalar> snap_negligible(EigenDecomposition<Scalar> eig) {
  if (eig.dim() == 0) return eig;
  const Scalar top = eig.eigenvalues.cwiseAbs().maxCoeff();
  const Scalar cutoff = Scalar(16) * Scalar(eig.dim()) * std::numeric_limits<Scalar>::epsilon() * top;
  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    if (std::abs(eig.eigenvalues(i)) <= cutoff) eig.eigenvalues(i) = Scalar(0);
  }
  return eig;
}

/// Q phi(Lambda) Q^T from a precomputed decomposition.
template <typename Scalar, typename Fn>
Matrix<Scalar> apply_fn(const EigenDecomposition<Scalar> &eig, Fn &&phi) {
  Vector<Scalar> values(eig.dim());
  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    const Scalar lambda = eig.eigenvalues(i);
    const Scalar v = static_cast<Scalar>(phi(lambda));
    if (!std::isfinite(static_cast<double>(v))) {
      std::ostringstream os;
      os << "function undefined at eigenvalue " << lambda;
      throw Error(ErrorKind::DomainError, os.str());
    }
    values(i) = v;
  }
  return eig.compose(values);
}

/// phi(A) by spectral calculus on the PSD operand.
template <typename Scalar, typename Fn>
SymmetricMatrix<Scalar> apply_fn(const PsdMatrix<Scalar> &a, Fn &&phi) {
  return SymmetricMatrix<Scalar>(apply_fn(a.eig(), std::forward<Fn>(phi)));
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived> &a) {
  using Scalar = typename Derived::Scalar;
  detail::require_square_finite(a);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.derived().eval(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// A <= B in the Loewner order, i.e. min eig(B - A) >= -tol.
template <typename Scalar>
bool loewner_leq(const SymmetricMatrix<Scalar> &a, const SymmetricMatrix<Scalar> &b, Scalar tol) {
  detail::require_same_dim(a.matrix(), b.matrix());
  return min_eigenvalue((b.matrix() - a.matrix()).eval()) >= -tol;
}

template <typename DA, typename DB>
bool loewner_leq(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b,
                 typename DA::Scalar tol) {
  detail::require_same_dim(a, b);
  return min_eigenvalue((b - a).eval()) >= -tol;
}

/// Returns (A^{1/2}, A^{-1/2}) for A > tol.
template <typename Scalar>
std::pair<PdMatrix<Scalar>, PdMatrix<Scalar>> sqrt_pair(const PsdMatrix<Scalar> &a,
                                                        Scalar tol = Scalar(1e-10)) {
  if (!(a.min_eigenvalue() > tol)) {
    std::ostringstream os;
    os << "min eigenvalue " << a.min_eigenvalue() << " not above " << tol;
    throw Error(ErrorKind::NotPd, os.str());
  }
  EigenDecomposition<Scalar> root = a.eig();
  EigenDecomposition<Scalar> inv_root = a.eig();
  root.eigenvalues = a.eig().eigenvalues.cwiseSqrt();
  inv_root.eigenvalues = root.eigenvalues.cwiseInverse();
  // Reverse to keep eigenvalues ascending.
  inv_root.eigenvalues.reverseInPlace();
  inv_root.eigenvectors = inv_root.eigenvectors.rowwise().reverse().eval();
  return {PdMatrix<Scalar>(PsdMatrix<Scalar>::from_decomposition(std::move(root), tol)),
          PdMatrix<Scalar>(PsdMatrix<Scalar>::from_decomposition(std::move(inv_root), tol))};
}

/// C A C, symmetrized.
template <typename DC, typename DA>
Matrix<typename DA::Scalar> congruence_product(const Eigen::MatrixBase<DC> &c,
                                               const Eigen::MatrixBase<DA> &a) {
  detail::require_same_dim(c, a);
  Matrix<typename DA::Scalar> m = c * a * c;
  return typename DA::Scalar(0.5) * (m + m.transpose());
}

/// C A C for symmetric C and PSD A.
template <typename Scalar>
PsdMatrix<Scalar> congruence(const SymmetricMatrix<Scalar> &c, const PsdMatrix<Scalar> &a) {
  const Matrix<Scalar> m = congruence_product(c.matrix(), a.matrix());
  const Scalar scale = std::max(Scalar(1), c.matrix().squaredNorm() * a.max_eigenvalue());
  return PsdMatrix<Scalar>(m, a.tolerance() * scale);
}

/// Every eigenvalue within tol of 0 or 1.
template <typename Scalar>
bool is_projection(const PsdMatrix<Scalar> &a, Scalar tol) {
  const auto &ev = a.eig().eigenvalues;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > tol && std::abs(ev(i) - Scalar(1)) > tol) return false;
  }
  return true;
}

/// Spectral norm of a symmetric matrix.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived> &a) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.derived().eval(), Eigen::EigenvaluesOnly);
  const auto &ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

} // namespace opconn
