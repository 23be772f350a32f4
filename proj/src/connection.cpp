// SPDX-License-Identifier: Apache-2.0

#include "opconn/connection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opconn/error.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

PsdMatrixXd computed_psd(const MatrixXd &m) {
  return PsdMatrixXd(m, 1e-10 * std::max(1.0, m.norm()));
}

// k A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2} for A > psd_tol.
PsdMatrixXd congruence_path(const PsdMatrixXd &a, const PsdMatrixXd &b, const FunctionSpec &f,
                            double k, double psd_tol) {
  const auto [root, inv_root] = sqrt_pair(a, psd_tol);
  const MatrixXd m = congruence_product(inv_root.matrix(), b.matrix());
  const PsdMatrixXd reduced = computed_psd(m);
  const MatrixXd fm = apply_fn(snap_negligible(reduced.eig()), [&f](double x) { return eval_fn(f, x); });
  return computed_psd(k * congruence_product(root.matrix(), fm));
}

bool atoms_only(const std::optional<FiniteMeasure> &mu) {
  return mu && !mu->density();
}

} // namespace

RegularizationSchedule RegularizationSchedule::standard() {
  RegularizationSchedule s;
  for (int j = 0; j <= 16; ++j) s.epsilons.push_back(1e-2 * std::ldexp(1.0, -j));
  return s;
}

void RegularizationSchedule::validate() const {
  if (epsilons.empty()) throw Error(ErrorKind::DomainError, "regularization schedule is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0))
      throw Error(ErrorKind::DomainError, "regularization epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw Error(ErrorKind::DomainError, "regularization epsilons must strictly decrease");
  }
  if (!(convergence_tol >= 0.0))
    throw Error(ErrorKind::DomainError, "convergence tolerance must be nonnegative");
}

double measure_function_discrepancy(const FunctionSpec &f, const FiniteMeasure &mu) {
  double worst = 0.0;
  for (int i = 0; i <= 80; ++i) {
    const double x = std::pow(10.0, -2.0 + 4.0 * i / 80.0);
    worst = std::max(worst, std::abs(fn_from_measure(mu, x) - eval_fn(f, x)) / (1.0 + x));
  }
  return worst;
}

Connection Connection::from_function(FunctionSpec f, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::DomainError, "connection scale must be finite and nonnegative");
  Connection c(std::move(f), scale);
  c.measure_ = known_measure_of(c.function_);
  return c;
}

Connection Connection::from_measure(FiniteMeasure mu, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::DomainError, "connection scale must be finite and nonnegative");
  Connection c(function_of_measure(mu), scale);
  c.function_from_measure_ = true;
  c.measure_ = std::move(mu);
  return c;
}

Connection Connection::from_both(FunctionSpec f, FiniteMeasure mu, double scale) {
  const double gap = measure_function_discrepancy(f, mu);
  if (gap > 1e-6) {
    std::ostringstream os;
    os << "measure and function disagree by " << gap << " on the check grid";
    throw Error(ErrorKind::DomainError, os.str());
  }
  Connection c = from_function(std::move(f), scale);
  c.measure_ = std::move(mu);
  return c;
}

double Connection::representing(double x) const { return scale_ * eval_fn(function_, x); }

double Connection::representing_inverse(double y) const {
  if (scale_ == 0.0) throw Error(ErrorKind::NotInjective, "zero connection has no inverse");
  return eval_inverse(function_, y / scale_);
}

FunctionAnalysis Connection::analysis() const {
  FunctionAnalysis a = analyze_fn(function_);
  if (scale_ == 0.0) {
    a.props.is_constant = true;
    a.props.is_scalar_identity = true;
    a.props.injective = false;
    a.props.bounded = true;
    a.props.f0 = a.props.transpose_f0 = 0.0;
    a.range = {0.0, 0.0, true, false};
    return a;
  }
  a.props.f0 *= scale_;
  a.props.transpose_f0 *= scale_;
  a.range.lower *= scale_;
  a.range.upper *= scale_;
  return a;
}

std::string Connection::describe() const {
  std::ostringstream os;
  if (function_from_measure_) {
    os << "measure=" << measure_->to_string();
  } else {
    os << "fn=" << function_.to_string();
  }
  os << " scale=" << text::format_double(scale_);
  return os.str();
}

PsdMatrixXd evaluate(const Connection &sigma, const PsdMatrixXd &a, const PsdMatrixXd &b,
                     const Tolerances &tol, const RegularizationSchedule &schedule) {
  detail::require_same_dim(a.matrix(), b.matrix());
  const Eigen::Index n = a.dim();
  const double k = sigma.scale();
  const FunctionSpec &f = sigma.function();
  if (k == 0.0) return PsdMatrixXd::zero(n);
  if (f.kind() == FunctionKind::Constant) return computed_psd(k * f.k() * a.matrix());
  if (f.kind() == FunctionKind::ScalarIdentity) return computed_psd(k * f.k() * b.matrix());

  if (a.min_eigenvalue() > tol.psd_tol) return congruence_path(a, b, f, k, tol.psd_tol);
  // A s B = B s' A with s' the transpose; exact when only A is singular.
  if (b.min_eigenvalue() > tol.psd_tol)
    return congruence_path(b, a, transpose_fn(f), k, tol.psd_tol);
  // Weighted harmonic means of PSD operands are exact through the parallel-sum form.
  if (atoms_only(sigma.measure())) return computed_psd(k * eval_from_measure(*sigma.measure(), a, b).matrix());

  schedule.validate();
  const MatrixXd identity = MatrixXd::Identity(n, n);
  MatrixXd previous;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < schedule.epsilons.size(); ++j) {
    const PsdMatrixXd shifted(a.matrix() + schedule.epsilons[j] * identity);
    PsdMatrixXd x = congruence_path(shifted, b, f, k, 0.0);
    if (j > 0) {
      gap = (x.matrix() - previous).norm();
      if (gap <= schedule.convergence_tol) return x;
    }
    previous = x.matrix();
  }
  std::ostringstream os;
  os << "regularized evaluation did not settle: last two iterates differ by " << gap
     << " (tolerance " << schedule.convergence_tol << ")";
  throw Error(ErrorKind::NoConvergence, os.str());
}

PsdMatrixXd evaluate(const Connection &sigma, const MatrixXd &a, const MatrixXd &b,
                     const Tolerances &tol) {
  return evaluate(sigma, PsdMatrixXd(a, tol.psd_tol), PsdMatrixXd(b, tol.psd_tol), tol);
}

Connection transpose_connection(const Connection &sigma) {
  if (sigma.function_from_measure()) {
    return Connection::from_measure(sigma.measure()->reflected(), sigma.scale());
  }
  Connection t = Connection::from_function(transpose_fn(sigma.function()), sigma.scale());
  if (sigma.measure() && !t.measure()) {
    return Connection::from_both(t.function(), sigma.measure()->reflected(), sigma.scale());
  }
  return t;
}

} // namespace opconn
