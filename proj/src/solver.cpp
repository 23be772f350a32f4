// SPDX-License-Identifier: Apache-2.0

#include "opconn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opconn/error.hpp"
#include "opconn/io.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

PsdMatrixXd computed_psd(const MatrixXd &m) {
  return PsdMatrixXd(m, 1e-10 * std::max(1.0, m.norm()));
}

void require_pd(const PsdMatrixXd &a, const Tolerances &tol) {
  if (!(a.min_eigenvalue() > tol.psd_tol)) {
    std::ostringstream os;
    os << "A must be positive definite; min eigenvalue " << a.min_eigenvalue();
    throw Error(ErrorKind::NotPd, os.str());
  }
}

// Gate Sp(A^{-1/2} B A^{-1/2}) against the range of k f and invert on the spectrum.
SolveReport solve_reduced(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                          const Tolerances &tol) {
  detail::require_same_dim(a.matrix(), b.matrix());
  require_pd(a, tol);
  SolveReport report;
  const FunctionAnalysis analysis = sigma.analysis();
  report.range = analysis.range;

  const auto [root, inv_root] = sqrt_pair<double>(a, tol.psd_tol);
  const PsdMatrixXd reduced = computed_psd(congruence_product(inv_root.matrix(), b.matrix()));
  const auto eig = snap_negligible(reduced.eig());

  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    const double lambda = eig.eigenvalues(i);
    if (!analysis.range.accepts(lambda, tol.range_tol)) {
      double gap = analysis.range.gap(lambda);
      if (gap == 0.0 && !analysis.range.unbounded()) gap = analysis.range.upper - lambda;
      report.violating_eigenvalues.push_back({lambda, gap});
    }
  }
  if (!report.violating_eigenvalues.empty()) {
    report.status = SolveStatus::RangeViolation;
    std::ostringstream os;
    os << report.violating_eigenvalues.size()
       << " eigenvalue(s) of A^{-1/2} B A^{-1/2} outside the range of the representing function";
    report.detail = os.str();
    return report;
  }

  const RangeDescriptor &range = analysis.range;
  VectorXd preimage(eig.dim());
  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    double y = std::max(eig.eigenvalues(i), range.lower);
    if (!range.unbounded() && range.upper_attained) y = std::min(y, range.upper);
    preimage(i) = sigma.representing_inverse(y);
  }
  const MatrixXd inner = eig.compose(preimage);
  report.x = computed_psd(congruence_product(root.matrix(), inner));
  report.status = SolveStatus::UniqueSolution;
  return report;
}

} // namespace

const char *to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::UniqueSolution: return "UniqueSolution";
  case SolveStatus::RangeViolation: return "RangeViolation";
  case SolveStatus::NotCancellable: return "NotCancellable";
  }
  return "Unknown";
}

std::string SolveReport::to_text() const {
  std::ostringstream os;
  os << "status: " << to_string(status) << "\n";
  os << "range: [" << text::format_double(range.lower) << ", " << text::format_double(range.upper)
     << (range.upper_attained ? "]" : ")") << "\n";
  os << "residual: " << text::format_double(residual) << "\n";
  os << "violating_eigenvalues:";
  if (violating_eigenvalues.empty()) {
    os << " []\n";
  } else {
    os << "\n";
    for (const auto &v : violating_eigenvalues) {
      os << "  - lambda: " << text::format_double(v.lambda) << ", gap: " << text::format_double(v.gap)
         << "\n";
    }
  }
  if (x) os << "X: " << io::format_matrix(x->matrix()) << "\n";
  if (!detail.empty()) os << "detail: " << detail << "\n";
  return os.str();
}

SolveReport solve_left(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                       const Tolerances &tol) {
  if (sigma.analysis().props.is_constant) {
    SolveReport report;
    report.status = SolveStatus::NotCancellable;
    report.range = sigma.analysis().range;
    report.detail = "connection is a scalar multiple of the left-trivial mean";
    return report;
  }
  SolveReport report = solve_reduced(sigma, a, b, tol);
  if (report.x) report.residual = (evaluate(sigma, a, *report.x, tol).matrix() - b.matrix()).norm();
  return report;
}

SolveReport solve_right(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                        const Tolerances &tol) {
  if (sigma.analysis().props.is_scalar_identity) {
    SolveReport report;
    report.status = SolveStatus::NotCancellable;
    report.range = sigma.analysis().range;
    report.detail = "connection is a scalar multiple of the right-trivial mean";
    return report;
  }
  SolveReport report = solve_reduced(transpose_connection(sigma), a, b, tol);
  if (report.x) report.residual = (evaluate(sigma, *report.x, a, tol).matrix() - b.matrix()).norm();
  return report;
}

bool always_solvable(const Connection &sigma) {
  const FunctionProps props = sigma.analysis().props;
  return props.f0 == 0.0 && !props.bounded && !props.is_constant;
}

SolvabilityCondition quasi_arithmetic_solvability(double p, double alpha, const PdMatrixXd &a,
                                                  const PsdMatrixXd &b, const Tolerances &tol) {
  // Validates p and alpha.
  (void)FunctionSpec::quasi_arithmetic(p, alpha);
  detail::require_same_dim(a.matrix(), b.matrix());
  require_pd(a, tol);
  SolvabilityCondition out;
  std::ostringstream cond;
  if (p == 0.0) {
    out.solvable = true;
    cond << "always solvable (range of x^alpha is [0, inf))";
  } else {
    out.threshold = std::pow(1.0 - alpha, 1.0 / p);
    const MatrixXd scaled_a = out.threshold * a.matrix();
    if (p > 0.0) {
      out.margin = min_eigenvalue((b.matrix() - scaled_a).eval());
      out.solvable = loewner_leq(scaled_a, b.matrix(), tol.order_tol);
      cond << "B >= " << text::format_double(out.threshold) << " A";
    } else {
      out.strict = true;
      out.margin = min_eigenvalue((scaled_a - b.matrix()).eval());
      out.solvable = out.margin > tol.order_tol;
      cond << "B < " << text::format_double(out.threshold) << " A";
    }
  }
  out.condition = cond.str();
  if (!out.solvable) return out;

  // X = A #_{p, 1/alpha} B = A^{1/2} f_{p, 1/alpha}(A^{-1/2} B A^{-1/2}) A^{1/2}.
  const double beta = 1.0 / alpha;
  auto weight_extrapolated = [p, beta](double x) {
    if (p == 0.0) return std::pow(x, beta);
    if (x == 0.0 && p < 0.0) return 0.0;
    const double base = std::max(0.0, (1.0 - beta) + beta * std::pow(x, p));
    if (base == 0.0) return 0.0;
    return std::pow(base, 1.0 / p);
  };
  const auto [root, inv_root] = sqrt_pair<double>(a, tol.psd_tol);
  const PsdMatrixXd reduced = computed_psd(congruence_product(inv_root.matrix(), b.matrix()));
  const MatrixXd inner = apply_fn(snap_negligible(reduced.eig()), weight_extrapolated);
  out.x = computed_psd(congruence_product(root.matrix(), inner));
  return out;
}

double solution_continuity_probe(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                                 double delta, const Tolerances &tol) {
  if (!always_solvable(sigma))
    throw Error(ErrorKind::DomainError, "continuity probe needs f(0) = 0 and f unbounded");
  if (delta == 0.0) return 0.0;
  const SolveReport base = solve_left(sigma, a, b, tol);
  if (!base.solved()) throw Error(ErrorKind::RangeError, "base equation has no solution");
  const Eigen::Index n = a.dim();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      MatrixXd e = MatrixXd::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      }
      const MatrixXd perturbed = b.matrix() + delta * e;
      if (min_eigenvalue(perturbed) < -tol.psd_tol) continue;
      const SolveReport moved = solve_left(sigma, a, PsdMatrixXd(perturbed, tol.psd_tol), tol);
      if (!moved.solved()) throw Error(ErrorKind::RangeError, "perturbed equation has no solution");
      worst = std::max(worst, (moved.x->matrix() - base.x->matrix()).norm() / std::abs(delta));
    }
  }
  return worst;
}

} // namespace opconn
