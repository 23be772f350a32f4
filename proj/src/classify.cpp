// SPDX-License-Identifier: Apache-2.0

#include "opconn/classify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opconn/error.hpp"
#include "opconn/random.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

constexpr double kGridTol = 1e-12;
// "0 in Sp(.)" through regularized limits.
constexpr double kSpectrumZeroTol = 1e-6;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> xs(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) xs[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return xs;
}

const char *yes_no(bool b) { return b ? "true" : "false"; }

// Largest |k f(x) - h(x)| / (1 + |h(x)|) over the grid.
template <typename H>
double grid_distance(const Connection &sigma, H &&h) {
  double worst = 0.0;
  for (double x : log_grid(1e-3, 1e3, 121)) {
    const double target = h(x);
    worst = std::max(worst, std::abs(sigma.representing(x) - target) / (1.0 + std::abs(target)));
  }
  return worst;
}

bool nontrivial_mean_of(const Connection &sigma) {
  if (std::abs(sigma.representing(1.0) - 1.0) > kGridTol) return false;
  return grid_distance(sigma, [](double) { return 1.0; }) > kGridTol &&
         grid_distance(sigma, [](double x) { return x; }) > kGridTol;
}

} // namespace

std::string ClassificationReport::to_text() const {
  std::ostringstream os;
  os << "connection: " << connection << "\n";
  os << "left_cancellable: " << yes_no(left_cancellable) << "\n";
  os << "right_cancellable: " << yes_no(right_cancellable) << "\n";
  os << "cancellable: " << yes_no(cancellable) << "\n";
  os << "is_mean: " << yes_no(is_mean) << "\n";
  os << "nontrivial_mean: " << yes_no(nontrivial_mean) << "\n";
  os << "symmetric: " << yes_no(symmetric) << "\n";
  os << "regular: " << yes_no(regular) << "\n";
  os << "transpose_regular: " << yes_no(transpose_regular) << "\n";
  os << "always_solvable: " << yes_no(always_solvable) << "\n";
  os << "measure_known: " << yes_no(measure_known) << "\n";
  os << "measure_agrees: " << yes_no(measure_agrees) << "\n";
  os << "witnesses:\n";
  for (const auto &[name, value] : witnesses) os << "  " << name << ": " << text::format_double(value) << "\n";
  return os.str();
}

ClassificationReport classify_connection(const Connection &sigma) {
  ClassificationReport r;
  r.connection = sigma.describe();
  const FunctionAnalysis analysis = sigma.analysis();
  const FunctionProps &props = analysis.props;

  r.left_cancellable = !props.is_constant;
  r.right_cancellable = !props.is_scalar_identity;
  r.cancellable = r.left_cancellable && r.right_cancellable;
  const double f1 = sigma.representing(1.0);
  r.is_mean = std::abs(f1 - 1.0) <= kGridTol;
  r.nontrivial_mean = nontrivial_mean_of(sigma);
  const double symmetry_gap =
      grid_distance(sigma, [&](double x) { return x * sigma.representing(1.0 / x); });
  r.symmetric = symmetry_gap <= kGridTol;
  r.regular = props.f0 > 0.0;
  r.transpose_regular = props.transpose_f0 > 0.0;
  r.always_solvable = opconn::always_solvable(sigma);

  r.witnesses["f0"] = props.f0;
  r.witnesses["f1"] = f1;
  r.witnesses["transpose_f0"] = props.transpose_f0;
  r.witnesses["symmetry_gap"] = symmetry_gap;
  r.witnesses["range_lower"] = analysis.range.lower;
  r.witnesses["range_upper"] = analysis.range.upper;

  if (sigma.measure()) {
    r.measure_known = true;
    const FiniteMeasure mu = sigma.measure()->scaled(sigma.scale());
    const double total = mass(mu);
    const double at0 = mu.atom_at(0.0);
    const double at1 = mu.atom_at(1.0);
    const double slack = kGridTol * (1.0 + total);
    const bool dirac0_multiple = std::abs(total - at0) <= slack;
    const bool dirac1_multiple = std::abs(total - at1) <= slack;
    r.measure_agrees = r.left_cancellable == !dirac0_multiple &&
                       r.right_cancellable == !dirac1_multiple && r.regular == (at0 > 0.0) &&
                       r.transpose_regular == (at1 > 0.0);
    // Density quadrature carries its own error, so mass is compared loosely.
    if (r.is_mean) r.measure_agrees = r.measure_agrees && std::abs(total - 1.0) <= 1e-8;
    r.witnesses["mu_mass"] = total;
    r.witnesses["mu_atom_0"] = at0;
    r.witnesses["mu_atom_1"] = at1;
  }
  return r;
}

std::string RegularityEvidence::to_text() const {
  std::ostringstream os;
  os << "connection: " << connection << "\n";
  os << "regular: " << yes_no(regular) << "\n";
  os << "f0: " << text::format_double(f0) << "\n";
  os << "identity_zero_consistency: " << text::format_double(identity_zero_consistency) << "\n";
  os << "checks:\n";
  for (const auto &c : checks) {
    os << "  " << c.name << ":\n";
    os << "    available: " << yes_no(c.available) << "\n";
    if (c.available) {
      os << "    value: " << text::format_double(c.value) << "\n";
      os << "    indicates_nonregular: " << yes_no(c.indicates_nonregular) << "\n";
    }
  }
  os << "consistent: " << yes_no(consistent) << "\n";
  return os.str();
}

RegularityEvidence regularity_witness(const Connection &sigma, int dim, std::uint64_t seed,
                                      const Tolerances &tol, int samples) {
  if (dim < 1 || dim > kMaxHarnessDim) {
    std::ostringstream os;
    os << "dimension " << dim << " outside [1, " << kMaxHarnessDim << "]";
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (samples < 1) throw Error(ErrorKind::DomainError, "need at least one sample");
  RegularityEvidence ev;
  ev.connection = sigma.describe();
  ev.f0 = sigma.analysis().props.f0;
  ev.regular = ev.f0 > 0.0;

  const auto n = static_cast<Eigen::Index>(dim);
  const MatrixXd identity = MatrixXd::Identity(n, n);
  const MatrixXd zero = MatrixXd::Zero(n, n);

  ev.checks.push_back({"f_at_zero", true, ev.f0, ev.f0 == 0.0});

  RegularityCheck atom{"measure_atom_at_zero", false, 0.0, false};
  if (sigma.measure()) {
    atom.available = true;
    atom.value = sigma.scale() * sigma.measure()->atom_at(0.0);
    atom.indicates_nonregular = atom.value == 0.0;
  }
  ev.checks.push_back(atom);

  const MatrixXd i_zero = evaluate(sigma, identity, zero, tol).matrix();
  ev.identity_zero_consistency = (i_zero - ev.f0 * identity).norm();
  const double i_zero_norm = i_zero.norm();
  ev.checks.push_back({"identity_with_zero", true, i_zero_norm, i_zero_norm <= 1e-9});

  double worst_a_zero = 0.0;
  double worst_identity_singular = 0.0;
  double worst_x_singular = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const MatrixXd a = random_pd(rng, dim);
    const MatrixXd singular = random_psd(rng, dim, dim - 1);
    const MatrixXd x = random_pd(rng, dim);
    worst_a_zero = std::max(worst_a_zero, evaluate(sigma, a, zero, tol).matrix().norm());
    worst_identity_singular =
        std::max(worst_identity_singular, min_eigenvalue(evaluate(sigma, identity, singular, tol).matrix()));
    worst_x_singular =
        std::max(worst_x_singular, min_eigenvalue(evaluate(sigma, x, singular, tol).matrix()));
  }
  ev.checks.push_back({"random_with_zero", true, worst_a_zero, worst_a_zero <= 1e-7});
  ev.checks.push_back({"identity_with_singular", true, worst_identity_singular,
                       worst_identity_singular <= kSpectrumZeroTol});
  ev.checks.push_back(
      {"random_with_singular", true, worst_x_singular, worst_x_singular <= kSpectrumZeroTol});

  ev.consistent = ev.identity_zero_consistency <= 1e-9;
  for (const auto &c : ev.checks) {
    if (c.available && c.indicates_nonregular == ev.regular) ev.consistent = false;
  }
  return ev;
}

bool ProjectionReport::consistent() const {
  if (sandwich_violations != 0 || fixed_non_projections != 0) return false;
  return !nonregular || projections_fixed;
}

std::string ProjectionReport::to_text() const {
  std::ostringstream os;
  os << "connection: " << connection << "\n";
  os << "nonregular: " << yes_no(nonregular) << "\n";
  os << "nontrivial_mean: " << yes_no(nontrivial_mean) << "\n";
  os << "projections_tested: " << projections_tested << "\n";
  os << "max_projection_gap: " << text::format_double(max_projection_gap) << "\n";
  os << "projections_fixed: " << yes_no(projections_fixed) << "\n";
  os << "fixed_point_trials: " << fixed_point_trials << "\n";
  os << "fixed_points_found: " << fixed_points_found << "\n";
  os << "fixed_non_projections: " << fixed_non_projections << "\n";
  os << "sandwich_points: " << sandwich_points << "\n";
  os << "sandwich_violations: " << sandwich_violations << "\n";
  os << "consistent: " << yes_no(consistent()) << "\n";
  return os.str();
}

ProjectionReport projection_fixed_points(const Connection &sigma, int dim, std::uint64_t seed,
                                         const Tolerances &tol, int trials) {
  const double f1 = sigma.representing(1.0);
  if (std::abs(f1 - 1.0) > kGridTol) {
    throw Error(ErrorKind::NotAMean, "f(1) = " + text::format_double(f1) + ", not 1");
  }
  if (dim < 1 || dim > kMaxHarnessDim) throw Error(ErrorKind::DomainError, "dimension out of range");
  if (trials < 1) throw Error(ErrorKind::DomainError, "need at least one trial");

  ProjectionReport r;
  r.connection = sigma.describe();
  r.nonregular = sigma.analysis().props.f0 == 0.0;
  r.nontrivial_mean = nontrivial_mean_of(sigma);
  const MatrixXd identity = MatrixXd::Identity(dim, dim);

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<int> rank_dist(0, dim);
    const MatrixXd p = random_projection(rng, dim, rank_dist(rng));
    const double gap = (evaluate(sigma, identity, p, tol).matrix() - p).norm();
    r.max_projection_gap = std::max(r.max_projection_gap, gap);
    ++r.projections_tested;
  }
  r.projections_fixed = r.max_projection_gap <= 1e-9;

  // Candidates for I s A = A: eigenvalues drawn from {0, 1, (0, 2)}, so both
  // projections and non-projections appear.
  if (r.nontrivial_mean) {
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed ^ 0x5a5a5a5a5a5a5a5aULL, static_cast<std::uint64_t>(t)));
      std::uniform_int_distribution<int> pick(0, 2);
      std::uniform_real_distribution<double> inner(0.0, 2.0);
      VectorXd lambda(dim);
      for (int i = 0; i < dim; ++i) {
        const int c = pick(rng);
        lambda(i) = c == 0 ? 0.0 : c == 1 ? 1.0 : inner(rng);
      }
      const MatrixXd q = random_orthogonal(rng, dim);
      const PsdMatrixXd a(q * lambda.asDiagonal() * q.transpose(), tol.psd_tol);
      const MatrixXd fa = evaluate(sigma, PsdMatrixXd::identity(dim), a, tol).matrix();
      ++r.fixed_point_trials;
      if ((fa - a.matrix()).norm() <= 1e-8) {
        ++r.fixed_points_found;
        if (!is_projection(a, 1e-6)) ++r.fixed_non_projections;
      }
    }

    for (double x : log_grid(1e-3, 1e3, 1000)) {
      const double fx = sigma.representing(x);
      ++r.sandwich_points;
      bool ok = true;
      if (x < 1.0) ok = x < fx && fx < 1.0;
      if (x > 1.0) ok = 1.0 < fx && fx < x;
      if (!ok) ++r.sandwich_violations;
    }
  }
  return r;
}

SolveReport zero_equation(const Connection &sigma, const PdMatrixXd &a, const Tolerances &tol) {
  return solve_left(sigma, a, PsdMatrixXd::zero(a.dim()), tol);
}

} // namespace opconn
