// SPDX-License-Identifier: Apache-2.0

#include "opconn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "opconn/error.hpp"
#include "opconn/quadrature.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

PsdMatrixXd computed_psd(const MatrixXd &m) {
  return PsdMatrixXd(m, 1e-10 * std::max(1.0, m.norm()));
}

bool numerically_pd(const PsdMatrixXd &a) {
  return a.min_eigenvalue() > 1e-12 * std::max(1.0, a.max_eigenvalue());
}

MatrixXd spd_inverse(const MatrixXd &m) {
  Eigen::LLT<MatrixXd> llt(m);
  MatrixXd inv = llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

} // namespace

double Density::operator()(double t) const {
  switch (kind) {
  case DensityKind::Arcsine:
    return scale / (std::numbers::pi * std::sqrt(t * (1.0 - t)));
  case DensityKind::Uniform: return scale;
  case DensityKind::Table: {
    const auto m = static_cast<double>(table.size() - 1);
    const double pos = std::clamp(t, 0.0, 1.0) * m;
    const auto i = std::min(static_cast<std::size_t>(pos), table.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return scale * ((1.0 - frac) * table[i] + frac * table[i + 1]);
  }
  case DensityKind::Custom: return scale * fn(t);
  }
  return 0.0;
}

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms, std::optional<Density> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  for (const Atom &a : atoms_) {
    if (!(a.t >= 0.0 && a.t <= 1.0) || !(a.w >= 0.0) || !std::isfinite(a.w)) {
      std::ostringstream os;
      os << "atom (" << a.t << ", " << a.w << ") needs t in [0,1] and finite w >= 0";
      throw Error(ErrorKind::DomainError, os.str());
    }
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom &x, const Atom &y) { return x.t < y.t; });
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i].t == atoms_[i - 1].t) {
      std::ostringstream os;
      os << "duplicate atom location t=" << atoms_[i].t;
      throw Error(ErrorKind::DomainError, os.str());
    }
  }
  if (density_) {
    const Density &d = *density_;
    if (!(d.scale >= 0.0) || !std::isfinite(d.scale))
      throw Error(ErrorKind::DomainError, "density scale must be finite and nonnegative");
    if (d.kind == DensityKind::Table) {
      if (d.table.size() < 2) throw Error(ErrorKind::DomainError, "density table needs >= 2 values");
      for (double v : d.table) {
        if (!(v >= 0.0) || !std::isfinite(v))
          throw Error(ErrorKind::DomainError, "density table values must be finite and >= 0");
      }
    }
    if (d.kind == DensityKind::Custom && !d.fn)
      throw Error(ErrorKind::DomainError, "custom density has no evaluator");
    discretize();
  }
}

// Substitution t = sin^2(theta) on (0, pi/2): dt = sin(2 theta) d theta. For the
// arcsine density the Jacobian cancels the endpoint singularities exactly.
void FiniteMeasure::discretize() {
  const Density &d = *density_;
  const QuadratureRule rule = gauss_legendre(d.nodes, 0.0, 0.5 * std::numbers::pi);
  quadrature_.clear();
  quadrature_.reserve(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = rule.nodes[i];
    const double s = std::sin(theta);
    const double t = s * s;
    double w;
    if (d.kind == DensityKind::Arcsine) {
      w = d.scale * (2.0 / std::numbers::pi) * rule.weights[i];
    } else {
      const double rho = d(t);
      if (!(rho >= 0.0) || !std::isfinite(rho)) {
        std::ostringstream os;
        os << "density value " << rho << " at t=" << t << " is not finite and nonnegative";
        throw Error(ErrorKind::DomainError, os.str());
      }
      w = rho * std::sin(2.0 * theta) * rule.weights[i];
    }
    quadrature_.push_back({t, w});
  }
}

FiniteMeasure FiniteMeasure::dirac(double t, double w) { return FiniteMeasure({{t, w}}); }

FiniteMeasure FiniteMeasure::arcsine(double scale, int nodes) {
  Density d;
  d.kind = DensityKind::Arcsine;
  d.scale = scale;
  d.nodes = nodes;
  return FiniteMeasure({}, d);
}

double FiniteMeasure::atom_at(double t) const {
  for (const Atom &a : atoms_) {
    if (a.t == t) return a.w;
  }
  return 0.0;
}

double FiniteMeasure::density_mass() const {
  double m = 0.0;
  for (const Atom &q : quadrature_) m += q.w;
  return m;
}

FiniteMeasure FiniteMeasure::scaled(double k) const {
  if (!(k >= 0.0)) throw Error(ErrorKind::DomainError, "measure scale must be nonnegative");
  std::vector<Atom> atoms = atoms_;
  for (Atom &a : atoms) a.w *= k;
  std::optional<Density> density = density_;
  if (density) density->scale *= k;
  return FiniteMeasure(std::move(atoms), std::move(density));
}

FiniteMeasure FiniteMeasure::reflected() const {
  std::vector<Atom> atoms = atoms_;
  for (Atom &a : atoms) a.t = 1.0 - a.t;
  std::optional<Density> density = density_;
  if (density) {
    if (density->kind == DensityKind::Table) {
      std::reverse(density->table.begin(), density->table.end());
    } else if (density->kind == DensityKind::Custom) {
      density->fn = [fn = density->fn](double t) { return fn(1.0 - t); };
      density->name = "reflect(" + density->name + ")";
    }
  }
  return FiniteMeasure(std::move(atoms), std::move(density));
}

std::string FiniteMeasure::to_string() const {
  std::ostringstream os;
  os << "atoms=[";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << ',';
    os << '(' << text::format_double(atoms_[i].t) << ',' << text::format_double(atoms_[i].w) << ')';
  }
  os << ']';
  if (density_) {
    const Density &d = *density_;
    os << " density=";
    switch (d.kind) {
    case DensityKind::Arcsine: os << "arcsine"; break;
    case DensityKind::Uniform: os << "uniform"; break;
    case DensityKind::Table:
      os << "table:";
      for (std::size_t i = 0; i < d.table.size(); ++i) {
        if (i) os << ';';
        os << text::format_double(d.table[i]);
      }
      break;
    case DensityKind::Custom: os << "custom:" << d.name; break;
    }
    os << " scale=" << text::format_double(d.scale) << " nodes=" << d.nodes;
  }
  return os.str();
}

FiniteMeasure FiniteMeasure::parse(std::string_view text) {
  std::vector<Atom> atoms;
  std::optional<Density> density;
  std::optional<double> scale;
  std::optional<int> nodes;

  std::string_view rest = text::trim(text);
  while (!rest.empty()) {
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse, "expected key=value in measure spec near '" + std::string(rest) + "'");
    const std::string key(text::trim(rest.substr(0, eq)));
    rest = text::trim(rest.substr(eq + 1));
    std::string_view value;
    if (key == "atoms") {
      if (rest.empty() || rest.front() != '[')
        throw Error(ErrorKind::Parse, "atoms must be a bracketed list [(t,w),...]");
      const auto close = rest.find(']');
      if (close == std::string_view::npos) throw Error(ErrorKind::Parse, "unterminated atom list");
      value = rest.substr(1, close - 1);
      rest = text::trim(rest.substr(close + 1));
      std::string_view list = value;
      while (true) {
        const auto open = list.find('(');
        if (open == std::string_view::npos) break;
        const auto shut = list.find(')', open);
        if (shut == std::string_view::npos) throw Error(ErrorKind::Parse, "unterminated atom tuple");
        const auto parts = text::split(list.substr(open + 1, shut - open - 1), ',');
        if (parts.size() != 2) throw Error(ErrorKind::Parse, "atom tuples are (t,w)");
        atoms.push_back({text::parse_double(parts[0], "atom t"), text::parse_double(parts[1], "atom w")});
        list = list.substr(shut + 1);
      }
      if (!text::trim(list).empty() && text::trim(list) != ",")
        throw Error(ErrorKind::Parse, "unexpected text in atom list");
      continue;
    }
    const auto space = rest.find_first_of(" \t");
    value = rest.substr(0, space);
    rest = space == std::string_view::npos ? std::string_view{} : text::trim(rest.substr(space));
    if (key == "density") {
      Density d;
      if (value == "arcsine") {
        d.kind = DensityKind::Arcsine;
      } else if (value == "uniform") {
        d.kind = DensityKind::Uniform;
      } else if (value.substr(0, 6) == "table:") {
        d.kind = DensityKind::Table;
        for (auto v : text::split(value.substr(6), ';')) d.table.push_back(text::parse_double(v, "density table"));
      } else {
        throw Error(ErrorKind::Parse, "unknown density '" + std::string(value) + "'");
      }
      density = d;
    } else if (key == "scale") {
      scale = text::parse_double(value, "scale");
    } else if (key == "nodes") {
      nodes = static_cast<int>(text::parse_double(value, "nodes"));
    } else {
      throw Error(ErrorKind::Parse, "unknown measure field '" + key + "'");
    }
  }
  if ((scale || nodes) && !density)
    throw Error(ErrorKind::Parse, "scale/nodes given without a density");
  if (density) {
    if (scale) density->scale = *scale;
    if (nodes) density->nodes = *nodes;
  }
  return FiniteMeasure(std::move(atoms), std::move(density));
}

double mass(const FiniteMeasure &mu) {
  double m = mu.density_mass();
  for (const Atom &a : mu.atoms()) m += a.w;
  return m;
}

bool is_probability(const FiniteMeasure &mu) { return std::abs(mass(mu) - 1.0) <= 1e-10; }

double harmonic_kernel(double t, double x) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return x;
  if (x == 0.0) return 0.0;
  return x / ((1.0 - t) * x + t);
}

PsdMatrixXd weighted_harmonic(const PsdMatrixXd &a, const PsdMatrixXd &b, double t) {
  detail::require_same_dim(a.matrix(), b.matrix());
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "harmonic weight t=" << t << " outside [0, 1]";
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  if (numerically_pd(a) && numerically_pd(b)) {
    const MatrixXd s = (1.0 - t) * spd_inverse(a.matrix()) + t * spd_inverse(b.matrix());
    return computed_psd(spd_inverse(s));
  }
  // (A/(1-t)) : (B/t) = A' (A' + B')^+ B', exact for PSD operands and equal to
  // the limit of the regularized means from above.
  const MatrixXd ap = a.matrix() / (1.0 - t);
  const MatrixXd bp = b.matrix() / t;
  const auto eig = eigh((ap + bp).eval());
  const double top = std::max(std::abs(eig.eigenvalues(eig.dim() - 1)), 0.0);
  const double cutoff = 1e-12 * top;
  VectorXd inv(eig.dim());
  for (Eigen::Index i = 0; i < eig.dim(); ++i) {
    inv(i) = eig.eigenvalues(i) > cutoff ? 1.0 / eig.eigenvalues(i) : 0.0;
  }
  const MatrixXd pinv = eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.transpose();
  const MatrixXd m = ap * pinv * bp;
  return computed_psd(0.5 * (m + m.transpose()));
}

PsdMatrixXd parallel_sum(const PsdMatrixXd &a, const PsdMatrixXd &b) {
  return computed_psd(0.5 * weighted_harmonic(a, b, 0.5).matrix());
}

double fn_from_measure(const FiniteMeasure &mu, double x) {
  if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "measure function needs x >= 0");
  double sum = 0.0;
  for (const Atom &a : mu.atoms()) sum += a.w * harmonic_kernel(a.t, x);
  for (const Atom &q : mu.quadrature()) sum += q.w * harmonic_kernel(q.t, x);
  return sum;
}

PsdMatrixXd eval_from_measure(const FiniteMeasure &mu, const PsdMatrixXd &a, const PsdMatrixXd &b) {
  detail::require_same_dim(a.matrix(), b.matrix());
  const Eigen::Index n = a.dim();
  MatrixXd sum = MatrixXd::Zero(n, n);
  const bool invertible = numerically_pd(a) && numerically_pd(b);
  MatrixXd a_inv;
  MatrixXd b_inv;
  if (invertible) {
    a_inv = spd_inverse(a.matrix());
    b_inv = spd_inverse(b.matrix());
  }
  auto add_term = [&](const Atom &node) {
    if (node.w == 0.0) return;
    if (node.t == 0.0) {
      sum += node.w * a.matrix();
    } else if (node.t == 1.0) {
      sum += node.w * b.matrix();
    } else if (invertible) {
      sum += node.w * spd_inverse((1.0 - node.t) * a_inv + node.t * b_inv);
    } else {
      sum += node.w * weighted_harmonic(a, b, node.t).matrix();
    }
  };
  for (const Atom &atom : mu.atoms()) add_term(atom);
  for (const Atom &q : mu.quadrature()) add_term(q);
  return computed_psd(0.5 * (sum + sum.transpose()));
}

std::optional<FiniteMeasure> known_measure_of(const FunctionSpec &f) {
  switch (f.kind()) {
  case FunctionKind::Constant: return FiniteMeasure({{0.0, f.k()}});
  case FunctionKind::ScalarIdentity: return FiniteMeasure({{1.0, f.k()}});
  case FunctionKind::WeightedArithmetic:
    return FiniteMeasure({{0.0, 1.0 - f.alpha()}, {1.0, f.alpha()}});
  case FunctionKind::WeightedHarmonic: return FiniteMeasure::dirac(f.alpha());
  case FunctionKind::QuasiArithmetic:
    if (f.p() == 1.0) return FiniteMeasure({{0.0, 1.0 - f.alpha()}, {1.0, f.alpha()}});
    if (f.p() == -1.0) return FiniteMeasure::dirac(f.alpha());
    return std::nullopt;
  case FunctionKind::WeightedGeometric:
    if (f.alpha() == 0.5) return FiniteMeasure::arcsine();
    return std::nullopt;
  case FunctionKind::DualLogarithmic: {
    // \int_0^1 x / ((1-t) x + t) dt = x log x / (x - 1).
    Density d;
    d.kind = DensityKind::Uniform;
    return FiniteMeasure({}, d);
  }
  default: return std::nullopt;
  }
}

FunctionSpec function_of_measure(const FiniteMeasure &mu) {
  CustomFunction c;
  c.name = "measure[" + mu.to_string() + "]";
  c.value_at_zero = mu.atom_at(0.0);
  c.slope_at_infinity = mu.atom_at(1.0);
  c.fn = [mu](double x) { return fn_from_measure(mu, x); };
  return FunctionSpec::custom(std::move(c));
}

} // namespace opconn
