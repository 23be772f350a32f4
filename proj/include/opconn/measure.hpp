// SPDX-License-Identifier: Apache-2.0

// Finite Borel measures on [0, 1] and the integral representation
//   A s B = \int_{[0,1]} A !_t B dmu(t),   f(x) = \int_{[0,1]} (1 !_t x) dmu(t).
//
// A measure is a finite set of atoms plus an optional absolutely continuous
// density. The density is discretized once, at construction, into quadrature
// nodes in (0, 1); atoms (in particular those at 0 and 1) are never folded
// into the quadrature so that mu({0}) and mu({1}) stay exact.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opconn/omf.hpp"
#include "opconn/symcore.hpp"

namespace opconn {

struct Atom {
  double t = 0.0;  // location in [0, 1]
  double w = 0.0;  // nonnegative mass
};

enum class DensityKind {
  Arcsine,  // 1 / (pi sqrt(t (1 - t))), unit mass
  Uniform,  // Lebesgue measure on (0, 1)
  Table,    // piecewise linear through values on a uniform grid of [0, 1]
  Custom,
};

struct Density {
  DensityKind kind = DensityKind::Arcsine;
  double scale = 1.0;
  int nodes = 200;
  std::vector<double> table;            // DensityKind::Table
  std::function<double(double)> fn;    // DensityKind::Custom
  std::string name;                     // DensityKind::Custom

  double operator()(double t) const;
};

class FiniteMeasure {
public:
  FiniteMeasure() = default;
  explicit FiniteMeasure(std::vector<Atom> atoms, std::optional<Density> density = std::nullopt);

  static FiniteMeasure dirac(double t, double w = 1.0);
  static FiniteMeasure arcsine(double scale = 1.0, int nodes = 200);

  /// Text form: `atoms=[(t,w),...] density=<arcsine|uniform|table:v0;v1;...>
  /// scale=<s> nodes=<n>`; every field is optional.
  static FiniteMeasure parse(std::string_view text);
  std::string to_string() const;

  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::optional<Density> &density() const { return density_; }
  /// Discretized density: nodes in (0, 1) with weights that include the density.
  const std::vector<Atom> &quadrature() const { return quadrature_; }

  /// Exact mass of the atom at t (0 when absent).
  double atom_at(double t) const;
  /// Mass of the absolutely continuous part.
  double density_mass() const;

  FiniteMeasure scaled(double k) const;
  /// Pushforward under t -> 1 - t; the measure of the transposed connection.
  FiniteMeasure reflected() const;

private:
  void discretize();

  std::vector<Atom> atoms_;
  std::optional<Density> density_;
  std::vector<Atom> quadrature_;
};

double mass(const FiniteMeasure &mu);
bool is_probability(const FiniteMeasure &mu);

/// Scalar kernel 1 !_t x = x / ((1 - t) x + t).
double harmonic_kernel(double t, double x);

/// A !_t B = [(1 - t) A^{-1} + t B^{-1}]^{-1}; singular operands use the
/// parallel-sum form with a pseudoinverse.
PsdMatrixXd weighted_harmonic(const PsdMatrixXd &a, const PsdMatrixXd &b, double t);

/// Parallel sum A : B = (A^{-1} + B^{-1})^{-1}.
PsdMatrixXd parallel_sum(const PsdMatrixXd &a, const PsdMatrixXd &b);

double fn_from_measure(const FiniteMeasure &mu, double x);

PsdMatrixXd eval_from_measure(const FiniteMeasure &mu, const PsdMatrixXd &a, const PsdMatrixXd &b);

/// Closed-form associated measure of a catalog function, when known.
std::optional<FiniteMeasure> known_measure_of(const FunctionSpec &f);

/// The representing function of the measure as a FunctionSpec.
FunctionSpec function_of_measure(const FiniteMeasure &mu);

} // namespace opconn
