// SPDX-License-Identifier: Apache-2.0

// Operator connections A s B on PSD matrices.
//
// A connection is k times the connection of a representing function f and/or
// of an associated measure mu. Evaluation uses congruence invariance:
//   A s B = k A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}   for A > 0.
// Singular A is handled through the transpose when B > 0, and otherwise by
// regularizing A along a decreasing epsilon schedule.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opconn/measure.hpp"
#include "opconn/omf.hpp"
#include "opconn/symcore.hpp"

namespace opconn {

struct RegularizationSchedule {
  std::vector<double> epsilons;
  double convergence_tol = 1e-7;

  /// 1e-2 * 2^{-j}, j = 0..16.
  static RegularizationSchedule standard();
  void validate() const;
};

class Connection {
public:
  /// Attaches the closed-form measure when one is known.
  static Connection from_function(FunctionSpec f, double scale = 1.0);
  static Connection from_measure(FiniteMeasure mu, double scale = 1.0);
  /// Both sources; throws DomainError when they disagree on the check grid.
  static Connection from_both(FunctionSpec f, FiniteMeasure mu, double scale = 1.0);

  static Connection left_trivial(double k = 1.0) { return from_function(FunctionSpec::constant(k)); }
  static Connection right_trivial(double k = 1.0) {
    return from_function(FunctionSpec::scalar_identity(k));
  }

  double scale() const { return scale_; }
  /// Unscaled representing function; measure-derived when no function was given.
  const FunctionSpec &function() const { return function_; }
  bool function_from_measure() const { return function_from_measure_; }
  /// Unscaled associated measure, when known.
  const std::optional<FiniteMeasure> &measure() const { return measure_; }

  /// k f(x).
  double representing(double x) const;
  /// Preimage under k f.
  double representing_inverse(double y) const;
  /// Analysis of k f.
  FunctionAnalysis analysis() const;

  std::string describe() const;

private:
  Connection(FunctionSpec f, double scale) : scale_(scale), function_(std::move(f)) {}

  double scale_;
  FunctionSpec function_;
  bool function_from_measure_ = false;
  std::optional<FiniteMeasure> measure_;
};

/// Largest grid discrepancy |fn_from_measure - eval_fn| / (1 + x) over x in [1e-2, 1e2].
double measure_function_discrepancy(const FunctionSpec &f, const FiniteMeasure &mu);

PsdMatrixXd evaluate(const Connection &sigma, const PsdMatrixXd &a, const PsdMatrixXd &b,
                     const Tolerances &tol = {},
                     const RegularizationSchedule &schedule = RegularizationSchedule::standard());

/// Convenience overload validating plain matrices as PSD.
PsdMatrixXd evaluate(const Connection &sigma, const MatrixXd &a, const MatrixXd &b,
                     const Tolerances &tol = {});

/// The connection (A, B) -> B s A.
Connection transpose_connection(const Connection &sigma);

struct AxiomTally {
  int trials = 0;
  int failures = 0;
  double worst_violation = 0.0;

  void record(double violation, bool failed);
};

struct AxiomReport {
  std::string connection;
  int dim = 0;
  std::uint64_t seed = 0;
  AxiomTally monotonicity;            // A <= C, B <= D => A s B <= C s D
  AxiomTally transformer_inequality;  // C (A s B) C <= (CAC) s (CBC), symmetric invertible C
  AxiomTally congruence_invariance;   // equality for C > 0
  AxiomTally continuity_from_above;   // A + 2^{-n} I, B + 2^{-n} I decreasing to A s B
  AxiomTally fixed_point;             // A s A = f(1) A

  bool all_pass() const;
  /// Stable `key: value` text form.
  std::string to_text() const;
};

AxiomReport verify_axioms(const Connection &sigma, int trials, int dim, std::uint64_t seed,
                          const Tolerances &tol = {});

} // namespace opconn
