// SPDX-License-Identifier: Apache-2.0

// Cancellability and regularity of connections, with numeric witnesses.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opconn/connection.hpp"
#include "opconn/solver.hpp"

namespace opconn {

struct ClassificationReport {
  std::string connection;
  bool left_cancellable = false;
  bool right_cancellable = false;
  bool cancellable = false;
  bool is_mean = false;
  bool nontrivial_mean = false;
  bool symmetric = false;
  bool regular = false;            // f(0) > 0
  bool transpose_regular = false;  // g(0) > 0, g the transpose of f
  bool always_solvable = false;
  /// Measure-side verdicts, present when the associated measure is known.
  bool measure_known = false;
  bool measure_agrees = true;
  std::map<std::string, double> witnesses;

  std::string to_text() const;
};

ClassificationReport classify_connection(const Connection &sigma);

struct RegularityCheck {
  std::string name;
  bool available = true;
  double value = 0.0;
  bool indicates_nonregular = false;
};

struct RegularityEvidence {
  std::string connection;
  bool regular = false;
  double f0 = 0.0;
  /// || I s 0 - f(0) I ||_F, expected at roundoff level for every connection.
  double identity_zero_consistency = 0.0;
  std::vector<RegularityCheck> checks;
  bool consistent = false;  // every available check agrees with `regular`

  std::string to_text() const;
};

RegularityEvidence regularity_witness(const Connection &sigma, int dim, std::uint64_t seed,
                                      const Tolerances &tol = {}, int samples = 8);

struct ProjectionReport {
  std::string connection;
  bool nonregular = false;
  bool nontrivial_mean = false;
  int projections_tested = 0;
  double max_projection_gap = 0.0;  // max || I s P - P ||_F
  bool projections_fixed = false;   // max gap <= 1e-9
  int fixed_point_trials = 0;
  int fixed_points_found = 0;
  int fixed_non_projections = 0;    // I s A = A but A not a projection
  int sandwich_points = 0;
  int sandwich_violations = 0;

  bool consistent() const;
  std::string to_text() const;
};

/// Requires a mean (f(1) = 1); throws NotAMean otherwise.
ProjectionReport projection_fixed_points(const Connection &sigma, int dim, std::uint64_t seed,
                                         const Tolerances &tol = {}, int trials = 50);

/// A s X = 0.
SolveReport zero_equation(const Connection &sigma, const PdMatrixXd &a, const Tolerances &tol = {});

} // namespace opconn
