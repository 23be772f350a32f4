// SPDX-License-Identifier: Apache-2.0

// The operator equations A s X = B and X s A = B for A > 0, B >= 0.
//
// With M = A^{-1/2} B A^{-1/2}, A s X = B has a solution iff Sp(M) lies in the
// range of the representing function f, and then X = A^{1/2} f^{-1}(M) A^{1/2}
// is the only one. X s A = B is the same problem for the transpose.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opconn/connection.hpp"
#include "opconn/symcore.hpp"

namespace opconn {

enum class SolveStatus { UniqueSolution, RangeViolation, NotCancellable };

const char *to_string(SolveStatus status);

struct ViolatingEigenvalue {
  double lambda = 0.0;
  double gap = 0.0;  // distance to the admissible range
};

struct SolveReport {
  SolveStatus status = SolveStatus::NotCancellable;
  std::optional<PsdMatrixXd> x;
  std::vector<ViolatingEigenvalue> violating_eigenvalues;
  double residual = 0.0;  // ||A s X - B||_F, or ||X s A - B||_F for solve_right
  RangeDescriptor range;  // range the spectrum was gated against
  std::string detail;

  bool solved() const { return status == SolveStatus::UniqueSolution; }
  std::string to_text() const;
};

SolveReport solve_left(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                       const Tolerances &tol = {});

SolveReport solve_right(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                        const Tolerances &tol = {});

/// f(0) = 0 and f unbounded, i.e. A s X = B is solvable for every A > 0, B >= 0.
bool always_solvable(const Connection &sigma);

struct SolvabilityCondition {
  bool solvable = false;
  bool strict = false;      // p < 0: B < c A must hold strictly
  double threshold = 0.0;   // c = (1 - alpha)^{1/p}; 0 when p = 0
  double margin = 0.0;      // min eig(B - c A) for p > 0, min eig(c A - B) for p < 0
  std::optional<PsdMatrixXd> x;  // A #_{p, 1/alpha} B when solvable
  std::string condition;
};

/// Solvability of A #_{p,alpha} X = B and its explicit solution.
SolvabilityCondition quasi_arithmetic_solvability(double p, double alpha, const PdMatrixXd &a,
                                                  const PsdMatrixXd &b, const Tolerances &tol = {});

/// max over unit-Frobenius symmetric coordinate directions E of
/// ||X(A, B + delta E) - X(A, B)||_F / delta.
double solution_continuity_probe(const Connection &sigma, const PdMatrixXd &a, const PsdMatrixXd &b,
                                 double delta, const Tolerances &tol = {});

} // namespace opconn
