// SPDX-License-Identifier: Apache-2.0

// Representing functions f: [0, inf) -> [0, inf) of operator connections.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace opconn {

enum class FunctionKind {
  Constant,        // x -> k
  ScalarIdentity,  // x -> k x
  WeightedArithmetic,
  WeightedGeometric,
  WeightedHarmonic,
  QuasiArithmetic,  // (1 - a + a x^p)^{1/p}, p in [-1, 1] \ {0}
  Logarithmic,      // (x - 1) / log x
  DualLogarithmic,  // x log x / (x - 1)
  Custom,
};

const char *to_string(FunctionKind kind);

/// A scalar evaluator supplied by the caller. The caller certifies operator
/// monotonicity; only scalar monotonicity and midpoint concavity are checked.
struct CustomFunction {
  std::string name;
  std::function<double(double)> fn;
  std::optional<double> value_at_zero;      // f(0) when fn cannot be evaluated at 0
  std::optional<double> slope_at_infinity;  // lim f(x)/x as x -> inf
};

class FunctionSpec {
public:
  static FunctionSpec constant(double k);
  static FunctionSpec scalar_identity(double k);
  static FunctionSpec arithmetic(double alpha);
  static FunctionSpec geometric(double alpha);
  static FunctionSpec harmonic(double alpha);
  /// p == 0 is normalized to the weighted geometric mean.
  static FunctionSpec quasi_arithmetic(double p, double alpha);
  static FunctionSpec logarithmic();
  static FunctionSpec dual_logarithmic();
  static FunctionSpec custom(CustomFunction fn);

  /// Accepts `kind`, `kind:value`, `kind:name=value,...` and
  /// `kind=<kind> name=value ...`.
  static FunctionSpec parse(std::string_view text);

  FunctionKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double p() const { return p_; }
  double k() const { return k_; }
  bool is_catalog() const { return kind_ != FunctionKind::Custom; }
  const CustomFunction *custom_function() const { return custom_.get(); }

  double operator()(double x) const;

  /// Canonical text form, round-trips through parse() for catalog members.
  std::string to_string() const;

private:
  FunctionSpec(FunctionKind kind) : kind_(kind) {}

  FunctionKind kind_;
  double alpha_ = 0.0;
  double p_ = 0.0;
  double k_ = 1.0;
  std::shared_ptr<const CustomFunction> custom_;
};

/// Range of a nondecreasing f: [lower, upper) or [lower, upper].
struct RangeDescriptor {
  double lower = 0.0;
  double upper = 0.0;  // may be +inf
  bool upper_attained = false;
  bool numeric = false;  // upper estimated by sampling

  bool unbounded() const;
  /// Distance from y to the range, 0 when inside.
  double gap(double y) const;
  /// Membership with an asymmetric tolerance for half-open ranges.
  bool accepts(double y, double tol) const;
};

struct FunctionProps {
  bool is_constant = false;
  bool is_scalar_identity = false;
  bool injective = false;
  bool bounded = false;
  double f0 = 0.0;
  double transpose_f0 = 0.0;  // lim_{x->inf} f(x)/x
  bool numeric = false;
};

struct FunctionAnalysis {
  FunctionProps props;
  RangeDescriptor range;
};

double eval_fn(const FunctionSpec &f, double x);

/// Preimage of y. Closed form where available, else monotone bisection.
double eval_inverse(const FunctionSpec &f, double y,
                    std::optional<std::pair<double, double>> bracket_hint = std::nullopt);

/// x -> x f(1/x), extended to 0 by continuity.
FunctionSpec transpose_fn(const FunctionSpec &f);

FunctionAnalysis analyze_fn(const FunctionSpec &f);

/// Grid evidence of scalar monotonicity and midpoint concavity.
struct ShapeCheck {
  bool monotone = true;
  bool midpoint_concave = true;
  double worst_decrease = 0.0;
  double worst_concavity_gap = 0.0;
};

ShapeCheck check_scalar_shape(const FunctionSpec &f, int grid_points = 400);

} // namespace opconn
