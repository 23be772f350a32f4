// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "opconn/omf.hpp"
#include "support/expect_error.hpp"

using namespace opconn;

namespace {

std::vector<FunctionSpec> catalog() {
  std::vector<FunctionSpec> out = {FunctionSpec::constant(2.0), FunctionSpec::scalar_identity(0.5),
                                   FunctionSpec::logarithmic(), FunctionSpec::dual_logarithmic()};
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    out.push_back(FunctionSpec::arithmetic(a));
    out.push_back(FunctionSpec::geometric(a));
    out.push_back(FunctionSpec::harmonic(a));
    for (double p : {-1.0, -0.5, -0.2, 0.3, 0.5, 1.0}) out.push_back(FunctionSpec::quasi_arithmetic(p, a));
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return xs;
}

// Newton iteration for (x - 1) / log x = y in extended precision.
long double log_mean_root(long double y) {
  long double x = y * y;
  for (int i = 0; i < 100; ++i) {
    const long double l = std::log(x);
    const long double f = (x - 1) / l - y;
    const long double df = (l - (x - 1) / x) / (l * l);
    x -= f / df;
  }
  return x;
}

} // namespace

TEST(EvalFn, Examples) {
  EXPECT_DOUBLE_EQ(eval_fn(FunctionSpec::geometric(0.5), 4.0), 2.0);
  EXPECT_DOUBLE_EQ(eval_fn(FunctionSpec::logarithmic(), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_fn(FunctionSpec::quasi_arithmetic(1.0, 0.25), 5.0), 2.0);
}

TEST(EvalFn, RemovableSingularities) {
  EXPECT_EQ(eval_fn(FunctionSpec::logarithmic(), 0.0), 0.0);
  EXPECT_EQ(eval_fn(FunctionSpec::dual_logarithmic(), 0.0), 0.0);
  EXPECT_EQ(eval_fn(FunctionSpec::dual_logarithmic(), 1.0), 1.0);
  EXPECT_EQ(eval_fn(FunctionSpec::quasi_arithmetic(-0.5, 0.3), 0.0), 0.0);
  // Continuity through x = 1.
  EXPECT_NEAR(eval_fn(FunctionSpec::logarithmic(), 1.0 + 1e-9), 1.0 + 0.5e-9, 1e-15);
  EXPECT_NEAR(eval_fn(FunctionSpec::dual_logarithmic(), 1.0 - 1e-9), 1.0 - 0.5e-9, 1e-15);
}

TEST(EvalFn, ClosedFormsAgainstDirectFormulas) {
  const double x = 3.7;
  EXPECT_NEAR(eval_fn(FunctionSpec::harmonic(0.3), x), 1.0 / (0.7 + 0.3 / x), 1e-15);
  EXPECT_NEAR(eval_fn(FunctionSpec::quasi_arithmetic(0.5, 0.3), x), std::pow(0.7 + 0.3 * std::sqrt(x), 2.0),
              1e-14);
  EXPECT_NEAR(eval_fn(FunctionSpec::logarithmic(), x), (x - 1) / std::log(x), 1e-15);
  EXPECT_NEAR(eval_fn(FunctionSpec::dual_logarithmic(), x), x * std::log(x) / (x - 1), 1e-15);
}

TEST(EvalInverse, Examples) {
  EXPECT_NEAR(eval_inverse(FunctionSpec::geometric(0.5), 2.0), 4.0, 1e-14);
  EXPECT_NEAR(eval_inverse(FunctionSpec::quasi_arithmetic(1.0, 0.5), 3.0), 5.0, 1e-14);
  // Bisection stops at |f(x) - y| <= 2e-12 and f'(1) = 1/2.
  EXPECT_NEAR(eval_inverse(FunctionSpec::logarithmic(), 1.0), 1.0, 1e-11);
}

TEST(EvalInverse, LogarithmicAgainstExtendedPrecisionRoot) {
  for (double y : {0.3, 2.0, 7.5}) {
    const double oracle = static_cast<double>(log_mean_root(y));
    EXPECT_NEAR(eval_inverse(FunctionSpec::logarithmic(), y), oracle, 1e-10 * oracle) << y;
  }
}

TEST(EvalInverse, QuasiArithmeticClosedForm) {
  for (double p : {-1.0, -0.5, 0.5, 1.0}) {
    for (double a : {0.25, 0.5, 0.75}) {
      const auto f = FunctionSpec::quasi_arithmetic(p, a);
      const double y = p > 0 ? std::pow(1 - a, 1 / p) + 0.7 : 0.6 * std::pow(1 - a, 1 / p);
      const double expected = std::pow(1 - 1 / a + std::pow(y, p) / a, 1 / p);
      EXPECT_NEAR(eval_inverse(f, y), expected, 1e-12 * (1 + expected));
    }
  }
}

TEST(EvalInverse, RangeAndInjectivityErrors) {
  EXPECT_ERROR_KIND(eval_inverse(FunctionSpec::arithmetic(0.5), 0.1), ErrorKind::RangeError);
  EXPECT_ERROR_KIND(eval_inverse(FunctionSpec::harmonic(0.5), 2.5), ErrorKind::RangeError);
  EXPECT_ERROR_KIND(eval_inverse(FunctionSpec::constant(1.0), 1.0), ErrorKind::NotInjective);
}

TEST(TransposeFn, Examples) {
  const auto t = transpose_fn(FunctionSpec::constant(3.0));
  EXPECT_EQ(t.kind(), FunctionKind::ScalarIdentity);
  EXPECT_EQ(t.k(), 3.0);
  const auto s = transpose_fn(FunctionSpec::arithmetic(0.5));
  EXPECT_EQ(s.kind(), FunctionKind::WeightedArithmetic);
  EXPECT_EQ(s.alpha(), 0.5);
  const auto g = transpose_fn(FunctionSpec::geometric(0.3));
  EXPECT_EQ(g.kind(), FunctionKind::WeightedGeometric);
  EXPECT_NEAR(g.alpha(), 0.7, 1e-15);
  EXPECT_EQ(transpose_fn(FunctionSpec::logarithmic()).kind(), FunctionKind::Logarithmic);
}

TEST(TransposeFn, MatchesDefinitionPointwise) {
  for (const auto &f : catalog()) {
    const auto g = transpose_fn(f);
    for (double x : log_grid(1e-3, 1e3, 61)) {
      const double expected = x * eval_fn(f, 1.0 / x);
      EXPECT_NEAR(eval_fn(g, x), expected, 1e-12 * (1 + expected)) << f.to_string() << " x=" << x;
    }
  }
}

TEST(TransposeFn, Involution) {
  for (const auto &f : catalog()) {
    const auto gg = transpose_fn(transpose_fn(f));
    for (double x : log_grid(1e-3, 1e3, 61))
      EXPECT_NEAR(eval_fn(gg, x), eval_fn(f, x), 1e-12 * (1 + eval_fn(f, x))) << f.to_string();
  }
}

TEST(TransposeFn, CustomFunctionWrapsDefinition) {
  const auto f = FunctionSpec::custom({"root", [](double x) { return std::sqrt(x) + 0.5; }, 0.5, 0.0});
  const auto g = transpose_fn(f);
  EXPECT_NEAR(eval_fn(g, 4.0), 4.0 * (0.5 + 0.5), 1e-14);
  EXPECT_NEAR(eval_fn(g, 0.0), 0.0, 1e-14);
}

TEST(AnalyzeFn, Examples) {
  const auto log_a = analyze_fn(FunctionSpec::logarithmic());
  EXPECT_EQ(log_a.props.f0, 0.0);
  EXPECT_FALSE(log_a.props.bounded);
  EXPECT_TRUE(log_a.range.unbounded());

  const auto h = analyze_fn(FunctionSpec::harmonic(0.25));
  EXPECT_EQ(h.props.f0, 0.0);
  EXPECT_TRUE(h.props.bounded);
  EXPECT_NEAR(h.range.upper, 1.0 / 0.75, 1e-15);
  EXPECT_FALSE(h.range.upper_attained);

  const auto c = analyze_fn(FunctionSpec::constant(3.0));
  EXPECT_TRUE(c.props.is_constant);
  EXPECT_FALSE(c.props.injective);
  EXPECT_EQ(c.range.lower, 3.0);
  EXPECT_EQ(c.range.upper, 3.0);
}

TEST(AnalyzeFn, QuasiArithmeticRanges) {
  const auto pos = analyze_fn(FunctionSpec::quasi_arithmetic(0.5, 0.3));
  EXPECT_NEAR(pos.range.lower, std::pow(0.7, 2.0), 1e-15);
  EXPECT_TRUE(pos.range.unbounded());
  const auto neg = analyze_fn(FunctionSpec::quasi_arithmetic(-0.5, 0.3));
  EXPECT_EQ(neg.range.lower, 0.0);
  EXPECT_NEAR(neg.range.upper, std::pow(0.7, -2.0), 1e-14);
  EXPECT_FALSE(neg.range.upper_attained);
}

TEST(AnalyzeFn, TransposeValueAtZero) {
  EXPECT_NEAR(analyze_fn(FunctionSpec::arithmetic(0.3)).props.transpose_f0, 0.3, 1e-15);
  EXPECT_EQ(analyze_fn(FunctionSpec::geometric(0.3)).props.transpose_f0, 0.0);
  EXPECT_EQ(analyze_fn(FunctionSpec::scalar_identity(2.0)).props.transpose_f0, 2.0);
}

TEST(AnalyzeFn, CustomRangeIsNumeric) {
  const auto f = FunctionSpec::custom({"sat", [](double x) { return x / (1.0 + x); }, std::nullopt, std::nullopt});
  const auto a = analyze_fn(f);
  EXPECT_TRUE(a.range.numeric);
  EXPECT_EQ(a.props.f0, 0.0);
  EXPECT_NEAR(a.range.upper, 1.0, 1e-10);
}

TEST(RangeDescriptor, AsymmetricTolerance) {
  RangeDescriptor r{0.0, 2.0, false, false};
  EXPECT_TRUE(r.accepts(-1e-9, 1e-8));
  EXPECT_FALSE(r.accepts(2.0, 1e-8));
  EXPECT_FALSE(r.accepts(2.0 - 1e-9, 1e-8));
  r.upper_attained = true;
  EXPECT_TRUE(r.accepts(2.0 + 1e-9, 1e-8));
  EXPECT_NEAR(r.gap(2.5), 0.5, 1e-15);
  EXPECT_EQ(r.gap(1.0), 0.0);
}

TEST(Properties, InverseRoundTrip) {
  for (const auto &f : catalog()) {
    const auto a = analyze_fn(f);
    if (!a.props.injective) continue;
    const double hi = a.range.unbounded() ? a.range.lower + 100.0 : a.range.upper;
    for (int i = 0; i < 100; ++i) {
      // Interior points of the range.
      const double y = a.range.lower + (hi - a.range.lower) * (i + 0.5) / 100.0;
      const double x = eval_inverse(f, y);
      EXPECT_LE(std::abs(eval_fn(f, x) - y), 1e-10 * (1 + y)) << f.to_string() << " y=" << y;
    }
  }
}

TEST(Properties, MonotoneOnIncreasingGrid) {
  for (const auto &f : catalog()) {
    double prev = eval_fn(f, 0.0);
    for (double x : log_grid(1e-6, 1e6, 500)) {
      const double v = eval_fn(f, x);
      EXPECT_GE(v, prev) << f.to_string();
      prev = v;
    }
  }
}

TEST(Properties, MidpointConcavity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const auto &f : catalog()) {
    for (int i = 0; i < 200; ++i) {
      const double x = std::pow(10.0, u(rng)), y = std::pow(10.0, u(rng));
      const double mid = eval_fn(f, 0.5 * (x + y));
      const double avg = 0.5 * (eval_fn(f, x) + eval_fn(f, y));
      EXPECT_GE(mid, avg - 1e-12 * (1 + avg)) << f.to_string();
    }
  }
}

TEST(Properties, NonconstantCatalogIsStrictlyIncreasing) {
  for (const auto &f : catalog()) {
    if (analyze_fn(f).props.is_constant) continue;
    double prev = eval_fn(f, 1e-4);
    for (double x : log_grid(1e-4, 1e4, 400)) {
      if (x == 1e-4) continue;
      const double v = eval_fn(f, x);
      EXPECT_GT(v, prev) << f.to_string() << " x=" << x;
      prev = v;
    }
  }
}

TEST(FunctionSpec, ValidatesParameters) {
  EXPECT_ERROR_KIND(FunctionSpec::arithmetic(0.0), ErrorKind::DomainError);
  EXPECT_ERROR_KIND(FunctionSpec::geometric(1.0), ErrorKind::DomainError);
  EXPECT_ERROR_KIND(FunctionSpec::quasi_arithmetic(1.5, 0.5), ErrorKind::DomainError);
  EXPECT_ERROR_KIND(FunctionSpec::constant(-1.0), ErrorKind::DomainError);
}

TEST(FunctionSpec, QuasiArithmeticAtZeroIsGeometric) {
  const auto f = FunctionSpec::quasi_arithmetic(0.0, 0.3);
  EXPECT_EQ(f.kind(), FunctionKind::WeightedGeometric);
  EXPECT_EQ(f.alpha(), 0.3);
}

TEST(FunctionSpec, ParseForms) {
  EXPECT_EQ(FunctionSpec::parse("geometric:0.5").to_string(), "geometric:alpha=0.5");
  EXPECT_EQ(FunctionSpec::parse("quasi_arithmetic:p=1,alpha=0.25").to_string(),
            "quasi_arithmetic:p=1,alpha=0.25");
  EXPECT_EQ(FunctionSpec::parse("kind=quasi_arithmetic p=0.5 alpha=0.3").to_string(),
            "quasi_arithmetic:p=0.5,alpha=0.3");
  EXPECT_EQ(FunctionSpec::parse("logarithmic").kind(), FunctionKind::Logarithmic);
  EXPECT_EQ(FunctionSpec::parse("left_trivial").kind(), FunctionKind::Constant);
  EXPECT_EQ(FunctionSpec::parse("right_trivial").kind(), FunctionKind::ScalarIdentity);
  for (const auto &f : catalog()) EXPECT_EQ(FunctionSpec::parse(f.to_string()).to_string(), f.to_string());
}

TEST(FunctionSpec, ParseErrors) {
  EXPECT_ERROR_KIND(FunctionSpec::parse("nonsense"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(FunctionSpec::parse("geometric:beta=0.5"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(FunctionSpec::parse("quasi_arithmetic"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(FunctionSpec::parse("geometric:abc"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(FunctionSpec::parse(""), ErrorKind::Parse);
}

TEST(CustomFunction, ShapeChecks) {
  EXPECT_NO_THROW(FunctionSpec::custom({"root", [](double x) { return std::sqrt(x); }, 0.0, 0.0}));
  // Convex, so not the representing function of a connection.
  EXPECT_ERROR_KIND(FunctionSpec::custom({"square", [](double x) { return x * x; }, 0.0, std::nullopt}),
                    ErrorKind::DomainError);
  EXPECT_ERROR_KIND(FunctionSpec::custom({"decreasing", [](double x) { return 1.0 / (1.0 + x); }, 1.0, 0.0}),
                    ErrorKind::DomainError);
}

TEST(CustomFunction, InverseByBisection) {
  const auto f = FunctionSpec::custom({"sat", [](double x) { return x / (1.0 + x); }, std::nullopt, std::nullopt});
  // x / (1 + x) = 0.8 at x = 4.
  EXPECT_NEAR(eval_inverse(f, 0.8), 4.0, 1e-9);
  EXPECT_ERROR_KIND(eval_inverse(f, 1.5), ErrorKind::RangeError);
}

TEST(EvalInverse, DualLogarithmicBeyondExpansionLimit) {
  // f(x) ~ log x, so y = 40 needs x near e^40 > 1e15.
  const auto f = FunctionSpec::dual_logarithmic();
  const double x = eval_inverse(f, 40.0);
  EXPECT_GT(x, 1e15);
  EXPECT_NEAR(eval_fn(f, x), 40.0, 1e-10 * 41.0);
}
