// SPDX-License-Identifier: Apache-2.0

#include "opconn/omf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "opconn/error.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_weight(double alpha, const char *what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << what << ": weight alpha=" << alpha << " must lie in (0, 1)";
    throw Error(ErrorKind::DomainError, os.str());
  }
}

void require_scale(double k, const char *what) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    std::ostringstream os;
    os << what << ": scale k=" << k << " must be finite and nonnegative";
    throw Error(ErrorKind::DomainError, os.str());
  }
}

// x / ((1 - t) x + t), with the endpoint conventions 1 !_0 x = 1, 1 !_1 x = x.
double harmonic_kernel(double t, double x) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return x;
  if (x == 0.0) return 0.0;
  return x / ((1.0 - t) * x + t);
}

double eval_custom(const CustomFunction &c, double x) {
  double v;
  if (x == 0.0 && c.value_at_zero) {
    v = *c.value_at_zero;
  } else {
    v = c.fn(x);
  }
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << "custom function '" << c.name << "' returned " << v << " at x=" << x;
    throw Error(ErrorKind::DomainError, os.str());
  }
  return v;
}

double slope_at_infinity_estimate(const FunctionSpec &f) {
  constexpr double big = 1e12;
  const double s = eval_fn(f, big) / big;
  return s < 1e-9 ? 0.0 : s;
}

double bisect_inverse(const FunctionSpec &f, double y,
                      std::optional<std::pair<double, double>> hint) {
  const double tol = 1e-12 * (1.0 + std::abs(y));
  double lo = 0.0;
  double hi = 1.0;
  if (hint) {
    lo = std::max(0.0, hint->first);
    hi = std::max(lo, hint->second);
    if (eval_fn(f, lo) > y) lo = 0.0;
  }
  if (std::abs(eval_fn(f, lo) - y) <= tol) return lo;
  while (eval_fn(f, hi) < y) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e15) {
      std::ostringstream os;
      os << "value " << y << " not reached by " << f.to_string() << " below x=1e15";
      throw Error(ErrorKind::RangeError, os.str());
    }
  }
  double best = hi;
  double best_err = std::abs(eval_fn(f, hi) - y);
  for (int iter = 0; iter < 4000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = eval_fn(f, mid);
    const double err = std::abs(fm - y);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= tol) return mid;
    if (fm < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

std::vector<double> analysis_grid() {
  std::vector<double> grid{0.0};
  for (int i = -60; i <= 60; ++i) grid.push_back(std::pow(10.0, i / 10.0));
  return grid;
}

} // namespace

const char *to_string(FunctionKind kind) {
  switch (kind) {
  case FunctionKind::Constant: return "constant";
  case FunctionKind::ScalarIdentity: return "scalar_identity";
  case FunctionKind::WeightedArithmetic: return "arithmetic";
  case FunctionKind::WeightedGeometric: return "geometric";
  case FunctionKind::WeightedHarmonic: return "harmonic";
  case FunctionKind::QuasiArithmetic: return "quasi_arithmetic";
  case FunctionKind::Logarithmic: return "logarithmic";
  case FunctionKind::DualLogarithmic: return "dual_logarithmic";
  case FunctionKind::Custom: return "custom";
  }
  return "unknown";
}

FunctionSpec FunctionSpec::constant(double k) {
  require_scale(k, "constant");
  FunctionSpec f(FunctionKind::Constant);
  f.k_ = k;
  return f;
}

FunctionSpec FunctionSpec::scalar_identity(double k) {
  require_scale(k, "scalar_identity");
  FunctionSpec f(FunctionKind::ScalarIdentity);
  f.k_ = k;
  return f;
}

FunctionSpec FunctionSpec::arithmetic(double alpha) {
  require_weight(alpha, "arithmetic");
  FunctionSpec f(FunctionKind::WeightedArithmetic);
  f.alpha_ = alpha;
  f.p_ = 1.0;
  return f;
}

FunctionSpec FunctionSpec::geometric(double alpha) {
  require_weight(alpha, "geometric");
  FunctionSpec f(FunctionKind::WeightedGeometric);
  f.alpha_ = alpha;
  return f;
}

FunctionSpec FunctionSpec::harmonic(double alpha) {
  require_weight(alpha, "harmonic");
  FunctionSpec f(FunctionKind::WeightedHarmonic);
  f.alpha_ = alpha;
  f.p_ = -1.0;
  return f;
}

FunctionSpec FunctionSpec::quasi_arithmetic(double p, double alpha) {
  require_weight(alpha, "quasi_arithmetic");
  if (!(p >= -1.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "quasi_arithmetic: exponent p=" << p << " must lie in [-1, 1]";
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (p == 0.0) return geometric(alpha);
  FunctionSpec f(FunctionKind::QuasiArithmetic);
  f.alpha_ = alpha;
  f.p_ = p;
  return f;
}

FunctionSpec FunctionSpec::logarithmic() { return FunctionSpec(FunctionKind::Logarithmic); }

FunctionSpec FunctionSpec::dual_logarithmic() { return FunctionSpec(FunctionKind::DualLogarithmic); }

FunctionSpec FunctionSpec::custom(CustomFunction fn) {
  if (!fn.fn) throw Error(ErrorKind::DomainError, "custom function has no evaluator");
  FunctionSpec f(FunctionKind::Custom);
  f.custom_ = std::make_shared<const CustomFunction>(std::move(fn));
  const ShapeCheck shape = check_scalar_shape(f);
  if (!shape.monotone || !shape.midpoint_concave) {
    std::ostringstream os;
    os << "custom function '" << f.custom_->name << "' fails grid checks (decrease "
       << shape.worst_decrease << ", concavity gap " << shape.worst_concavity_gap << ")";
    throw Error(ErrorKind::DomainError, os.str());
  }
  return f;
}

double FunctionSpec::operator()(double x) const { return eval_fn(*this, x); }

std::string FunctionSpec::to_string() const {
  std::ostringstream os;
  using text::format_double;
  os << opconn::to_string(kind_);
  switch (kind_) {
  case FunctionKind::Constant:
  case FunctionKind::ScalarIdentity: os << ":k=" << format_double(k_); break;
  case FunctionKind::WeightedArithmetic:
  case FunctionKind::WeightedGeometric:
  case FunctionKind::WeightedHarmonic: os << ":alpha=" << format_double(alpha_); break;
  case FunctionKind::QuasiArithmetic:
    os << ":p=" << format_double(p_) << ",alpha=" << format_double(alpha_);
    break;
  case FunctionKind::Custom: os << ":" << custom_->name; break;
  default: break;
  }
  return os.str();
}

FunctionSpec FunctionSpec::parse(std::string_view text) {
  std::string kind;
  std::vector<std::string> positional;
  std::map<std::string, double> named;

  auto add_param = [&](std::string_view token) {
    token = text::trim(token);
    if (token.empty()) return;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      positional.emplace_back(token);
      return;
    }
    const std::string key(text::trim(token.substr(0, eq)));
    const std::string_view value = text::trim(token.substr(eq + 1));
    if (key == "kind") {
      kind = std::string(value);
      return;
    }
    named[key] = text::parse_double(value, key);
  };

  const std::string_view body = text::trim(text);
  if (body.substr(0, 5) == "kind=") {
    for (auto token : text::split(body, ' ')) add_param(token);
  } else {
    const auto colon = body.find(':');
    kind = std::string(text::trim(body.substr(0, colon)));
    if (colon != std::string_view::npos) {
      for (auto token : text::split(body.substr(colon + 1), ',')) add_param(token);
    }
  }
  if (kind.empty()) throw Error(ErrorKind::Parse, "function spec has no kind");

  auto take = [&](const char *name, std::size_t position, std::optional<double> fallback) {
    if (auto it = named.find(name); it != named.end()) {
      const double v = it->second;
      named.erase(it);
      return v;
    }
    if (position < positional.size()) return text::parse_double(positional[position], name);
    if (fallback) return *fallback;
    throw Error(ErrorKind::Parse, "function spec '" + kind + "' needs parameter " + name);
  };
  auto finish = [&](FunctionSpec f, std::size_t n_positional) {
    if (!named.empty())
      throw Error(ErrorKind::Parse, "unknown parameter '" + named.begin()->first + "' for " + kind);
    if (positional.size() > n_positional)
      throw Error(ErrorKind::Parse, "too many parameters for " + kind);
    return f;
  };

  if (kind == "constant") return finish(constant(take("k", 0, 1.0)), 1);
  if (kind == "left_trivial") return finish(constant(1.0), 0);
  if (kind == "scalar_identity" || kind == "identity")
    return finish(scalar_identity(take("k", 0, 1.0)), 1);
  if (kind == "right_trivial") return finish(scalar_identity(1.0), 0);
  if (kind == "arithmetic" || kind == "weighted_arithmetic")
    return finish(arithmetic(take("alpha", 0, 0.5)), 1);
  if (kind == "geometric" || kind == "weighted_geometric")
    return finish(geometric(take("alpha", 0, 0.5)), 1);
  if (kind == "harmonic" || kind == "weighted_harmonic")
    return finish(harmonic(take("alpha", 0, 0.5)), 1);
  if (kind == "quasi_arithmetic") {
    const double p = take("p", 0, std::nullopt);
    const double alpha = take("alpha", 1, 0.5);
    return finish(quasi_arithmetic(p, alpha), 2);
  }
  if (kind == "logarithmic") return finish(logarithmic(), 0);
  if (kind == "dual_logarithmic") return finish(dual_logarithmic(), 0);
  throw Error(ErrorKind::Parse, "unknown function kind '" + kind + "'");
}

double eval_fn(const FunctionSpec &f, double x) {
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "argument " << x << " is negative";
    throw Error(ErrorKind::DomainError, os.str());
  }
  const double a = f.alpha();
  switch (f.kind()) {
  case FunctionKind::Constant: return f.k();
  case FunctionKind::ScalarIdentity: return f.k() * x;
  case FunctionKind::WeightedArithmetic: return (1.0 - a) + a * x;
  case FunctionKind::WeightedGeometric: return std::pow(x, a);
  case FunctionKind::WeightedHarmonic: return harmonic_kernel(a, x);
  case FunctionKind::QuasiArithmetic: {
    const double p = f.p();
    if (x == 0.0 && p < 0.0) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return p > 0.0 ? x : std::pow(1.0 - a, 1.0 / p);
    return std::pow((1.0 - a) + a * std::pow(x, p), 1.0 / p);
  }
  case FunctionKind::Logarithmic: {
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double d = x - 1.0;
    return d / std::log1p(d);
  }
  case FunctionKind::DualLogarithmic: {
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double d = x - 1.0;
    return x * std::log1p(d) / d;
  }
  case FunctionKind::Custom: return eval_custom(*f.custom_function(), x);
  }
  return 0.0;
}

double eval_inverse(const FunctionSpec &f, double y,
                    std::optional<std::pair<double, double>> bracket_hint) {
  const FunctionAnalysis analysis = analyze_fn(f);
  if (!analysis.props.injective) {
    throw Error(ErrorKind::NotInjective, f.to_string() + " is constant and has no inverse");
  }
  const RangeDescriptor &range = analysis.range;
  const bool above_open_end = !range.upper_attained && y >= range.upper;
  if (!std::isfinite(y) || y < range.lower || above_open_end || y > range.upper) {
    std::ostringstream os;
    os << "value " << y << " outside range of " << f.to_string() << " [" << range.lower << ", "
       << range.upper << (range.upper_attained ? "]" : ")") << "; gap " << range.gap(y);
    throw Error(ErrorKind::RangeError, os.str());
  }
  const double a = f.alpha();
  switch (f.kind()) {
  case FunctionKind::ScalarIdentity: return y / f.k();
  case FunctionKind::WeightedArithmetic: return std::max(0.0, (y - (1.0 - a)) / a);
  case FunctionKind::WeightedGeometric: return std::pow(y, 1.0 / a);
  case FunctionKind::WeightedHarmonic: return a * y / (1.0 - (1.0 - a) * y);
  case FunctionKind::QuasiArithmetic: {
    const double p = f.p();
    if (y == 0.0) return 0.0;
    const double base = std::max(0.0, 1.0 - 1.0 / a + std::pow(y, p) / a);
    if (base == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(base, 1.0 / p);
  }
  case FunctionKind::DualLogarithmic:
    // x log x / (x - 1) > log x for x > 1, so e^y brackets the preimage even
    // where it lies beyond the generic 1e15 expansion limit.
    if (!bracket_hint && y > 1.0 && y < 700.0) bracket_hint = std::make_pair(0.0, std::exp(y + 1.0));
    return bisect_inverse(f, y, bracket_hint);
  default: return bisect_inverse(f, y, bracket_hint);
  }
}

FunctionSpec transpose_fn(const FunctionSpec &f) {
  switch (f.kind()) {
  case FunctionKind::Constant: return FunctionSpec::scalar_identity(f.k());
  case FunctionKind::ScalarIdentity: return FunctionSpec::constant(f.k());
  case FunctionKind::WeightedArithmetic: return FunctionSpec::arithmetic(1.0 - f.alpha());
  case FunctionKind::WeightedGeometric: return FunctionSpec::geometric(1.0 - f.alpha());
  case FunctionKind::WeightedHarmonic: return FunctionSpec::harmonic(1.0 - f.alpha());
  case FunctionKind::QuasiArithmetic: return FunctionSpec::quasi_arithmetic(f.p(), 1.0 - f.alpha());
  case FunctionKind::Logarithmic:
  case FunctionKind::DualLogarithmic: return f;
  case FunctionKind::Custom: break;
  }
  const CustomFunction &c = *f.custom_function();
  CustomFunction t;
  t.name = "transpose(" + c.name + ")";
  t.value_at_zero = c.slope_at_infinity ? *c.slope_at_infinity : slope_at_infinity_estimate(f);
  t.slope_at_infinity = eval_fn(f, 0.0);
  t.fn = [f](double x) { return x * eval_fn(f, 1.0 / x); };
  return FunctionSpec::custom(std::move(t));
}

bool RangeDescriptor::unbounded() const { return upper == kInf; }

double RangeDescriptor::gap(double y) const {
  if (y < lower) return lower - y;
  if (!unbounded() && y > upper) return y - upper;
  if (!unbounded() && !upper_attained && y == upper) return 0.0;
  return 0.0;
}

bool RangeDescriptor::accepts(double y, double tol) const {
  if (y < lower - tol) return false;
  if (unbounded()) return true;
  return upper_attained ? y <= upper + tol : y <= upper - tol;
}

FunctionAnalysis analyze_fn(const FunctionSpec &f) {
  FunctionAnalysis out;
  FunctionProps &props = out.props;
  RangeDescriptor &range = out.range;
  const double a = f.alpha();
  props.f0 = eval_fn(f, 0.0);
  range.lower = props.f0;
  range.upper = kInf;
  range.upper_attained = false;

  switch (f.kind()) {
  case FunctionKind::Constant:
    props.is_constant = true;
    props.is_scalar_identity = f.k() == 0.0;
    props.bounded = true;
    range.upper = f.k();
    range.upper_attained = true;
    props.transpose_f0 = 0.0;
    break;
  case FunctionKind::ScalarIdentity:
    props.is_scalar_identity = true;
    props.is_constant = f.k() == 0.0;
    props.transpose_f0 = f.k();
    if (props.is_constant) {
      props.bounded = true;
      range.upper = 0.0;
      range.upper_attained = true;
    }
    break;
  case FunctionKind::WeightedArithmetic: props.transpose_f0 = a; break;
  case FunctionKind::WeightedGeometric:
  case FunctionKind::Logarithmic:
  case FunctionKind::DualLogarithmic: props.transpose_f0 = 0.0; break;
  case FunctionKind::WeightedHarmonic:
    props.bounded = true;
    range.upper = 1.0 / (1.0 - a);
    props.transpose_f0 = 0.0;
    break;
  case FunctionKind::QuasiArithmetic:
    if (f.p() > 0.0) {
      props.transpose_f0 = std::pow(a, 1.0 / f.p());
    } else {
      props.bounded = true;
      range.upper = std::pow(1.0 - a, 1.0 / f.p());
      props.transpose_f0 = 0.0;
    }
    break;
  case FunctionKind::Custom: {
    props.numeric = true;
    range.numeric = true;
    const CustomFunction &c = *f.custom_function();
    const double f1 = eval_fn(f, 1.0);
    bool constant = true;
    bool linear = std::abs(props.f0) <= 1e-12;
    for (double x : analysis_grid()) {
      const double v = eval_fn(f, x);
      if (std::abs(v - props.f0) > 1e-12 * (1.0 + std::abs(props.f0))) constant = false;
      if (std::abs(v - f1 * x) > 1e-12 * (1.0 + std::abs(v))) linear = false;
    }
    props.is_constant = constant;
    props.is_scalar_identity = linear;
    props.transpose_f0 = c.slope_at_infinity ? *c.slope_at_infinity : slope_at_infinity_estimate(f);
    const double top = eval_fn(f, 1e12);
    const double before = eval_fn(f, 1e11);
    props.bounded = props.transpose_f0 == 0.0 && top - before <= 1e-6 * (1.0 + top);
    if (constant) {
      range.upper = props.f0;
      range.upper_attained = true;
    } else if (props.bounded) {
      range.upper = top;
    }
    break;
  }
  }
  props.injective = !props.is_constant;
  return out;
}

ShapeCheck check_scalar_shape(const FunctionSpec &f, int grid_points) {
  ShapeCheck out;
  std::vector<double> xs{0.0};
  for (int i = 0; i < grid_points; ++i) {
    xs.push_back(std::pow(10.0, -6.0 + 12.0 * i / (grid_points - 1)));
  }
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(eval_fn(f, x));
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double drop = ys[i - 1] - ys[i];
    if (drop > 1e-12 * (1.0 + std::abs(ys[i]))) {
      out.monotone = false;
      out.worst_decrease = std::max(out.worst_decrease, drop);
    }
  }
  for (std::size_t i = 0; i + 2 < xs.size(); i += 1) {
    const double x = xs[i];
    const double y = xs[i + 2];
    const double mid = eval_fn(f, 0.5 * (x + y));
    const double chord = 0.5 * (ys[i] + ys[i + 2]);
    const double gap = chord - mid;
    if (gap > 1e-12 * (1.0 + std::abs(chord))) {
      out.midpoint_concave = false;
      out.worst_concavity_gap = std::max(out.worst_concavity_gap, gap);
    }
  }
  return out;
}

} // namespace opconn
