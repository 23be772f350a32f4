// SPDX-License-Identifier: Apache-2.0

// Randomized verification of the connection axioms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opconn/connection.hpp"
#include "opconn/error.hpp"
#include "opconn/random.hpp"
#include "opconn/text.hpp"

namespace opconn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kContinuitySteps = 30;
constexpr int kEarlyStep = 10;

double negative_part_of_min_eig(const MatrixXd &m) {
  return std::max(0.0, -min_eigenvalue(m));
}

void write_tally(std::ostream &os, const char *name, const AxiomTally &t) {
  os << name << ":\n";
  os << "  trials: " << t.trials << "\n";
  os << "  failures: " << t.failures << "\n";
  os << "  worst_violation: " << text::format_double(t.worst_violation) << "\n";
}

} // namespace

void AxiomTally::record(double violation, bool failed) {
  ++trials;
  if (failed) ++failures;
  worst_violation = std::max(worst_violation, violation);
}

bool AxiomReport::all_pass() const {
  return monotonicity.failures == 0 && transformer_inequality.failures == 0 &&
         congruence_invariance.failures == 0 && continuity_from_above.failures == 0 &&
         fixed_point.failures == 0;
}

std::string AxiomReport::to_text() const {
  std::ostringstream os;
  os << "connection: " << connection << "\n";
  os << "dim: " << dim << "\n";
  os << "seed: " << seed << "\n";
  write_tally(os, "monotonicity", monotonicity);
  write_tally(os, "transformer_inequality", transformer_inequality);
  write_tally(os, "congruence_invariance", congruence_invariance);
  write_tally(os, "continuity_from_above", continuity_from_above);
  write_tally(os, "fixed_point", fixed_point);
  os << "all_pass: " << (all_pass() ? "true" : "false") << "\n";
  return os.str();
}

AxiomReport verify_axioms(const Connection &sigma, int trials, int dim, std::uint64_t seed,
                          const Tolerances &tol) {
  if (trials < 1) throw Error(ErrorKind::DomainError, "need at least one trial");
  if (dim < 1 || dim > kMaxHarnessDim) {
    std::ostringstream os;
    os << "harness dimension " << dim << " outside [1, " << kMaxHarnessDim << "]";
    throw Error(ErrorKind::DomainError, os.str());
  }
  AxiomReport report;
  report.connection = sigma.describe();
  report.dim = dim;
  report.seed = seed;
  const double f1 = sigma.representing(1.0);
  const MatrixXd identity = MatrixXd::Identity(dim, dim);
  auto eval = [&](const MatrixXd &a, const MatrixXd &b) {
    return evaluate(sigma, a, b, tol).matrix();
  };

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    std::uniform_int_distribution<int> rank_dist(0, dim);
    const MatrixXd a = random_pd(rng, dim);
    // Every fourth trial uses a rank-deficient second operand.
    const MatrixXd b = trial % 4 == 3 ? random_psd(rng, dim, dim - 1) : random_pd(rng, dim);
    const MatrixXd da = random_psd(rng, dim, rank_dist(rng), 0.01, 1.0);
    const MatrixXd db = random_psd(rng, dim, rank_dist(rng), 0.01, 1.0);
    const MatrixXd c_sym = random_symmetric(rng, dim);
    const MatrixXd c_pd = random_pd(rng, dim, 0.5, 2.0);

    MatrixXd base;
    try {
      base = eval(a, b);
    } catch (const Error &) {
      report.monotonicity.record(kInf, true);
      report.transformer_inequality.record(kInf, true);
      report.congruence_invariance.record(kInf, true);
      report.continuity_from_above.record(kInf, true);
      report.fixed_point.record(kInf, true);
      continue;
    }

    try {
      const double v = negative_part_of_min_eig(eval(a + da, b + db) - base);
      report.monotonicity.record(v, v > tol.order_tol);
    } catch (const Error &) {
      report.monotonicity.record(kInf, true);
    }

    try {
      const MatrixXd lhs = congruence_product(c_sym, base);
      const MatrixXd rhs = eval(congruence_product(c_sym, a), congruence_product(c_sym, b));
      const double v = negative_part_of_min_eig(rhs - lhs);
      report.transformer_inequality.record(v, v > tol.order_tol);
    } catch (const Error &) {
      report.transformer_inequality.record(kInf, true);
    }

    try {
      const MatrixXd lhs = congruence_product(c_pd, base);
      const MatrixXd rhs = eval(congruence_product(c_pd, a), congruence_product(c_pd, b));
      const double v = (lhs - rhs).norm() / (1.0 + lhs.norm());
      report.congruence_invariance.record(v, v > 1e-8);
    } catch (const Error &) {
      report.congruence_invariance.record(kInf, true);
    }

    // Decreasing sequences A + 2^{-n} I, B + 2^{-n} I: iterates must decrease in
    // the Loewner order and approach A s B.
    try {
      double worst = 0.0;
      MatrixXd previous = eval(a + identity, b + identity);
      double last_gap = spectral_norm((previous - base).eval());
      double early_gap = last_gap;
      bool gaps_shrink = true;
      for (int step = 1; step <= kContinuitySteps; ++step) {
        const double eps = std::ldexp(1.0, -step);
        MatrixXd current = eval(a + eps * identity, b + eps * identity);
        worst = std::max(worst, negative_part_of_min_eig(previous - current));
        const double gap = spectral_norm((current - base).eval());
        if (gap > last_gap + 1e-9 * (1.0 + base.norm())) gaps_shrink = false;
        last_gap = gap;
        if (step == kEarlyStep) early_gap = gap;
        previous = std::move(current);
      }
      // Slowly varying f (log mean, x^{1/4}) only creep towards the limit at
      // eps = 2^{-30}, so ask for continued decay rather than a small gap.
      const bool converged = last_gap <= std::max(0.5 * early_gap, 1e-9 * (1.0 + base.norm()));
      report.continuity_from_above.record(worst, worst > 1e-9 || !gaps_shrink || !converged);
    } catch (const Error &) {
      report.continuity_from_above.record(kInf, true);
    }

    try {
      const double v = (eval(a, a) - f1 * a).norm() / (1.0 + a.norm());
      report.fixed_point.record(v, v > 1e-9);
    } catch (const Error &) {
      report.fixed_point.record(kInf, true);
    }
  }
  return report;
}

} // namespace opconn
