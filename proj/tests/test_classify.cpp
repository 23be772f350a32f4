// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "opconn/classify.hpp"
#include "opconn/random.hpp"
#include "support/catalog.hpp"
#include "support/expect_error.hpp"

using namespace opconn;

namespace {

Connection fn(FunctionSpec f) { return Connection::from_function(std::move(f)); }

MatrixXd diag(std::initializer_list<double> v) {
  VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

} // namespace

TEST(Classify, LeftTrivialIsNotLeftCancellable) {
  const auto r = classify_connection(Connection::left_trivial());
  EXPECT_FALSE(r.left_cancellable);
  EXPECT_TRUE(r.right_cancellable);
  EXPECT_FALSE(r.cancellable);
  EXPECT_TRUE(r.is_mean);
  EXPECT_FALSE(r.nontrivial_mean);
  EXPECT_TRUE(r.regular);
}

TEST(Classify, ScalarIdentityIsNotRightCancellable) {
  const auto r = classify_connection(Connection::right_trivial(3.0));
  EXPECT_TRUE(r.left_cancellable);
  EXPECT_FALSE(r.right_cancellable);
  EXPECT_FALSE(r.is_mean);
  EXPECT_FALSE(r.regular);
  EXPECT_TRUE(r.transpose_regular);
  EXPECT_TRUE(r.measure_agrees);
}

TEST(Classify, GeometricHalf) {
  const auto r = classify_connection(fn(FunctionSpec::geometric(0.5)));
  EXPECT_TRUE(r.cancellable);
  EXPECT_TRUE(r.symmetric);
  EXPECT_TRUE(r.is_mean);
  EXPECT_TRUE(r.nontrivial_mean);
  EXPECT_FALSE(r.regular);
  EXPECT_TRUE(r.measure_known);
  EXPECT_TRUE(r.measure_agrees);
}

TEST(Classify, WeightedMeansAreNotSymmetric) {
  EXPECT_FALSE(classify_connection(fn(FunctionSpec::geometric(0.3))).symmetric);
  EXPECT_TRUE(classify_connection(fn(FunctionSpec::logarithmic())).symmetric);
  EXPECT_TRUE(classify_connection(fn(FunctionSpec::harmonic(0.5))).symmetric);
}

TEST(Classify, ArithmeticIsRegularBothWays) {
  const auto r = classify_connection(fn(FunctionSpec::arithmetic(0.3)));
  EXPECT_TRUE(r.regular);
  EXPECT_TRUE(r.transpose_regular);
  EXPECT_EQ(r.witnesses.at("f0"), 0.7);
  EXPECT_DOUBLE_EQ(r.witnesses.at("mu_atom_0"), 0.7);
  EXPECT_DOUBLE_EQ(r.witnesses.at("mu_atom_1"), 0.3);
}

TEST(Classify, EquivalencesAcrossCatalog) {
  std::vector<Connection> all = fixtures::catalog_connections();
  all.push_back(Connection::from_measure(FiniteMeasure({{0.0, 0.2}, {0.5, 0.8}})));
  all.push_back(Connection::from_measure(FiniteMeasure::arcsine(2.0)));
  all.push_back(Connection::from_measure(FiniteMeasure::dirac(1.0, 0.7)));
  for (const auto &s : all) {
    const auto r = classify_connection(s);
    const auto props = s.analysis().props;
    EXPECT_EQ(r.cancellable, r.left_cancellable && r.right_cancellable);
    EXPECT_EQ(r.left_cancellable, !props.is_constant) << s.describe();
    EXPECT_EQ(r.right_cancellable, !props.is_scalar_identity) << s.describe();
    if (r.nontrivial_mean) EXPECT_TRUE(r.cancellable) << s.describe();
    if (r.measure_known) {
      EXPECT_TRUE(r.measure_agrees) << r.to_text();
      EXPECT_EQ(r.transpose_regular, r.witnesses.at("mu_atom_1") > 0) << s.describe();
      EXPECT_EQ(r.regular, r.witnesses.at("mu_atom_0") > 0) << s.describe();
    }
  }
}

TEST(Classify, MeasureBuiltDiracMultiples) {
  const auto left = classify_connection(Connection::from_measure(FiniteMeasure::dirac(0.0, 2.0)));
  EXPECT_FALSE(left.left_cancellable);
  EXPECT_TRUE(left.measure_agrees);
  const auto right = classify_connection(Connection::from_measure(FiniteMeasure::dirac(1.0, 0.5)));
  EXPECT_FALSE(right.right_cancellable);
  EXPECT_TRUE(right.measure_agrees);
}

TEST(RegularityWitness, Examples) {
  const auto log_ev = regularity_witness(fn(FunctionSpec::logarithmic()), 3, 1);
  EXPECT_FALSE(log_ev.regular);
  EXPECT_TRUE(log_ev.consistent) << log_ev.to_text();
  EXPECT_FALSE(log_ev.checks[1].available);  // no closed-form measure

  const auto ar = regularity_witness(fn(FunctionSpec::arithmetic(0.25)), 3, 1);
  EXPECT_TRUE(ar.regular);
  EXPECT_EQ(ar.f0, 0.75);
  EXPECT_TRUE(ar.consistent) << ar.to_text();

  const auto h = regularity_witness(fn(FunctionSpec::harmonic(0.4)), 3, 1);
  EXPECT_FALSE(h.regular);
  EXPECT_TRUE(h.consistent) << h.to_text();
  EXPECT_TRUE(h.checks[1].available);
}

TEST(RegularityWitness, ConsistentForEveryCatalogConnection) {
  for (const auto &s : fixtures::catalog_connections()) {
    for (int dim : {1, 3, 6}) {
      const auto ev = regularity_witness(s, dim, 5);
      EXPECT_TRUE(ev.consistent) << ev.to_text();
      EXPECT_LE(ev.identity_zero_consistency, 1e-9);
    }
  }
}

TEST(RegularityWitness, Preconditions) {
  EXPECT_ERROR_KIND(regularity_witness(fn(FunctionSpec::logarithmic()), 0, 1), ErrorKind::DomainError);
  EXPECT_ERROR_KIND(regularity_witness(fn(FunctionSpec::logarithmic()), 40, 1), ErrorKind::DomainError);
}

TEST(ProjectionFixedPoints, GeometricFixesProjection) {
  const Connection geo = fn(FunctionSpec::geometric(0.5));
  const MatrixXd p = diag({1, 0});
  EXPECT_LE((evaluate(geo, MatrixXd::Identity(2, 2), p).matrix() - p).norm(), 1e-15);
  const auto r = projection_fixed_points(geo, 4, 1);
  EXPECT_TRUE(r.nonregular);
  EXPECT_TRUE(r.projections_fixed);
  EXPECT_TRUE(r.consistent()) << r.to_text();
  EXPECT_GT(r.fixed_points_found, 0);
}

TEST(ProjectionFixedPoints, ArithmeticMovesProjection) {
  const Connection ar = fn(FunctionSpec::arithmetic(0.5));
  const MatrixXd p = diag({1, 0});
  const MatrixXd expected = 0.5 * (MatrixXd::Identity(2, 2) + p);
  EXPECT_LE((evaluate(ar, MatrixXd::Identity(2, 2), p).matrix() - expected).norm(), 1e-15);
  const auto r = projection_fixed_points(ar, 3, 1);
  EXPECT_FALSE(r.nonregular);
  EXPECT_FALSE(r.projections_fixed);
  EXPECT_TRUE(r.consistent());
}

TEST(ProjectionFixedPoints, HalfIdentityIsNotFixed) {
  for (const auto &s : fixtures::catalog_means()) {
    const MatrixXd half = 0.5 * MatrixXd::Identity(3, 3);
    const double gap = (evaluate(s, MatrixXd::Identity(3, 3), half).matrix() - half).norm();
    EXPECT_GT(gap, 1e-3) << s.describe();
    EXPECT_GT(s.representing(0.5), 0.5);
    EXPECT_LT(s.representing(0.5), 1.0);
  }
}

TEST(ProjectionFixedPoints, RequiresMean) {
  EXPECT_ERROR_KIND(projection_fixed_points(Connection::right_trivial(2.0), 2, 1), ErrorKind::NotAMean);
  EXPECT_ERROR_KIND(projection_fixed_points(fn(FunctionSpec::logarithmic()), 2, 1, {}, 0), ErrorKind::DomainError);
}

TEST(ProjectionFixedPoints, TrivialMeansSkipSandwich) {
  const auto r = projection_fixed_points(Connection::right_trivial(), 3, 1);
  EXPECT_FALSE(r.nontrivial_mean);
  EXPECT_EQ(r.sandwich_points, 0);
  EXPECT_TRUE(r.projections_fixed);
}

TEST(ZeroEquation, Examples) {
  const auto lm = zero_equation(fn(FunctionSpec::logarithmic()), PdMatrixXd::identity(3));
  ASSERT_TRUE(lm.solved());
  EXPECT_EQ(lm.x->matrix().norm(), 0.0);

  EXPECT_EQ(zero_equation(fn(FunctionSpec::arithmetic(0.5)), PdMatrixXd::identity(3)).status,
            SolveStatus::RangeViolation);

  Rng rng(7);
  const auto h = zero_equation(fn(FunctionSpec::harmonic(0.5)), PdMatrixXd(random_pd(rng, 4)));
  ASSERT_TRUE(h.solved());
  EXPECT_LE(h.x->matrix().norm(), 1e-12);

  EXPECT_EQ(zero_equation(Connection::left_trivial(), PdMatrixXd::identity(2)).status, SolveStatus::NotCancellable);
}

TEST(Reports, TextIsStable) {
  const auto r = classify_connection(fn(FunctionSpec::arithmetic(0.5)));
  const std::string text = r.to_text();
  EXPECT_EQ(text.substr(0, text.find("witnesses:")),
            "connection: fn=arithmetic:alpha=0.5 scale=1\nleft_cancellable: true\nright_cancellable: true\n"
            "cancellable: true\nis_mean: true\nnontrivial_mean: true\nsymmetric: true\nregular: true\n"
            "transpose_regular: true\nalways_solvable: false\nmeasure_known: true\nmeasure_agrees: true\n");
  EXPECT_EQ(text, classify_connection(fn(FunctionSpec::arithmetic(0.5))).to_text());
}
