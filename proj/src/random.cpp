// SPDX-License-Identifier: Apache-2.0

#include "opconn/random.hpp"

#include <cmath>

namespace opconn {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MatrixXd random_orthogonal(Rng &rng, int n) {
  std::normal_distribution<double> normal;
  MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  // Fix column signs so the distribution does not depend on the QR convention.
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

VectorXd log_uniform(Rng &rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = std::exp(u(rng));
  return v;
}

MatrixXd compose(const MatrixXd &q, const VectorXd &values) {
  MatrixXd m = q * values.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

} // namespace

MatrixXd random_pd(Rng &rng, int n, double lo, double hi) {
  const MatrixXd q = random_orthogonal(rng, n);
  return compose(q, log_uniform(rng, n, lo, hi));
}

MatrixXd random_psd(Rng &rng, int n, int rank, double lo, double hi) {
  const MatrixXd q = random_orthogonal(rng, n);
  VectorXd values = log_uniform(rng, n, lo, hi);
  for (int i = rank; i < n; ++i) values(i) = 0.0;
  return compose(q, values);
}

MatrixXd random_symmetric(Rng &rng, int n, double lo, double hi) {
  const MatrixXd q = random_orthogonal(rng, n);
  VectorXd values = log_uniform(rng, n, lo, hi);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i) {
    if (coin(rng)) values(i) = -values(i);
  }
  return compose(q, values);
}

MatrixXd random_projection(Rng &rng, int n, int rank) {
  const MatrixXd q = random_orthogonal(rng, n);
  const MatrixXd basis = q.leftCols(rank);
  MatrixXd p = basis * basis.transpose();
  return 0.5 * (p + p.transpose());
}

} // namespace opconn
