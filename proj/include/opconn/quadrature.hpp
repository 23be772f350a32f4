// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace opconn {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on (a, b).
QuadratureRule gauss_legendre(int n, double a, double b);

} // namespace opconn
