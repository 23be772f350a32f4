// SPDX-License-Identifier: Apache-2.0

// Connections exercised by the test suites.

#pragma once

#include <string>
#include <vector>

#include "opconn/connection.hpp"

namespace opconn::fixtures {

inline std::vector<Connection> catalog_means() {
  std::vector<Connection> out;
  for (double a : {0.25, 0.5, 0.75}) {
    out.push_back(Connection::from_function(FunctionSpec::arithmetic(a)));
    out.push_back(Connection::from_function(FunctionSpec::geometric(a)));
    out.push_back(Connection::from_function(FunctionSpec::harmonic(a)));
  }
  for (double p : {-1.0, -0.5, 0.5, 1.0}) {
    for (double a : {0.25, 0.5, 0.75}) out.push_back(Connection::from_function(FunctionSpec::quasi_arithmetic(p, a)));
  }
  out.push_back(Connection::from_function(FunctionSpec::logarithmic()));
  out.push_back(Connection::from_function(FunctionSpec::dual_logarithmic()));
  return out;
}

inline std::vector<Connection> trivial_connections() {
  return {Connection::left_trivial(), Connection::right_trivial(), Connection::left_trivial(2.5),
          Connection::right_trivial(0.5)};
}

/// Catalog means, their scalar multiples, and the trivial connections.
inline std::vector<Connection> catalog_connections() {
  std::vector<Connection> out = catalog_means();
  out.push_back(Connection::from_function(FunctionSpec::geometric(0.5), 3.0));
  out.push_back(Connection::from_function(FunctionSpec::logarithmic(), 0.5));
  for (auto &c : trivial_connections()) out.push_back(c);
  return out;
}

/// Catalog connections that are neither constant nor scalar multiples of x.
inline std::vector<Connection> cancellable_connections() {
  std::vector<Connection> out;
  for (auto &c : catalog_connections()) {
    const auto props = c.analysis().props;
    if (!props.is_constant && !props.is_scalar_identity) out.push_back(c);
  }
  return out;
}

} // namespace opconn::fixtures
