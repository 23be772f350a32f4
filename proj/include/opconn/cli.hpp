// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit codes: 0 success, 1 input error, 2 when an
// equation has no solution (range violation or non-cancellable connection) or
// a verification check fails.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opconn::cli {

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Grammar of connection specs, measures and matrix files.
std::string grammar();

} // namespace opconn::cli
