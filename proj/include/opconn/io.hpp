// SPDX-License-Identifier: Apache-2.0

// Matrix documents: {"dim": n, "rows": [[...], ...]}. Readers symmetrize via
// (M + M^T)/2 and report the Frobenius norm of what was removed.

#pragma once

#include <string>
#include <string_view>

#include "opconn/symcore.hpp"

namespace opconn::io {

struct MatrixDocument {
  SymmetricMatrixXd matrix;
  double asymmetry = 0.0;
};

MatrixDocument parse_matrix(std::string_view text);
MatrixDocument read_matrix_file(const std::string &path);

/// Single-line document with shortest round-trip numbers.
std::string format_matrix(const MatrixXd &m);
void write_matrix_file(const std::string &path, const MatrixXd &m);

} // namespace opconn::io
