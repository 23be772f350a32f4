// SPDX-License-Identifier: Apache-2.0

#include "opconn/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opconn/error.hpp"
#include "opconn/text.hpp"

namespace opconn::io {

MatrixDocument parse_matrix(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::Parse, std::string("matrix document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("rows"))
    throw Error(ErrorKind::Parse, "matrix document needs fields 'dim' and 'rows'");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
    throw Error(ErrorKind::Parse, "'dim' must be a positive integer");
  const auto n = static_cast<Eigen::Index>(doc["dim"].get<long long>());
  const auto &rows = doc["rows"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
    throw Error(ErrorKind::Parse, "'rows' must be an array of dim rows");
  MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      std::ostringstream os;
      os << "row " << i << " must hold " << n << " numbers";
      throw Error(ErrorKind::Parse, os.str());
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto &v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) {
        std::ostringstream os;
        os << "entry (" << i << ", " << j << ") is not a number";
        throw Error(ErrorKind::Parse, os.str());
      }
      m(i, j) = v.get<double>();
    }
  }
  MatrixDocument out;
  out.matrix = SymmetricMatrixXd(m);
  out.asymmetry = out.matrix.asymmetry();
  return out;
}

MatrixDocument read_matrix_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open matrix file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

std::string format_matrix(const MatrixXd &m) {
  std::ostringstream os;
  os << "{\"dim\": " << m.rows() << ", \"rows\": [";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) os << ", ";
    os << '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << text::format_double(m(i, j));
    }
    os << ']';
  }
  os << "]}";
  return os.str();
}

void write_matrix_file(const std::string &path, const MatrixXd &m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write matrix file '" + path + "'");
  out << format_matrix(m) << "\n";
}

} // namespace opconn::io
