// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace opconn {

enum class ErrorKind {
  NonFinite,
  DomainError,
  DimMismatch,
  NotPsd,
  NotPd,
  RangeError,
  NotInjective,
  NoConvergence,
  NotCancellable,
  NotAMean,
  Parse,
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::NonFinite: return "NonFinite";
  case ErrorKind::DomainError: return "DomainError";
  case ErrorKind::DimMismatch: return "DimMismatch";
  case ErrorKind::NotPsd: return "NotPsd";
  case ErrorKind::NotPd: return "NotPd";
  case ErrorKind::RangeError: return "RangeError";
  case ErrorKind::NotInjective: return "NotInjective";
  case ErrorKind::NoConvergence: return "NoConvergence";
  case ErrorKind::NotCancellable: return "NotCancellable";
  case ErrorKind::NotAMean: return "NotAMean";
  case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace opconn
