#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optbasis {

enum class ErrorKind {
  SingularOperator,
  DimensionMismatch,
  RankDeficient,
  SvdFailure,
  OrderTooHigh,
  ProblemTooLarge,
  SingularTheta,
  Diverged,
  RankExhausted,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::SingularOperator: return "SingularOperator";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::RankDeficient: return "RankDeficient";
  case ErrorKind::SvdFailure: return "SvdFailure";
  case ErrorKind::OrderTooHigh: return "OrderTooHigh";
  case ErrorKind::ProblemTooLarge: return "ProblemTooLarge";
  case ErrorKind::SingularTheta: return "SingularTheta";
  case ErrorKind::Diverged: return "Diverged";
  case ErrorKind::RankExhausted: return "RankExhausted";
  case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace optbasis
