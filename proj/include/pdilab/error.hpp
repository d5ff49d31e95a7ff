#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdilab {

enum class ErrorCode {
  PreconditionViolation,
  DegeneratePoint,
  NoAdmissibleScale,
  NoConvergence,
  IllPosedBoundary,
  DomainExceeded,
  InsufficientScales,
  NonIntegrable,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, const std::string& what,
                    ErrorCode code = ErrorCode::PreconditionViolation) {
  if (!condition) throw Error(code, what);
}

}  // namespace pdilab
