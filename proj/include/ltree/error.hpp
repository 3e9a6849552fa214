#pragma once

#include <stdexcept>
#include <string>

namespace ltree {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  DegenerateCorrelation,
  RankDeficient,
  Config,
  Io,
  Numerical,
  Internal,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library. The code survives the trip through
/// the C API, where it becomes an ltree_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ltree
