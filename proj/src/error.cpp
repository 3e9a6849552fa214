#include "ltree/error.hpp"

namespace ltree {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NotPositiveDefinite: return "not positive definite";
    case ErrorCode::DegenerateCorrelation: return "degenerate correlation";
    case ErrorCode::RankDeficient: return "rank deficient";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Numerical: return "numerical failure";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace ltree
