#include "uavnav/error.hpp"

namespace uavnav {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Shape: return "shape error";
    case ErrorCode::UnsatisfiableWorld: return "unsatisfiable world";
    case ErrorCode::ContractViolation: return "contract violation";
    case ErrorCode::Divergence: return "training divergence";
    case ErrorCode::CorruptCheckpoint: return "corrupt checkpoint";
    case ErrorCode::IncompatibleCheckpoint: return "incompatible checkpoint";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace uavnav
