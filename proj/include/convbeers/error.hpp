#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace convbeers {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  io,
  format,
  numerical,
  calibration,
  measurement,
  config,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::calibration: return "calibration";
    case ErrorCode::measurement: return "measurement";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

/// Single exception type for the library. The code is what the CLI emits in
/// its machine-readable error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace convbeers
