#ifndef ALSPACH_ERROR_HPP
#define ALSPACH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace alspach {

enum class ErrorCode {
  InvalidArgument,
  AddressOutOfRange,
  IncomparableLayout,
  UnsupportedLayout,
  NotARefinement,
  RatioAssumptionViolated,
  HypothesisNotMet,
  DimensionTooLarge,
  NotExact,
  NotSimplifiable,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::IncomparableLayout: return "IncomparableLayout";
    case ErrorCode::UnsupportedLayout: return "UnsupportedLayout";
    case ErrorCode::NotARefinement: return "NotARefinement";
    case ErrorCode::RatioAssumptionViolated: return "RatioAssumptionViolated";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NotExact: return "NotExact";
    case ErrorCode::NotSimplifiable: return "NotSimplifiable";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace alspach

#endif  // ALSPACH_ERROR_HPP
