#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlf {

enum class ErrorCode {
    // ingestion
    NonPositivePrice,
    TooShort,
    EmptyInput,
    ReturnBelowNegOne,
    MissingColumn,
    ParseError,
    // model / controller
    InvalidModel,
    InadmissibleGain,
    ReturnOutOfBounds,
    Overflow,
    DomainError,
    StageTooSmall,
    LengthMismatch,
    TooLarge,
    // optimizer
    TargetTooLarge,
    TargetNonpositive,
    ZeroDrift,
    ZeroVolatility,
    NonMonotoneEstimate,
    // a proved invariant did not hold
    InternalConsistency,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every domain failure; `code()` tells callers
/// (and the CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace dlf
