#include "dlf/error.hpp"

namespace dlf {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ReturnBelowNegOne: return "ReturnBelowNegOne";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::InadmissibleGain: return "InadmissibleGain";
        case ErrorCode::ReturnOutOfBounds: return "ReturnOutOfBounds";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::StageTooSmall: return "StageTooSmall";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::TargetTooLarge: return "TargetTooLarge";
        case ErrorCode::TargetNonpositive: return "TargetNonpositive";
        case ErrorCode::ZeroDrift: return "ZeroDrift";
        case ErrorCode::ZeroVolatility: return "ZeroVolatility";
        case ErrorCode::NonMonotoneEstimate: return "NonMonotoneEstimate";
        case ErrorCode::InternalConsistency: return "InternalConsistency";
    }
    return "Unknown";
}

}  // namespace dlf
