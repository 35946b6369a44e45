#include "mbv/error.hpp"

namespace mbv {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidTape: return "InvalidTape";
        case ErrorCode::EmptyLeadingBin: return "EmptyLeadingBin";
        case ErrorCode::TimestampOutOfWindow: return "TimestampOutOfWindow";
        case ErrorCode::ZeroTotalVolume: return "ZeroTotalVolume";
        case ErrorCode::DuplicateSecurity: return "DuplicateSecurity";
        case ErrorCode::NonpositiveShares: return "NonpositiveShares";
        case ErrorCode::NonpositivePrice: return "NonpositivePrice";
        case ErrorCode::SecurityMismatch: return "SecurityMismatch";
        case ErrorCode::UnknownSecurity: return "UnknownSecurity";
        case ErrorCode::MissingSecurity: return "MissingSecurity";
        case ErrorCode::WindowMismatch: return "WindowMismatch";
        case ErrorCode::ZeroPortfolioVolumeAtInstant: return "ZeroPortfolioVolumeAtInstant";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateWindow: return "DegenerateWindow";
        case ErrorCode::NegativeVariance: return "NegativeVariance";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace mbv
