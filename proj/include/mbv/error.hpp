#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbv {

enum class ErrorCode {
    InvalidArgument,
    InvalidTape,
    EmptyLeadingBin,
    TimestampOutOfWindow,
    ZeroTotalVolume,
    DuplicateSecurity,
    NonpositiveShares,
    NonpositivePrice,
    SecurityMismatch,
    UnknownSecurity,
    MissingSecurity,
    WindowMismatch,
    ZeroPortfolioVolumeAtInstant,
    LengthMismatch,
    DimensionMismatch,
    DegenerateWindow,
    NegativeVariance,
    InvalidConfig,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every analytics routine. The code is stable and
/// is what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : " " + detail)),
          code_(code),
          detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace mbv
