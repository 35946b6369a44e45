#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mbv/portfolio.hpp"
#include "mbv/simulator.hpp"
#include "mbv/tape.hpp"
#include "mbv/variance.hpp"

namespace mbv::io {

enum class TimestampFormat {
    Auto,      // integer -> epoch nanoseconds, anything else -> ISO-8601
    EpochNs,
    Iso8601,
};

/// Parses `YYYY-MM-DDTHH:MM:SS[.fraction][Z|+HH:MM|-HH:MM]` (a space may
/// replace the `T`; no suffix means UTC) or integer epoch nanoseconds.
/// Throws Error(ParseError).
Timestamp parse_timestamp(std::string_view text, TimestampFormat format = TimestampFormat::Auto);
/// `YYYY-MM-DDTHH:MM:SS.nnnnnnnnnZ`
std::string format_iso8601(Timestamp ts);

/// Shortest text that parses back to exactly `x`.
std::string format_double(double x);

struct TapeRow {
    std::string security_id;
    Timestamp timestamp = 0;
    double price = 0.0;
    double volume = 0.0;
    std::size_t line = 0;  // physical line in the file, header is line 1
};

/// Reads `security_id,timestamp,price,volume`. Rows are returned as written;
/// only syntax is checked here. Throws Error(ParseError).
std::vector<TapeRow> read_tape_csv(std::istream& in, TimestampFormat format = TimestampFormat::Auto);

struct RowViolation {
    std::string kind;  // negative_volume, nonpositive_price, nonfinite_field, zero_total_volume
    std::string security_id;
    std::size_t line = 0;  // 0 for per-security violations
};

/// Content checks on ingested rows: every row must have a finite positive
/// price and finite non-negative volume, every security a positive total.
std::vector<RowViolation> check_tape_rows(const std::vector<TapeRow>& rows);

/// Ticks grouped by security id, in file order.
std::map<std::string, std::vector<RawTrade>> group_by_security(const std::vector<TapeRow>& rows);

void write_tape_csv(std::ostream& out, std::span<const SecurityTape> tapes);

/// Reads `security_id,shares,base_price`. Throws Error(ParseError).
std::vector<HoldingInput> read_portfolio_csv(std::istream& in);
void write_portfolio_csv(std::ostream& out, const PortfolioSpec& spec);

nlohmann::json report_to_json(const VarianceReport& report);
/// Inverse of report_to_json. Throws Error(ParseError) on schema mismatch.
VarianceReport report_from_json(const nlohmann::json& j);

std::string report_csv_header();
std::string report_csv_row(const VarianceReport& report);

/// Header `cv_u,rho,theta_m_mean,theta_mean,divergence_mean,divergence_stddev,replications`,
/// plus a trailing `theta_t_mean` column when the cells carry one.
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

}  // namespace mbv::io
