#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbv/return_series.hpp"

namespace mbv {

/// Nanoseconds since the Unix epoch.
using Timestamp = std::int64_t;
/// Nanoseconds.
using Duration = std::int64_t;

/// The averaging interval around the current time, partitioned into
/// `trade_count` equal spans. Grid instant i (1-based) is the right edge of
/// span i, so every instant lies in [start, end].
class AveragingWindow {
public:
    /// Same as unit(2).
    AveragingWindow() = default;

    /// Window of `width` ns centered on `center`, split into `trade_count`
    /// spans. Requires trade_count >= 2 and width divisible by trade_count.
    static AveragingWindow centered(Timestamp center, Duration width, std::size_t trade_count);
    /// Window starting at `start`; same requirements as centered().
    static AveragingWindow starting_at(Timestamp start, Duration width, std::size_t trade_count);
    /// Abstract window [0, n] with unit span; handy when only the trade
    /// sequence matters.
    static AveragingWindow unit(std::size_t trade_count);

    Timestamp start() const noexcept { return start_; }
    Timestamp end() const noexcept { return start_ + width_; }
    Timestamp center() const noexcept { return start_ + width_ / 2; }
    Duration width() const noexcept { return width_; }
    Duration span() const noexcept { return span_; }
    std::size_t trade_count() const noexcept { return trade_count_; }

    /// Grid instant t_i, i in 1..N.
    Timestamp instant(std::size_t i) const noexcept {
        return start_ + static_cast<Duration>(i) * span_;
    }
    bool contains(Timestamp ts) const noexcept { return ts >= start_ && ts <= end(); }
    /// 1-based sub-interval holding `ts`; the right edge belongs to the last bin.
    std::size_t bin_of(Timestamp ts) const noexcept;

    friend bool operator==(const AveragingWindow&, const AveragingWindow&) = default;

private:
    AveragingWindow(Timestamp start, Duration width, std::size_t n);

    Timestamp start_ = 0;
    Duration width_ = 2;
    Duration span_ = 1;
    std::size_t trade_count_ = 2;
};

struct Trade {
    std::size_t grid_index = 0;  // 1..N
    double price = 0.0;          // currency per share
    double volume = 0.0;         // shares
    double value = 0.0;          // currency

    friend bool operator==(const Trade&, const Trade&) = default;
};

/// One security's trades on the window grid. Construction stores the data
/// as given; validate_tape() reports what is wrong with it, and the
/// analytics below throw on the conditions they cannot handle.
class SecurityTape {
public:
    SecurityTape(std::string security_id, AveragingWindow window, std::vector<Trade> trades,
                 double base_price);

    const std::string& security_id() const noexcept { return security_id_; }
    const AveragingWindow& window() const noexcept { return window_; }
    std::span<const Trade> trades() const noexcept { return trades_; }
    double base_price() const noexcept { return base_price_; }
    std::size_t size() const noexcept { return trades_.size(); }

    std::vector<double> prices() const;
    std::vector<double> volumes() const;
    std::vector<double> values() const;

    /// Copy of this tape with a different reference price p(t0).
    SecurityTape with_base_price(double base_price) const;

private:
    std::string security_id_;
    AveragingWindow window_;
    std::vector<Trade> trades_;
    double base_price_;
};

enum class ViolationKind {
    IndexGap,
    NonpositivePrice,
    NegativeVolume,
    NonfiniteField,
    ValueMismatch,
    ZeroTotalVolume,
    NonpositiveBasePrice,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::size_t grid_index = 0;  // 0 when the violation is tape-wide
    std::string message;
};

struct ValidationOutcome {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Relative tolerance for identities on ingested data.
inline constexpr double kIngestTolerance = 1e-9;
/// Relative tolerance for identities on internally computed data.
inline constexpr double kComputeTolerance = 1e-12;

ValidationOutcome validate_tape(const SecurityTape& tape);
/// Throws Error(InvalidTape) carrying the first violation.
void require_valid(const SecurityTape& tape);

struct RawTrade {
    Timestamp timestamp = 0;
    double price = 0.0;
    double volume = 0.0;
};

enum class LeadingBinPolicy {
    Strict,    // empty first bin is an error
    Backfill,  // empty leading bins take the first observed price
};

/// Aggregates asynchronous ticks onto the window grid: per bin, volume and
/// value are summed and the price is the bin VWAP. An empty bin carries the
/// previous bin's price with zero volume and value. A bin whose ticks all
/// have zero volume takes its last tick's price.
SecurityTape bin_raw_trades(std::string security_id, std::span<const RawTrade> raw,
                            const AveragingWindow& window, double base_price,
                            LeadingBinPolicy policy = LeadingBinPolicy::Strict);

struct TapeMoments {
    double mean_value = 0.0;    // C(t)
    double total_value = 0.0;   // C_sum(t)
    double mean_volume = 0.0;   // U(t)
    double total_volume = 0.0;  // U_sum(t)
};

TapeMoments tape_moments(const SecurityTape& tape);

/// C_sum / U_sum. Throws ZeroTotalVolume.
double vwap(const SecurityTape& tape);

/// Gross returns p(t_i)/p(t0) with mean vwap/p(t0), weighted by volume.
/// Throws ZeroTotalVolume or NonpositivePrice (base price).
ReturnSeries security_returns(const SecurityTape& tape);

}  // namespace mbv
