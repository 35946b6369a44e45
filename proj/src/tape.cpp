#include "mbv/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "mbv/error.hpp"
#include "mbv/kernels.hpp"

namespace mbv {

namespace {

std::string at(std::size_t i) { return " at i=" + std::to_string(i); }

}  // namespace

// ---------------------------------------------------------------------------
// AveragingWindow

AveragingWindow::AveragingWindow(Timestamp start, Duration width, std::size_t n)
    : start_(start), width_(width), span_(0), trade_count_(n) {
    if (n < 2) throw Error(ErrorCode::DegenerateWindow, "trade count must be >= 2");
    if (width <= 0) throw Error(ErrorCode::InvalidArgument, "window width must be positive");
    const auto sn = static_cast<Duration>(n);
    if (width % sn != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "window width " + std::to_string(width) + " not divisible by " +
                        std::to_string(n) + " bins");
    }
    span_ = width / sn;
}

AveragingWindow AveragingWindow::centered(Timestamp center, Duration width,
                                          std::size_t trade_count) {
    return AveragingWindow(center - width / 2, width, trade_count);
}

AveragingWindow AveragingWindow::starting_at(Timestamp start, Duration width,
                                             std::size_t trade_count) {
    return AveragingWindow(start, width, trade_count);
}

AveragingWindow AveragingWindow::unit(std::size_t trade_count) {
    return AveragingWindow(0, static_cast<Duration>(trade_count), trade_count);
}

std::size_t AveragingWindow::bin_of(Timestamp ts) const noexcept {
    if (ts <= start_) return 1;
    const auto offset = static_cast<std::size_t>((ts - start_) / span_);
    return std::min(offset + 1, trade_count_);
}

// ---------------------------------------------------------------------------
// SecurityTape

SecurityTape::SecurityTape(std::string security_id, AveragingWindow window,
                           std::vector<Trade> trades, double base_price)
    : security_id_(std::move(security_id)),
      window_(window),
      trades_(std::move(trades)),
      base_price_(base_price) {}

std::vector<double> SecurityTape::prices() const {
    std::vector<double> out(trades_.size());
    std::transform(trades_.begin(), trades_.end(), out.begin(), [](const Trade& t) { return t.price; });
    return out;
}

std::vector<double> SecurityTape::volumes() const {
    std::vector<double> out(trades_.size());
    std::transform(trades_.begin(), trades_.end(), out.begin(), [](const Trade& t) { return t.volume; });
    return out;
}

std::vector<double> SecurityTape::values() const {
    std::vector<double> out(trades_.size());
    std::transform(trades_.begin(), trades_.end(), out.begin(), [](const Trade& t) { return t.value; });
    return out;
}

SecurityTape SecurityTape::with_base_price(double base_price) const {
    return SecurityTape(security_id_, window_, trades_, base_price);
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::IndexGap: return "index_gap";
        case ViolationKind::NonpositivePrice: return "nonpositive_price";
        case ViolationKind::NegativeVolume: return "negative_volume";
        case ViolationKind::NonfiniteField: return "nonfinite_field";
        case ViolationKind::ValueMismatch: return "value_mismatch";
        case ViolationKind::ZeroTotalVolume: return "zero_total_volume";
        case ViolationKind::NonpositiveBasePrice: return "nonpositive_base_price";
    }
    return "unknown";
}

ValidationOutcome validate_tape(const SecurityTape& tape) {
    ValidationOutcome out;
    auto report = [&](ViolationKind kind, std::size_t i, std::string msg) {
        out.violations.push_back({kind, i, std::move(msg)});
    };

    const std::size_t n = tape.window().trade_count();
    const auto trades = tape.trades();

    if (trades.size() != n) {
        report(ViolationKind::IndexGap, 0,
               "expected " + std::to_string(n) + " trades, found " + std::to_string(trades.size()));
    }
    std::vector<int> seen(n + 1, 0);
    std::size_t previous = 0;
    for (const auto& t : trades) {
        if (t.grid_index < 1 || t.grid_index > n) {
            report(ViolationKind::IndexGap, t.grid_index, "index out of range" + at(t.grid_index));
            continue;
        }
        if (++seen[t.grid_index] == 2) {
            report(ViolationKind::IndexGap, t.grid_index, "duplicate index" + at(t.grid_index));
        }
        if (t.grid_index <= previous && seen[t.grid_index] == 1) {
            report(ViolationKind::IndexGap, t.grid_index, "index out of order" + at(t.grid_index));
        }
        previous = t.grid_index;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        if (seen[i] == 0) report(ViolationKind::IndexGap, i, "index gap" + at(i));
    }

    kernels::CompensatedSum total_volume;
    for (const auto& t : trades) {
        const std::size_t i = t.grid_index;
        if (!std::isfinite(t.price) || !std::isfinite(t.volume) || !std::isfinite(t.value)) {
            report(ViolationKind::NonfiniteField, i, "nonfinite field" + at(i));
            continue;
        }
        if (t.price <= 0.0) report(ViolationKind::NonpositivePrice, i, "nonpositive price" + at(i));
        if (t.volume < 0.0) report(ViolationKind::NegativeVolume, i, "negative volume" + at(i));
        const double implied = t.price * t.volume;
        if (std::abs(t.value - implied) > kIngestTolerance * std::max(1.0, std::abs(t.value))) {
            report(ViolationKind::ValueMismatch, i, "value mismatch" + at(i));
        }
        total_volume.add(t.volume);
    }
    if (!(total_volume.value() > 0.0)) {
        report(ViolationKind::ZeroTotalVolume, 0, "zero total volume");
    }
    if (!(tape.base_price() > 0.0) || !std::isfinite(tape.base_price())) {
        report(ViolationKind::NonpositiveBasePrice, 0, "nonpositive base price");
    }
    return out;
}

void require_valid(const SecurityTape& tape) {
    const auto outcome = validate_tape(tape);
    if (!outcome.ok()) {
        throw Error(ErrorCode::InvalidTape,
                    tape.security_id() + ": " + outcome.violations.front().message);
    }
}

// ---------------------------------------------------------------------------
// Binning

SecurityTape bin_raw_trades(std::string security_id, std::span<const RawTrade> raw,
                            const AveragingWindow& window, double base_price,
                            LeadingBinPolicy policy) {
    if (raw.empty()) throw Error(ErrorCode::InvalidArgument, security_id + ": no raw trades");

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return raw[a].timestamp < raw[b].timestamp;
    });

    const std::size_t n = window.trade_count();
    std::vector<kernels::CompensatedSum> volume(n);
    std::vector<kernels::CompensatedSum> value(n);
    std::vector<std::optional<double>> last_price(n);

    for (const std::size_t k : order) {
        const RawTrade& r = raw[k];
        if (!window.contains(r.timestamp)) {
            throw Error(ErrorCode::TimestampOutOfWindow,
                        security_id + ": timestamp " + std::to_string(r.timestamp) +
                            " outside [" + std::to_string(window.start()) + ", " +
                            std::to_string(window.end()) + "]");
        }
        if (!(r.price > 0.0) || !std::isfinite(r.price)) {
            throw Error(ErrorCode::NonpositivePrice, security_id + ": tick price " + std::to_string(r.price));
        }
        if (!(r.volume >= 0.0) || !std::isfinite(r.volume)) {
            throw Error(ErrorCode::InvalidArgument, security_id + ": tick volume " + std::to_string(r.volume));
        }
        const std::size_t bin = window.bin_of(r.timestamp) - 1;
        volume[bin].add(r.volume);
        value[bin].add(r.price * r.volume);
        last_price[bin] = r.price;
    }

    std::optional<double> carried;
    if (!last_price[0]) {
        if (policy == LeadingBinPolicy::Strict) {
            throw Error(ErrorCode::EmptyLeadingBin, security_id + ": no trade in the first bin");
        }
        carried = *std::find_if(last_price.begin(), last_price.end(),
                                [](const auto& p) { return p.has_value(); });
    }

    std::vector<Trade> trades;
    trades.reserve(n);
    for (std::size_t b = 0; b < n; ++b) {
        Trade t;
        t.grid_index = b + 1;
        if (last_price[b]) {
            t.volume = volume[b].value();
            t.value = value[b].value();
            t.price = t.volume > 0.0 ? t.value / t.volume : *last_price[b];
            if (t.volume == 0.0) t.value = 0.0;
            carried = t.price;
        } else {
            t.price = *carried;
        }
        trades.push_back(t);
    }
    return SecurityTape(std::move(security_id), window, std::move(trades), base_price);
}

// ---------------------------------------------------------------------------
// Summaries

TapeMoments tape_moments(const SecurityTape& tape) {
    const auto values = tape.values();
    const auto volumes = tape.volumes();
    const double n = static_cast<double>(tape.size());
    TapeMoments m;
    m.total_value = kernels::parallel::sum(values);
    m.total_volume = kernels::parallel::sum(volumes);
    m.mean_value = m.total_value / n;
    m.mean_volume = m.total_volume / n;
    return m;
}

double vwap(const SecurityTape& tape) {
    const auto m = tape_moments(tape);
    if (!(m.total_volume > 0.0)) throw Error(ErrorCode::ZeroTotalVolume, tape.security_id());
    return m.total_value / m.total_volume;
}

ReturnSeries security_returns(const SecurityTape& tape) {
    if (!(tape.base_price() > 0.0)) {
        throw Error(ErrorCode::NonpositivePrice, tape.security_id() + ": base price");
    }
    ReturnSeries r;
    r.security_id = tape.security_id();
    r.base_price = tape.base_price();
    r.mean = vwap(tape) / tape.base_price();
    r.weights = tape.volumes();
    r.random.reserve(tape.size());
    for (const auto& t : tape.trades()) r.random.push_back(t.price / tape.base_price());
    return r;
}

double ReturnSeries::weighted_mean() const {
    const double total = kernels::parallel::sum(weights);
    return kernels::parallel::dot(random, weights) / total;
}

}  // namespace mbv
