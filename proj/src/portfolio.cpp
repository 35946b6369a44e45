#include "mbv/portfolio.hpp"

#include <algorithm>
#include <cmath>

#include "mbv/error.hpp"
#include "mbv/kernels.hpp"

namespace mbv {

PortfolioSpec PortfolioSpec::build(std::span<const HoldingInput> holdings) {
    if (holdings.empty()) throw Error(ErrorCode::InvalidArgument, "portfolio has no holdings");

    PortfolioSpec spec;
    spec.holdings_.reserve(holdings.size());
    for (const auto& h : holdings) {
        if (!(h.shares > 0.0) || !std::isfinite(h.shares)) {
            throw Error(ErrorCode::NonpositiveShares, h.security_id);
        }
        if (!(h.base_price > 0.0) || !std::isfinite(h.base_price)) {
            throw Error(ErrorCode::NonpositivePrice, h.security_id);
        }
        spec.holdings_.push_back({h.security_id, h.shares, h.base_price, h.base_price * h.shares});
    }
    std::sort(spec.holdings_.begin(), spec.holdings_.end(),
              [](const Holding& a, const Holding& b) { return a.security_id < b.security_id; });
    const auto dup = std::adjacent_find(
        spec.holdings_.begin(), spec.holdings_.end(),
        [](const Holding& a, const Holding& b) { return a.security_id == b.security_id; });
    if (dup != spec.holdings_.end()) throw Error(ErrorCode::DuplicateSecurity, dup->security_id);

    kernels::CompensatedSum value;
    kernels::CompensatedSum shares;
    for (const auto& h : spec.holdings_) {
        value.add(h.base_value);
        shares.add(h.shares);
    }
    spec.total_value_ = value.value();
    spec.total_shares_ = shares.value();
    spec.share_price_ = spec.total_value_ / spec.total_shares_;
    for (const auto& h : spec.holdings_) {
        spec.value_weights_.push_back(h.base_value / spec.total_value_);
        spec.share_weights_.push_back(h.shares / spec.total_shares_);
    }
    return spec;
}

std::optional<std::size_t> PortfolioSpec::index_of(const std::string& security_id) const {
    const auto it = std::lower_bound(
        holdings_.begin(), holdings_.end(), security_id,
        [](const Holding& h, const std::string& id) { return h.security_id < id; });
    if (it == holdings_.end() || it->security_id != security_id) return std::nullopt;
    return static_cast<std::size_t>(it - holdings_.begin());
}

double lambda_factor(const Holding& holding, const SecurityTape& tape) {
    if (holding.security_id != tape.security_id()) {
        throw Error(ErrorCode::SecurityMismatch, holding.security_id + " vs " + tape.security_id());
    }
    const double total = tape_moments(tape).total_volume;
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalVolume, tape.security_id());
    return holding.shares / total;
}

NormalizedTape normalize_tape(const Holding& holding, const SecurityTape& tape) {
    NormalizedTape out{holding.security_id, tape.window(), lambda_factor(holding, tape), {}, {}, {}};
    out.prices.reserve(tape.size());
    out.values.reserve(tape.size());
    out.volumes.reserve(tape.size());
    for (const auto& t : tape.trades()) {
        const double u = out.lambda * t.volume;
        out.prices.push_back(t.price);
        out.volumes.push_back(u);
        out.values.push_back(out.lambda * t.value);
    }
    return out;
}

std::vector<NormalizedTape> normalize_all(const PortfolioSpec& spec,
                                          std::span<const SecurityTape> tapes) {
    std::vector<const SecurityTape*> matched(spec.size(), nullptr);
    for (const auto& tape : tapes) {
        const auto j = spec.index_of(tape.security_id());
        if (!j) throw Error(ErrorCode::UnknownSecurity, tape.security_id());
        if (matched[*j]) throw Error(ErrorCode::DuplicateSecurity, tape.security_id());
        matched[*j] = &tape;
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (!matched[j]) throw Error(ErrorCode::MissingSecurity, spec.holdings()[j].security_id);
    }

    std::vector<std::optional<NormalizedTape>> slots(spec.size());
    std::vector<std::optional<Error>> failures(spec.size());
    const auto count = static_cast<std::ptrdiff_t>(spec.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
        const auto k = static_cast<std::size_t>(j);
        try {
            slots[k] = normalize_tape(spec.holdings()[k], *matched[k]);
        } catch (const Error& e) {
            failures[k] = e;
        }
    }
    std::vector<NormalizedTape> out;
    out.reserve(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (failures[j]) throw *failures[j];
        out.push_back(std::move(*slots[j]));
    }
    return out;
}

PortfolioTape build_portfolio_tape(const PortfolioSpec& spec,
                                   std::span<const NormalizedTape> normalized) {
    std::vector<const NormalizedTape*> ordered(spec.size(), nullptr);
    for (const auto& nt : normalized) {
        const auto j = spec.index_of(nt.security_id);
        if (!j) throw Error(ErrorCode::UnknownSecurity, nt.security_id);
        if (ordered[*j]) throw Error(ErrorCode::DuplicateSecurity, nt.security_id);
        ordered[*j] = &nt;
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (!ordered[j]) throw Error(ErrorCode::MissingSecurity, spec.holdings()[j].security_id);
    }

    const AveragingWindow window = ordered.front()->window;
    const std::size_t n = window.trade_count();
    for (const auto* nt : ordered) {
        if (nt->window != window || nt->volumes.size() != n || nt->values.size() != n) {
            throw Error(ErrorCode::WindowMismatch, nt->security_id);
        }
    }

    PortfolioTape pt{window, std::vector<double>(n), std::vector<double>(n),
                     std::vector<double>(n), 0.0, 0.0, 0.0};
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        kernels::CompensatedSum q;
        kernels::CompensatedSum w;
        for (const auto* nt : ordered) {
            q.add(nt->values[i]);
            w.add(nt->volumes[i]);
        }
        pt.values[i] = q.value();
        pt.volumes[i] = w.value();
        pt.prices[i] = pt.volumes[i] > 0.0 ? pt.values[i] / pt.volumes[i] : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pt.volumes[i] > 0.0)) {
            throw Error(ErrorCode::ZeroPortfolioVolumeAtInstant, "i=" + std::to_string(i + 1));
        }
    }
    pt.total_value = kernels::parallel::sum(pt.values);
    pt.total_shares = kernels::parallel::sum(pt.volumes);
    pt.mean_price = pt.total_value / pt.total_shares;
    return pt;
}

}  // namespace mbv
