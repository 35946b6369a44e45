#include "mbv/returns.hpp"

#include "mbv/error.hpp"
#include "mbv/kernels.hpp"

namespace mbv {

namespace {

// Security series reordered to match spec.holdings(), all of length n.
std::vector<const ReturnSeries*> align(const PortfolioSpec& spec,
                                       std::span<const ReturnSeries> series) {
    std::vector<const ReturnSeries*> out(spec.size(), nullptr);
    for (const auto& r : series) {
        const auto j = spec.index_of(r.security_id);
        if (!j) throw Error(ErrorCode::UnknownSecurity, r.security_id);
        if (out[*j]) throw Error(ErrorCode::DuplicateSecurity, r.security_id);
        out[*j] = &r;
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (!out[j]) throw Error(ErrorCode::MissingSecurity, spec.holdings()[j].security_id);
    }
    const std::size_t n = out.front()->size();
    for (const auto* r : out) {
        if (r->size() != n) throw Error(ErrorCode::LengthMismatch, r->security_id);
    }
    return out;
}

}  // namespace

ReturnSeries portfolio_returns(const PortfolioSpec& spec, const PortfolioTape& ptape) {
    const double s0 = spec.share_price();
    ReturnSeries r;
    r.base_price = s0;
    r.mean = ptape.mean_price / s0;
    r.weights = ptape.volumes;
    r.random.reserve(ptape.size());
    for (const double s : ptape.prices) r.random.push_back(s / s0);
    return r;
}

std::vector<ReturnSeries> holding_returns(const PortfolioSpec& spec,
                                          std::span<const SecurityTape> tapes) {
    std::vector<ReturnSeries> out(spec.size());
    std::vector<bool> filled(spec.size(), false);
    for (const auto& tape : tapes) {
        const auto j = spec.index_of(tape.security_id());
        if (!j) throw Error(ErrorCode::UnknownSecurity, tape.security_id());
        out[*j] = security_returns(tape.with_base_price(spec.holdings()[*j].base_price));
        filled[*j] = true;
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (!filled[j]) throw Error(ErrorCode::MissingSecurity, spec.holdings()[j].security_id);
    }
    return out;
}

double mean_return_decomposition(const PortfolioSpec& spec,
                                 std::span<const ReturnSeries> security_returns) {
    const auto aligned = align(spec, security_returns);
    kernels::CompensatedSum acc;
    for (std::size_t j = 0; j < aligned.size(); ++j) {
        acc.add(aligned[j]->mean * spec.value_weights()[j]);
    }
    return acc.value();
}

RelativeVolumeSeries relative_volumes(const PortfolioTape& ptape,
                                      std::span<const NormalizedTape> normalized) {
    const std::size_t n = ptape.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(ptape.volumes[i] > 0.0)) {
            throw Error(ErrorCode::ZeroPortfolioVolumeAtInstant, "i=" + std::to_string(i + 1));
        }
    }
    RelativeVolumeSeries rv;
    rv.portfolio_volumes = ptape.volumes;
    for (const auto& nt : normalized) {
        if (nt.volumes.size() != n || nt.window != ptape.window) {
            throw Error(ErrorCode::WindowMismatch, nt.security_id);
        }
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = nt.volumes[i] / ptape.volumes[i];
        rv.security_ids.push_back(nt.security_id);
        rv.shares.push_back(std::move(row));
    }
    return rv;
}

ReturnSeries random_return_decomposition(const PortfolioSpec& spec,
                                         std::span<const ReturnSeries> security_returns,
                                         const RelativeVolumeSeries& relvols) {
    const auto aligned = align(spec, security_returns);
    const std::size_t n = aligned.front()->size();
    if (relvols.instants() != n) throw Error(ErrorCode::LengthMismatch, "relative volumes");

    std::vector<const std::vector<double>*> rows(spec.size(), nullptr);
    for (std::size_t k = 0; k < relvols.securities(); ++k) {
        const auto j = spec.index_of(relvols.security_ids[k]);
        if (!j) throw Error(ErrorCode::UnknownSecurity, relvols.security_ids[k]);
        if (relvols.shares[k].size() != n) {
            throw Error(ErrorCode::LengthMismatch, relvols.security_ids[k]);
        }
        rows[*j] = &relvols.shares[k];
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (!rows[j]) throw Error(ErrorCode::MissingSecurity, spec.holdings()[j].security_id);
    }

    // x_j(t0) > 0 because every holding has positive shares.
    const auto X = spec.value_weights();
    const auto x0 = spec.share_weights();
    ReturnSeries r;
    r.base_price = spec.share_price();
    r.weights = relvols.portfolio_volumes;
    r.random.assign(n, 0.0);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        kernels::CompensatedSum acc;
        for (std::size_t j = 0; j < aligned.size(); ++j) {
            acc.add(aligned[j]->random[i] * ((*rows[j])[i] / x0[j]) * X[j]);
        }
        r.random[i] = acc.value();
    }
    r.mean = r.weighted_mean();
    return r;
}

ReturnSeries markowitz_random_returns(const PortfolioSpec& spec,
                                      std::span<const ReturnSeries> security_returns) {
    const auto aligned = align(spec, security_returns);
    const std::size_t n = aligned.front()->size();
    const auto X = spec.value_weights();
    ReturnSeries r;
    r.base_price = spec.share_price();
    r.weights.assign(n, 1.0);
    r.random.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        kernels::CompensatedSum acc;
        for (std::size_t j = 0; j < aligned.size(); ++j) acc.add(aligned[j]->random[i] * X[j]);
        r.random[i] = acc.value();
    }
    r.mean = kernels::parallel::sum(r.random) / static_cast<double>(n);
    return r;
}

}  // namespace mbv
