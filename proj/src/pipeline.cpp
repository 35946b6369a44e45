#include "mbv/pipeline.hpp"

#include "mbv/error.hpp"

namespace mbv {

Analysis analyze_portfolio(const PortfolioSpec& spec, std::span<const SecurityTape> tapes,
                           std::optional<double> taylor_a, CovarianceWeighting weighting) {
    std::vector<SecurityTape> rebased;
    rebased.reserve(tapes.size());
    for (const auto& tape : tapes) {
        const auto j = spec.index_of(tape.security_id());
        if (!j) throw Error(ErrorCode::UnknownSecurity, tape.security_id());
        rebased.push_back(tape.with_base_price(spec.holdings()[*j].base_price));
        require_valid(rebased.back());
    }
    Analysis a;
    a.normalized = normalize_all(spec, rebased);
    a.ptape = build_portfolio_tape(spec, a.normalized);
    a.security_returns = holding_returns(spec, rebased);
    a.portfolio = portfolio_returns(spec, a.ptape);
    a.report = full_report(spec, a.ptape, a.security_returns, taylor_a, weighting);
    return a;
}

}  // namespace mbv
