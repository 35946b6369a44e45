#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mbv/portfolio.hpp"
#include "mbv/returns.hpp"
#include "mbv/variance.hpp"

namespace mbv {

/// Every intermediate product of one analysis run.
struct Analysis {
    std::vector<NormalizedTape> normalized;
    PortfolioTape ptape;
    std::vector<ReturnSeries> security_returns;  // ordered like spec.holdings()
    ReturnSeries portfolio;
    VarianceReport report;
};

/// Tapes are matched to holdings by id; each tape's reference price is
/// taken from its holding. Every tape is validated first (InvalidTape).
Analysis analyze_portfolio(const PortfolioSpec& spec, std::span<const SecurityTape> tapes,
                           std::optional<double> taylor_a = std::nullopt,
                           CovarianceWeighting weighting = CovarianceWeighting::Equal);

}  // namespace mbv
