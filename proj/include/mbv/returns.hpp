#pragma once

#include <span>
#include <string>
#include <vector>

#include "mbv/portfolio.hpp"
#include "mbv/return_series.hpp"

namespace mbv {

/// x_j(t_i) = u_j(t_i) / W(t_i). Row j follows `security_ids[j]`.
struct RelativeVolumeSeries {
    std::vector<std::string> security_ids;
    std::vector<std::vector<double>> shares;  // [j][i]
    std::vector<double> portfolio_volumes;    // W(t_i), the row denominators

    std::size_t securities() const noexcept { return shares.size(); }
    std::size_t instants() const noexcept { return portfolio_volumes.size(); }
};

/// R(t_i, t0) = s(t_i)/s(t0), mean s(t)/s(t0), weighted by W(t_i).
ReturnSeries portfolio_returns(const PortfolioSpec& spec, const PortfolioTape& ptape);

/// Security returns for every holding, ordered like spec.holdings().
/// Each tape's reference price is taken from its holding.
std::vector<ReturnSeries> holding_returns(const PortfolioSpec& spec,
                                          std::span<const SecurityTape> tapes);

/// sum_j R_j(t, t0) X_j(t0). Throws MissingSecurity / UnknownSecurity.
double mean_return_decomposition(const PortfolioSpec& spec,
                                 std::span<const ReturnSeries> security_returns);

/// Throws ZeroPortfolioVolumeAtInstant, WindowMismatch.
RelativeVolumeSeries relative_volumes(const PortfolioTape& ptape,
                                      std::span<const NormalizedTape> normalized);

/// The volume-aware decomposition
///   R(t_i, t0) = sum_j R_j(t_i, t0) * (x_j(t_i) / x_j(t0)) * X_j(t0),
/// weighted by W(t_i). Reproduces portfolio_returns() elementwise.
ReturnSeries random_return_decomposition(const PortfolioSpec& spec,
                                         std::span<const ReturnSeries> security_returns,
                                         const RelativeVolumeSeries& relvols);

/// Constant-volume form R_M(t_i) = sum_j R_j(t_i, t0) X_j(t0). The series is
/// equal-weighted (weights all 1) and its mean is the equal-weight mean.
ReturnSeries markowitz_random_returns(const PortfolioSpec& spec,
                                      std::span<const ReturnSeries> security_returns);

}  // namespace mbv
