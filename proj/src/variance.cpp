#include "mbv/variance.hpp"

#include <cmath>

#include "mbv/error.hpp"
#include "mbv/kernels.hpp"
#include "mbv/returns.hpp"

namespace mbv {

namespace {

double clamp_variance(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v >= -kNegativeSlack) return 0.0;
    throw Error(ErrorCode::NegativeVariance, std::string(what) + " = " + std::to_string(v));
}

void check_series(std::span<const ReturnSeries> series) {
    if (series.empty()) throw Error(ErrorCode::DimensionMismatch, "no return series");
    const std::size_t n = series.front().size();
    if (n < 2) throw Error(ErrorCode::DegenerateWindow, "need at least two trades");
    for (const auto& r : series) {
        if (r.size() != n) throw Error(ErrorCode::LengthMismatch, r.security_id);
    }
}

}  // namespace

double TradeMoments::psi() const noexcept { return std::sqrt(psi_sq); }
double TradeMoments::chi() const noexcept { return std::sqrt(chi_sq); }

std::vector<std::vector<double>> CovarianceMatrix::rows() const {
    std::vector<std::vector<double>> out(dim_, std::vector<double>(dim_));
    for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k) out[j][k] = (*this)(j, k);
    return out;
}

const char* to_string(CovarianceWeighting w) noexcept {
    return w == CovarianceWeighting::Equal ? "equal" : "volume";
}

TradeMoments trade_moments(const PortfolioTape& ptape) {
    if (ptape.size() < 2) throw Error(ErrorCode::DegenerateWindow, "need at least two trades");
    const auto pm = kernels::parallel::pair_moments(ptape.values, ptape.volumes);
    TradeMoments m;
    m.trade_count = pm.n;
    m.value_mean = pm.mean_a;
    m.value_mean_sq = pm.mean_sq_a;
    m.volume_mean = pm.mean_b;
    m.volume_mean_sq = pm.mean_sq_b;
    m.value_var = pm.var_a;
    m.volume_var = pm.var_b;
    m.value_volume_cov = pm.cov_ab;
    m.psi_sq = m.value_var / (m.value_mean * m.value_mean);
    m.chi_sq = m.volume_var / (m.volume_mean * m.volume_mean);
    m.phi = m.value_volume_cov / (m.value_mean * m.volume_mean);
    return m;
}

CovarianceMatrix markowitz_covariance(std::span<const ReturnSeries> security_returns) {
    check_series(security_returns);
    const std::size_t dim = security_returns.size();
    const double n = static_cast<double>(security_returns.front().size());
    std::vector<double> means(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        means[j] = kernels::parallel::sum(security_returns[j].random) / n;
    }
    CovarianceMatrix theta(dim);
    const auto count = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t jj = 0; jj < count; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        for (std::size_t k = j; k < dim; ++k) {
            theta.set(j, k,
                      kernels::serial::centered_cross(security_returns[j].random, means[j],
                                                      security_returns[k].random, means[k]) /
                          n);
        }
    }
    return theta;
}

CovarianceMatrix markowitz_covariance(std::span<const ReturnSeries> security_returns,
                                      std::span<const double> instant_weights) {
    check_series(security_returns);
    const std::size_t dim = security_returns.size();
    const std::size_t n = security_returns.front().size();
    if (instant_weights.size() != n) throw Error(ErrorCode::LengthMismatch, "instant weights");
    const double total = kernels::parallel::sum(instant_weights);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "instant weights sum to zero");

    std::vector<double> means(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        means[j] = kernels::parallel::dot(security_returns[j].random, instant_weights) / total;
    }
    CovarianceMatrix theta(dim);
    const auto count = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t jj = 0; jj < count; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const auto& rj = security_returns[j].random;
        for (std::size_t k = j; k < dim; ++k) {
            const auto& rk = security_returns[k].random;
            kernels::CompensatedSum acc;
            for (std::size_t i = 0; i < n; ++i) {
                acc.add(instant_weights[i] * (rj[i] - means[j]) * (rk[i] - means[k]));
            }
            theta.set(j, k, acc.value() / total);
        }
    }
    return theta;
}

double markowitz_variance(const PortfolioSpec& spec, const CovarianceMatrix& theta) {
    if (theta.dim() != spec.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(theta.dim()) + " vs " + std::to_string(spec.size()));
    }
    const auto X = spec.value_weights();
    kernels::CompensatedSum acc;
    for (std::size_t j = 0; j < theta.dim(); ++j) {
        for (std::size_t k = 0; k < theta.dim(); ++k) acc.add(theta(j, k) * X[j] * X[k]);
    }
    return clamp_variance(acc.value(), "markowitz variance");
}

double market_based_variance(const TradeMoments& moments, double mean_return) {
    const double numerator = moments.psi_sq - 2.0 * moments.phi + moments.chi_sq;
    const double theta = numerator / (1.0 + moments.chi_sq) * mean_return * mean_return;
    return clamp_variance(theta, "market-based variance");
}

double taylor_variance(double theta_m, double mean_return, double chi, double a) {
    return theta_m - 2.0 * a * std::sqrt(theta_m) * mean_return * chi +
           (mean_return * mean_return - theta_m) * chi * chi;
}

std::optional<double> relative_divergence(double theta_m, double theta) {
    if (theta > 0.0) return (theta_m - theta) / theta;
    if (theta_m == 0.0) return 0.0;
    return std::nullopt;
}

VarianceReport full_report(const PortfolioSpec& spec, const PortfolioTape& ptape,
                           std::span<const ReturnSeries> security_returns,
                           std::optional<double> taylor_a, CovarianceWeighting weighting) {
    if (security_returns.size() != spec.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one return series per holding required");
    }
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (security_returns[j].security_id != spec.holdings()[j].security_id) {
            throw Error(ErrorCode::SecurityMismatch, security_returns[j].security_id);
        }
        if (security_returns[j].size() != ptape.size()) {
            throw Error(ErrorCode::LengthMismatch, security_returns[j].security_id);
        }
    }

    VarianceReport report;
    for (const auto& h : spec.holdings()) report.security_ids.push_back(h.security_id);
    report.trade_count = ptape.size();
    report.weighting = weighting;
    report.moments = trade_moments(ptape);
    report.mean_return = portfolio_returns(spec, ptape).mean;
    report.theta_jk = weighting == CovarianceWeighting::Equal
                          ? markowitz_covariance(security_returns)
                          : markowitz_covariance(security_returns, ptape.volumes);
    report.theta_m = markowitz_variance(spec, report.theta_jk);
    report.theta = market_based_variance(report.moments, report.mean_return);
    if (taylor_a) {
        report.taylor_a = taylor_a;
        report.theta_t =
            taylor_variance(report.theta_m, report.mean_return, report.moments.chi(), *taylor_a);
    }
    report.divergence = relative_divergence(report.theta_m, report.theta);
    return report;
}

}  // namespace mbv
