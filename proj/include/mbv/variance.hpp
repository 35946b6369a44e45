#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbv/portfolio.hpp"
#include "mbv/return_series.hpp"

namespace mbv {

/// Population (divisor N) statistics of the portfolio trade values Q(t_i)
/// and volumes W(t_i).
struct TradeMoments {
    std::size_t trade_count = 0;
    double value_mean = 0.0;     // Q(t;1)
    double value_mean_sq = 0.0;  // Q(t;2)
    double volume_mean = 0.0;    // W(t;1)
    double volume_mean_sq = 0.0; // W(t;2)
    double value_var = 0.0;      // Psi_Q
    double volume_var = 0.0;     // Psi_W
    double value_volume_cov = 0.0;
    double psi_sq = 0.0;  // value coefficient of variation, squared
    double chi_sq = 0.0;  // volume coefficient of variation, squared
    double phi = 0.0;     // cov(Q, W) / (Q(t;1) W(t;1))

    double psi() const noexcept;
    double chi() const noexcept;
};

/// Dense symmetric J x J matrix, row-major.
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;
    explicit CovarianceMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t j, std::size_t k) const { return data_[j * dim_ + k]; }
    void set(std::size_t j, std::size_t k, double v) {
        data_[j * dim_ + k] = v;
        data_[k * dim_ + j] = v;
    }
    std::vector<std::vector<double>> rows() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// How the expectation over trade instants is weighted in the covariance.
enum class CovarianceWeighting {
    Equal,   // 1/N per instant (default)
    Volume,  // proportional to the portfolio trade volume W(t_i)
};

const char* to_string(CovarianceWeighting w) noexcept;

/// Variances in [-kNegativeSlack, 0) are clamped to 0; anything lower throws
/// NegativeVariance.
inline constexpr double kNegativeSlack = 1e-12;

struct VarianceReport {
    std::vector<std::string> security_ids;
    std::size_t trade_count = 0;
    double theta_m = 0.0;  // Markowitz variance
    double theta = 0.0;    // market-based variance
    std::optional<double> theta_t;  // Taylor approximation, when a is given
    std::optional<double> taylor_a;
    double mean_return = 0.0;  // R(t, t0)
    TradeMoments moments;
    CovarianceMatrix theta_jk;
    CovarianceWeighting weighting = CovarianceWeighting::Equal;
    /// (theta_m - theta) / theta. Zero when both vanish; absent when only
    /// theta vanishes.
    std::optional<double> divergence;
};

/// Throws DegenerateWindow for N < 2.
TradeMoments trade_moments(const PortfolioTape& ptape);

/// Equal-weight covariance of the security random returns.
/// Throws DegenerateWindow, LengthMismatch.
CovarianceMatrix markowitz_covariance(std::span<const ReturnSeries> security_returns);
/// Covariance with instant weights (normalized internally).
CovarianceMatrix markowitz_covariance(std::span<const ReturnSeries> security_returns,
                                      std::span<const double> instant_weights);

/// sum_jk theta_jk X_j X_k. Throws DimensionMismatch.
double markowitz_variance(const PortfolioSpec& spec, const CovarianceMatrix& theta);

/// [psi^2 - 2 phi + chi^2] / [1 + chi^2] * R^2
double market_based_variance(const TradeMoments& moments, double mean_return);

/// Second-order expansion around chi = 0 with the Markowitz variance as base.
double taylor_variance(double theta_m, double mean_return, double chi, double a);

/// (theta_m - theta) / theta with the conventions documented on VarianceReport.
std::optional<double> relative_divergence(double theta_m, double theta);

/// `security_returns` must be ordered like spec.holdings().
VarianceReport full_report(const PortfolioSpec& spec, const PortfolioTape& ptape,
                           std::span<const ReturnSeries> security_returns,
                           std::optional<double> taylor_a = std::nullopt,
                           CovarianceWeighting weighting = CovarianceWeighting::Equal);

}  // namespace mbv
