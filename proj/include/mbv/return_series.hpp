#pragma once

#include <span>
#include <string>
#include <vector>

namespace mbv {

/// Gross returns over the window: the per-trade random returns R(t_i, t0)
/// and their mean R(t, t0). `weights` is the series the mean is weighted by
/// (trade volumes for market returns, all ones for an equal-weight series).
struct ReturnSeries {
    std::string security_id;  // empty for the portfolio
    double base_price = 0.0;
    std::vector<double> random;
    double mean = 0.0;
    std::vector<double> weights;

    std::size_t size() const noexcept { return random.size(); }
    /// Net return view: gross - 1.
    double net(std::size_t i) const { return random.at(i) - 1.0; }
    double net_mean() const noexcept { return mean - 1.0; }
    /// sum_i w_i R_i / sum_i w_i, compensated.
    double weighted_mean() const;
};

}  // namespace mbv
