#pragma once

// Reduction kernels shared by every module.
//
// All sums use Neumaier's compensated summation. The parallel variants split
// the input into a fixed number of chunks that does not depend on the thread
// count, reduce each chunk with the serial kernel, then fold the chunk
// partials serially in chunk order. Results are therefore bit-identical for
// any OMP_NUM_THREADS, and bit-identical to the serial reference whenever the
// input fits in a single chunk.

#include <cstddef>
#include <span>

namespace mbv::kernels {

/// Running Neumaier accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept;
    void merge(const CompensatedSum& other) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Population moments of a paired sample (a_i, b_i), i = 1..n.
/// Variances and covariance are centered two-pass values with divisor n.
struct PairMoments {
    std::size_t n = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double mean_sq_a = 0.0;  // (1/n) sum a_i^2
    double mean_sq_b = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    double cov_ab = 0.0;
};

/// Inputs shorter than this are reduced as one chunk.
inline constexpr std::size_t kChunkSize = 1 << 14;

namespace serial {

double sum(std::span<const double> xs) noexcept;
double dot(std::span<const double> xs, std::span<const double> ys) noexcept;
double sum_sq(std::span<const double> xs) noexcept;
/// sum_i (x_i - cx) * (y_i - cy)
double centered_cross(std::span<const double> xs, double cx, std::span<const double> ys,
                      double cy) noexcept;
PairMoments pair_moments(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace serial

namespace parallel {

double sum(std::span<const double> xs) noexcept;
double dot(std::span<const double> xs, std::span<const double> ys) noexcept;
double sum_sq(std::span<const double> xs) noexcept;
double centered_cross(std::span<const double> xs, double cx, std::span<const double> ys,
                      double cy) noexcept;
PairMoments pair_moments(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace parallel

/// |a - b| <= rel * max(|a|, |b|, floor)
bool close_rel(double a, double b, double rel, double floor = 0.0) noexcept;

}  // namespace mbv::kernels
