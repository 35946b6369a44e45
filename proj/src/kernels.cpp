#include "mbv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

namespace mbv::kernels {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
}

bool close_rel(double a, double b, double rel, double floor) noexcept {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) <= rel * scale;
}

namespace {

template <class Term>
CompensatedSum reduce_range(std::size_t begin, std::size_t end, Term term) noexcept {
    CompensatedSum acc;
    for (std::size_t i = begin; i < end; ++i) acc.add(term(i));
    return acc;
}

template <class Term>
double reduce_chunked(std::size_t n, Term term) noexcept {
    if (n <= kChunkSize) return reduce_range(0, n, term).value();

    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<CompensatedSum> partial(chunks);
    const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        const auto begin = static_cast<std::size_t>(c) * kChunkSize;
        partial[static_cast<std::size_t>(c)] =
            reduce_range(begin, std::min(n, begin + kChunkSize), term);
    }
    CompensatedSum total;
    for (const auto& p : partial) total.merge(p);
    return total.value();
}

template <class SumFn, class CrossFn>
PairMoments pair_moments_with(std::span<const double> a, std::span<const double> b, SumFn sum,
                              CrossFn cross) noexcept {
    PairMoments m;
    m.n = std::min(a.size(), b.size());
    if (m.n == 0) return m;
    a = a.first(m.n);
    b = b.first(m.n);
    const double inv_n = 1.0 / static_cast<double>(m.n);
    m.mean_a = sum(a) * inv_n;
    m.mean_b = sum(b) * inv_n;
    m.mean_sq_a = cross(a, 0.0, a, 0.0) * inv_n;
    m.mean_sq_b = cross(b, 0.0, b, 0.0) * inv_n;
    m.var_a = cross(a, m.mean_a, a, m.mean_a) * inv_n;
    m.var_b = cross(b, m.mean_b, b, m.mean_b) * inv_n;
    m.cov_ab = cross(a, m.mean_a, b, m.mean_b) * inv_n;
    return m;
}

}  // namespace

namespace serial {

double sum(std::span<const double> xs) noexcept {
    return reduce_range(0, xs.size(), [&](std::size_t i) { return xs[i]; }).value();
}

double dot(std::span<const double> xs, std::span<const double> ys) noexcept {
    const std::size_t n = std::min(xs.size(), ys.size());
    return reduce_range(0, n, [&](std::size_t i) { return xs[i] * ys[i]; }).value();
}

double sum_sq(std::span<const double> xs) noexcept { return dot(xs, xs); }

double centered_cross(std::span<const double> xs, double cx, std::span<const double> ys,
                      double cy) noexcept {
    const std::size_t n = std::min(xs.size(), ys.size());
    return reduce_range(0, n, [&](std::size_t i) { return (xs[i] - cx) * (ys[i] - cy); })
        .value();
}

PairMoments pair_moments(std::span<const double> a, std::span<const double> b) noexcept {
    return pair_moments_with(a, b, serial::sum, serial::centered_cross);
}

}  // namespace serial

namespace parallel {

double sum(std::span<const double> xs) noexcept {
    return reduce_chunked(xs.size(), [&](std::size_t i) { return xs[i]; });
}

double dot(std::span<const double> xs, std::span<const double> ys) noexcept {
    const std::size_t n = std::min(xs.size(), ys.size());
    return reduce_chunked(n, [&](std::size_t i) { return xs[i] * ys[i]; });
}

double sum_sq(std::span<const double> xs) noexcept { return dot(xs, xs); }

double centered_cross(std::span<const double> xs, double cx, std::span<const double> ys,
                      double cy) noexcept {
    const std::size_t n = std::min(xs.size(), ys.size());
    return reduce_chunked(n, [&](std::size_t i) { return (xs[i] - cx) * (ys[i] - cy); });
}

PairMoments pair_moments(std::span<const double> a, std::span<const double> b) noexcept {
    return pair_moments_with(a, b, parallel::sum, parallel::centered_cross);
}

}  // namespace parallel

}  // namespace mbv::kernels
