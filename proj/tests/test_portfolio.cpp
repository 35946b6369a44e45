#include <gtest/gtest.h>

#include <algorithm>

#include "mbv/error.hpp"
#include "mbv/portfolio.hpp"
#include "oracle.hpp"

using namespace mbv;

namespace {

PortfolioSpec worked_spec() {
    const std::vector<HoldingInput> h{{"A", 10, 1}, {"B", 10, 3}};
    return PortfolioSpec::build(h);
}

std::vector<SecurityTape> worked_tapes() {
    const auto w = AveragingWindow::unit(2);
    return {SecurityTape("A", w, {{1, 1, 4, 4}, {2, 1, 6, 6}}, 1.0),
            SecurityTape("B", w, {{1, 3, 2, 6}, {2, 3, 8, 24}}, 3.0)};
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no mbv::Error thrown";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(PortfolioSpec, WorkedExample) {
    const auto spec = worked_spec();
    EXPECT_EQ(spec.total_value(), 40.0);
    EXPECT_EQ(spec.total_shares(), 20.0);
    EXPECT_EQ(spec.share_price(), 2.0);
    EXPECT_EQ(std::vector<double>(spec.value_weights().begin(), spec.value_weights().end()),
              (std::vector<double>{0.25, 0.75}));
    EXPECT_EQ(std::vector<double>(spec.share_weights().begin(), spec.share_weights().end()),
              (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(spec.holdings()[1].base_value, 30.0);
    EXPECT_EQ(spec.index_of("B"), 1u);
    EXPECT_FALSE(spec.index_of("C").has_value());
}

TEST(PortfolioSpec, SingleHolding) {
    const std::vector<HoldingInput> h{{"A", 17, 4.5}};
    const auto spec = PortfolioSpec::build(h);
    EXPECT_EQ(spec.value_weights()[0], 1.0);
    EXPECT_EQ(spec.share_weights()[0], 1.0);
    EXPECT_EQ(spec.share_price(), 4.5);
}

TEST(PortfolioSpec, Rejections) {
    EXPECT_EQ(code_of([] {
                  const std::vector<HoldingInput> h{{"A", 10, 1}, {"A", 5, 1}};
                  PortfolioSpec::build(h);
              }),
              ErrorCode::DuplicateSecurity);
    EXPECT_EQ(code_of([] {
                  const std::vector<HoldingInput> h{{"A", 0, 1}};
                  PortfolioSpec::build(h);
              }),
              ErrorCode::NonpositiveShares);
    EXPECT_EQ(code_of([] {
                  const std::vector<HoldingInput> h{{"A", 1, -2}};
                  PortfolioSpec::build(h);
              }),
              ErrorCode::NonpositivePrice);
    EXPECT_EQ(code_of([] { PortfolioSpec::build({}); }), ErrorCode::InvalidArgument);
}

TEST(Lambda, Examples) {
    const auto w = AveragingWindow::unit(2);
    const SecurityTape ten("A", w, {{1, 1, 4, 4}, {2, 1, 6, 6}}, 1.0);
    const SecurityTape forty("A", w, {{1, 1, 15, 15}, {2, 1, 25, 25}}, 1.0);
    const SecurityTape none("A", w, {{1, 1, 0, 0}, {2, 1, 0, 0}}, 1.0);
    const Holding h{"A", 10, 1, 10};
    EXPECT_EQ(lambda_factor(h, ten), 1.0);
    EXPECT_EQ(lambda_factor(h, forty), 0.25);
    EXPECT_EQ(code_of([&] { lambda_factor(h, none); }), ErrorCode::ZeroTotalVolume);
    EXPECT_EQ(code_of([&] { lambda_factor(Holding{"B", 10, 1, 10}, ten); }), ErrorCode::SecurityMismatch);
}

TEST(NormalizeTape, Examples) {
    const auto w = AveragingWindow::unit(2);
    const SecurityTape t("A", w, {{1, 10, 4, 40}, {2, 12, 6, 72}}, 10.0);
    const auto same = normalize_tape(Holding{"A", 10, 10, 100}, t);
    EXPECT_EQ(same.lambda, 1.0);
    EXPECT_EQ(same.volumes, (std::vector<double>{4, 6}));

    const auto half = normalize_tape(Holding{"A", 5, 10, 50}, t);
    EXPECT_EQ(half.lambda, 0.5);
    EXPECT_EQ(half.volumes, (std::vector<double>{2, 3}));
    EXPECT_EQ(half.values, (std::vector<double>{20, 36}));
    EXPECT_EQ(half.prices, (std::vector<double>{10, 12}));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(half.values[i] / half.volumes[i], half.prices[i]);
}

TEST(PortfolioTape, WorkedExample) {
    const auto spec = worked_spec();
    const auto tapes = worked_tapes();
    const auto p = build_portfolio_tape(spec, normalize_all(spec, tapes));
    EXPECT_EQ(p.values, (std::vector<double>{10, 30}));
    EXPECT_EQ(p.volumes, (std::vector<double>{6, 14}));
    EXPECT_DOUBLE_EQ(p.prices[0], 10.0 / 6.0);
    EXPECT_DOUBLE_EQ(p.prices[1], 30.0 / 14.0);
    EXPECT_EQ(p.total_shares, 20.0);
    EXPECT_EQ(p.total_value, 40.0);
    EXPECT_EQ(p.mean_price, 2.0);
}

TEST(PortfolioTape, SingleSecurityReproducesTape) {
    const std::vector<HoldingInput> h{{"A", 10, 10}};
    const auto spec = PortfolioSpec::build(h);
    const std::vector<SecurityTape> t{
        SecurityTape("A", AveragingWindow::unit(3), {{1, 10, 3, 30}, {2, 11, 5, 55}, {3, 9, 2, 18}}, 10.0)};
    const auto p = build_portfolio_tape(spec, normalize_all(spec, t));
    EXPECT_EQ(p.values, t[0].values());
    EXPECT_EQ(p.volumes, t[0].volumes());
    EXPECT_EQ(p.prices, t[0].prices());
}

TEST(PortfolioTape, Errors) {
    const auto spec = worked_spec();
    auto tapes = worked_tapes();
    const auto norm = normalize_all(spec, tapes);

    auto wrong_n = norm;
    wrong_n[1].window = AveragingWindow::unit(3);
    EXPECT_EQ(code_of([&] { build_portfolio_tape(spec, wrong_n); }), ErrorCode::WindowMismatch);

    const std::vector<NormalizedTape> only_a{norm[0]};
    EXPECT_EQ(code_of([&] { build_portfolio_tape(spec, only_a); }), ErrorCode::MissingSecurity);

    const std::vector<SecurityTape> missing{tapes[0]};
    EXPECT_EQ(code_of([&] { normalize_all(spec, missing); }), ErrorCode::MissingSecurity);

    auto extra = tapes;
    extra.emplace_back("C", AveragingWindow::unit(2), std::vector<Trade>{{1, 1, 1, 1}, {2, 1, 1, 1}}, 1.0);
    EXPECT_EQ(code_of([&] { normalize_all(spec, extra); }), ErrorCode::UnknownSecurity);

    const auto w = AveragingWindow::unit(2);
    const std::vector<SecurityTape> gap{SecurityTape("A", w, {{1, 1, 0, 0}, {2, 1, 6, 6}}, 1.0),
                                        SecurityTape("B", w, {{1, 3, 0, 0}, {2, 3, 8, 24}}, 3.0)};
    try {
        build_portfolio_tape(spec, normalize_all(spec, gap));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroPortfolioVolumeAtInstant);
        EXPECT_EQ(e.detail(), "i=1");
    }
}

TEST(PortfolioProperties, ConservationDecompositionAgainstOracle) {
    oracle::Gen g(101);
    for (int rep = 0; rep < 300; ++rep) {
        const auto c = oracle::random_case(g);
        const auto spec = PortfolioSpec::build(c.holdings());
        const auto tapes = c.tapes();
        const auto norm = normalize_all(spec, tapes);
        const auto p = build_portfolio_tape(spec, norm);
        const auto e = oracle::expected(c);

        for (const auto& n : norm) {
            long double s = 0;
            for (double u : n.volumes) s += u;
            EXPECT_TRUE(oracle::close(s, spec.holdings()[*spec.index_of(n.security_id)].shares, 1e-12));
        }
        long double wsum = 0;
        for (double w : p.volumes) wsum += w;
        EXPECT_TRUE(oracle::close(wsum, e.W_total, 1e-12));
        EXPECT_TRUE(oracle::close(p.total_shares, e.W_total, 1e-12));
        for (std::size_t i = 0; i < c.trades(); ++i) {
            ASSERT_TRUE(oracle::close(p.volumes[i], e.W[i], 1e-12));
            ASSERT_TRUE(oracle::close(p.values[i], e.Q[i], 1e-12));
            ASSERT_TRUE(oracle::close(p.prices[i], e.s[i], 1e-12));
        }
        // s(t) = sum_j vwap_j x_j(t0)
        long double st = 0;
        for (std::size_t j = 0; j < spec.size(); ++j) {
            st += static_cast<long double>(vwap(tapes[j])) * c.shares[j] / e.W_total;
        }
        EXPECT_TRUE(oracle::close(p.mean_price, st, 1e-12));
    }
}

TEST(PortfolioProperties, PermutationInvariance) {
    oracle::Gen g(102);
    for (int rep = 0; rep < 100; ++rep) {
        const auto c = oracle::random_case(g, 8, 64);
        auto h = c.holdings();
        auto t = c.tapes();
        const auto spec = PortfolioSpec::build(h);
        const auto p = build_portfolio_tape(spec, normalize_all(spec, t));

        std::reverse(h.begin(), h.end());
        std::rotate(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
        const auto spec2 = PortfolioSpec::build(h);
        const auto p2 = build_portfolio_tape(spec2, normalize_all(spec2, t));
        EXPECT_EQ(p.values, p2.values);
        EXPECT_EQ(p.volumes, p2.volumes);
        EXPECT_EQ(p.prices, p2.prices);
        EXPECT_EQ(p.total_value, p2.total_value);
        EXPECT_EQ(p.mean_price, p2.mean_price);
    }
}
