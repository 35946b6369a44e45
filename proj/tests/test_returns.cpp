#include <gtest/gtest.h>

#include "mbv/error.hpp"
#include "mbv/returns.hpp"
#include "oracle.hpp"

using namespace mbv;

namespace {

struct Built {
    PortfolioSpec spec;
    std::vector<SecurityTape> tapes;
    std::vector<NormalizedTape> norm;
    PortfolioTape ptape;
    std::vector<ReturnSeries> sec;
};

Built build(const std::vector<HoldingInput>& h, std::vector<SecurityTape> tapes) {
    Built b{PortfolioSpec::build(h), std::move(tapes), {}, {}, {}};
    b.norm = normalize_all(b.spec, b.tapes);
    b.ptape = build_portfolio_tape(b.spec, b.norm);
    b.sec = holding_returns(b.spec, b.tapes);
    return b;
}

Built worked(double a2 = 1.0) {
    const auto w = AveragingWindow::unit(2);
    return build({{"A", 10, 1}, {"B", 10, 3}},
                 {SecurityTape("A", w, {{1, 1, 4, 4}, {2, a2, 6, 6 * a2}}, 1.0),
                  SecurityTape("B", w, {{1, 3, 2, 6}, {2, 3, 8, 24}}, 3.0)});
}

Built from_case(const oracle::Case& c) { return build(c.holdings(), c.tapes()); }

}  // namespace

TEST(PortfolioReturns, WorkedExample) {
    const auto b = worked();
    const auto r = portfolio_returns(b.spec, b.ptape);
    // s(t0) = 2, s = {10/6, 30/14}
    EXPECT_NEAR(r.random[0], 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(r.random[1], 15.0 / 14.0, 1e-15);
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.weights, (std::vector<double>{6, 14}));
}

TEST(MeanReturnDecomposition, ConstantPrices) {
    const auto b = worked();
    EXPECT_EQ(mean_return_decomposition(b.spec, b.sec), 1.0);
}

TEST(RelativeVolumes, WorkedExample) {
    const auto b = worked();
    const auto x = relative_volumes(b.ptape, b.norm);
    EXPECT_DOUBLE_EQ(x.shares[0][0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(x.shares[0][1], 3.0 / 7.0);
    EXPECT_DOUBLE_EQ(x.shares[1][0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(x.shares[1][1], 4.0 / 7.0);
    EXPECT_EQ(x.portfolio_volumes, (std::vector<double>{6, 14}));
}

TEST(RandomReturnDecomposition, WorkedExampleDiffersFromMarkowitz) {
    const auto b = worked();
    const auto x = relative_volumes(b.ptape, b.norm);
    const auto r = random_return_decomposition(b.spec, b.sec, x);
    EXPECT_NEAR(r.random[0], 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(r.random[1], 15.0 / 14.0, 1e-15);
    const auto m = markowitz_random_returns(b.spec, b.sec);
    EXPECT_EQ(m.random, (std::vector<double>{1.0, 1.0}));
    EXPECT_NE(r.random[0], m.random[0]);
}

TEST(MarkowitzRandomReturns, EqualWeightSeries) {
    const auto b = worked(1.5);
    const auto m = markowitz_random_returns(b.spec, b.sec);
    // R_A = {1, 1.5}, R_B = {1, 1}, X = {0.25, 0.75}
    EXPECT_EQ(m.random, (std::vector<double>{1.0, 1.125}));
    EXPECT_EQ(m.weights, (std::vector<double>{1.0, 1.0}));
    EXPECT_DOUBLE_EQ(m.mean, 1.0625);
}

TEST(MarkowitzRandomReturns, VolumeWeightedMeanDiffersFromDecomposedMean) {
    // Counterexample to averaging the constant-volume series with W: with A
    // priced {1, 1.5}, volumes A {4,6}, B {2,8}:
    //   sum_j R_j X_j = 0.25 * (4*1 + 6*1.5)/10 + 0.75 = 1.075
    //   W-weighted mean of R_M = (6*1 + 14*1.125)/20 = 1.0875
    const auto b = worked(1.5);
    const double decomposed = mean_return_decomposition(b.spec, b.sec);
    EXPECT_DOUBLE_EQ(decomposed, 1.075);
    auto m = markowitz_random_returns(b.spec, b.sec);
    m.weights = b.ptape.volumes;
    EXPECT_DOUBLE_EQ(m.weighted_mean(), 1.0875);
}

TEST(Returns, Errors) {
    auto b = worked();
    const std::vector<ReturnSeries> only_a{b.sec[0]};
    EXPECT_THROW(mean_return_decomposition(b.spec, only_a), Error);
    auto bad = b.norm;
    bad[0].window = AveragingWindow::unit(3);
    EXPECT_THROW(relative_volumes(b.ptape, bad), Error);
}

TEST(ReturnsProperties, DecompositionsMatchOracle) {
    oracle::Gen g(202);
    for (int rep = 0; rep < 300; ++rep) {
        const auto c = oracle::random_case(g);
        const auto b = from_case(c);
        const auto e = oracle::expected(c);
        const auto direct = portfolio_returns(b.spec, b.ptape);
        const double decomposed = mean_return_decomposition(b.spec, b.sec);
        EXPECT_TRUE(oracle::close(decomposed, direct.mean, 1e-12));
        EXPECT_TRUE(oracle::close(decomposed, e.mean_return, 1e-12));

        const auto r = random_return_decomposition(b.spec, b.sec, relative_volumes(b.ptape, b.norm));
        EXPECT_TRUE(oracle::close(r.weighted_mean(), decomposed, 1e-12));
        for (std::size_t i = 0; i < r.size(); ++i) {
            ASSERT_TRUE(oracle::close(r.random[i], e.s[i] / e.s0, 1e-12));
            ASSERT_TRUE(oracle::close(direct.random[i], e.s[i] / e.s0, 1e-12));
            ASSERT_GT(r.random[i], 0.0);
        }
    }
}

TEST(ReturnsProperties, ConstantVolumeReduction) {
    oracle::Gen g(203);
    for (int rep = 0; rep < 200; ++rep) {
        const auto c = oracle::random_case(g, 8, 256, true);
        const auto b = from_case(c);
        const auto r = random_return_decomposition(b.spec, b.sec, relative_volumes(b.ptape, b.norm));
        auto m = markowitz_random_returns(b.spec, b.sec);
        for (std::size_t i = 0; i < r.size(); ++i) ASSERT_TRUE(oracle::close(r.random[i], m.random[i], 1e-12));
        EXPECT_TRUE(oracle::close(m.mean, mean_return_decomposition(b.spec, b.sec), 1e-12));
        m.weights = b.ptape.volumes;
        EXPECT_TRUE(oracle::close(m.weighted_mean(), mean_return_decomposition(b.spec, b.sec), 1e-12));
    }
}
