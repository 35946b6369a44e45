#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mbv/error.hpp"
#include "mbv/io.hpp"
#include "mbv/pipeline.hpp"
#include "oracle.hpp"

using namespace mbv;

TEST(Timestamps, ParseForms) {
    EXPECT_EQ(io::parse_timestamp("0"), 0);
    EXPECT_EQ(io::parse_timestamp("1767607200500000000"), 1767607200500000000LL);
    EXPECT_EQ(io::parse_timestamp("1970-01-01T00:00:01Z"), 1000000000LL);
    EXPECT_EQ(io::parse_timestamp("1970-01-01 00:00:01.25"), 1250000000LL);
    EXPECT_EQ(io::parse_timestamp("1970-01-01T01:00:00+01:00"), 0);
    EXPECT_EQ(io::parse_timestamp("1969-12-31T23:00:00-01:00"), 0);
    EXPECT_EQ(io::parse_timestamp("2026-01-05T10:00:00.000000001Z"), 1767607200000000001LL);
    EXPECT_THROW(io::parse_timestamp("2026-13-05T10:00:00Z"), Error);
    EXPECT_THROW(io::parse_timestamp("yesterday"), Error);
    EXPECT_THROW(io::parse_timestamp("12345", io::TimestampFormat::Iso8601), Error);
    EXPECT_THROW(io::parse_timestamp("2026-01-05T10:00:00Z", io::TimestampFormat::EpochNs), Error);
}

TEST(Timestamps, FormatRoundTrip) {
    oracle::Gen g(5);
    for (int i = 0; i < 200; ++i) {
        const auto ts = static_cast<Timestamp>(g.uniform(-1e18, 4e18));
        EXPECT_EQ(io::parse_timestamp(io::format_iso8601(ts)), ts);
    }
    EXPECT_EQ(io::format_iso8601(1000000000LL), "1970-01-01T00:00:01.000000000Z");
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(2.0), "2");
    EXPECT_EQ(io::format_double(std::nan("")), "nan");
    oracle::Gen g(6);
    for (int i = 0; i < 1000; ++i) {
        const double x = g.log_uniform(1e-300, 1e300) * (g.coin(0.5) ? -1 : 1);
        EXPECT_EQ(std::stod(io::format_double(x)), x);
    }
}

TEST(TapeCsv, ReadCheckGroup) {
    std::istringstream in(
        "security_id,timestamp,price,volume\n"
        "A,1970-01-01T00:00:01Z,10,5\n"
        "B,2000000000,3,-1\n"
        "A,3000000000,0,2\n"
        "C,4000000000,7,0\n"
        "B,5000000000,3,2\n");
    const auto rows = io::read_tape_csv(in);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0].timestamp, 1000000000LL);
    EXPECT_EQ(rows[1].line, 3u);
    const auto v = io::check_tape_rows(rows);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].kind, "negative_volume");
    EXPECT_EQ(v[0].security_id, "B");
    EXPECT_EQ(v[0].line, 3u);
    EXPECT_EQ(v[1].kind, "nonpositive_price");
    EXPECT_EQ(v[1].line, 4u);
    EXPECT_EQ(v[2].kind, "zero_total_volume");
    EXPECT_EQ(v[2].security_id, "C");
    EXPECT_EQ(v[2].line, 0u);
    const auto groups = io::group_by_security(rows);
    EXPECT_EQ(groups.at("A").size(), 2u);
}

TEST(TapeCsv, ParseErrors) {
    auto fails = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::read_tape_csv(in);
        } catch (const Error& e) {
            return e.code() == ErrorCode::ParseError;
        }
        return false;
    };
    EXPECT_TRUE(fails(""));
    EXPECT_TRUE(fails("id,timestamp,price,volume\n"));
    EXPECT_TRUE(fails("security_id,timestamp,price,volume\nA,1,2\n"));
    EXPECT_TRUE(fails("security_id,timestamp,price,volume\nA,1,x,2\n"));
    EXPECT_TRUE(fails("security_id,timestamp,price,volume\nA,notatime,1,2\n"));
}

TEST(TapeCsv, WriteThenReadThenBinReproducesTape) {
    SimConfig c;
    c.seed = 3;
    c.trade_count = 12;
    c.securities = default_securities(3, 0.02, 50);
    for (auto& s : c.securities) s.cv_u = 0.7;
    auto sim = generate_tape(c);
    std::vector<SecurityTape> tapes;
    const auto window = AveragingWindow::starting_at(0, 1200, 12);
    for (const auto& t : sim.tapes) {
        std::vector<Trade> tr(t.trades().begin(), t.trades().end());
        tapes.emplace_back(t.security_id(), window, tr, t.base_price());
    }
    std::stringstream buf;
    io::write_tape_csv(buf, tapes);
    const auto rows = io::read_tape_csv(buf);
    EXPECT_TRUE(io::check_tape_rows(rows).empty());
    const auto groups = io::group_by_security(rows);
    for (const auto& t : tapes) {
        const auto back = bin_raw_trades(t.security_id(), groups.at(t.security_id()), window, t.base_price());
        EXPECT_EQ(back.prices(), t.prices());
        EXPECT_EQ(back.volumes(), t.volumes());
    }
}

TEST(PortfolioCsv, RoundTrip) {
    std::istringstream in("security_id,shares,base_price\nB,10,3\nA,10,1\n");
    const auto h = io::read_portfolio_csv(in);
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].security_id, "B");
    std::stringstream out;
    io::write_portfolio_csv(out, PortfolioSpec::build(h));
    EXPECT_EQ(out.str(), "security_id,shares,base_price\nA,10,1\nB,10,3\n");
    std::istringstream bad("security_id,shares,base_price\nA,ten,1\n");
    EXPECT_THROW(io::read_portfolio_csv(bad), Error);
}

TEST(ReportJson, RoundTripReproducesEveryField) {
    oracle::Gen g(7);
    for (int rep = 0; rep < 50; ++rep) {
        const auto c = oracle::random_case(g, 5, 40);
        const auto a = analyze_portfolio(PortfolioSpec::build(c.holdings()), c.tapes(),
                                         rep % 2 ? std::optional<double>(g.uniform(-1, 1)) : std::nullopt,
                                         rep % 3 ? CovarianceWeighting::Equal : CovarianceWeighting::Volume);
        const auto& r = a.report;
        const auto j = io::report_to_json(r);
        const auto back = io::report_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(back.security_ids, r.security_ids);
        EXPECT_EQ(back.trade_count, r.trade_count);
        EXPECT_EQ(back.theta_m, r.theta_m);
        EXPECT_EQ(back.theta, r.theta);
        EXPECT_EQ(back.theta_t, r.theta_t);
        EXPECT_EQ(back.taylor_a, r.taylor_a);
        EXPECT_EQ(back.mean_return, r.mean_return);
        EXPECT_EQ(back.divergence, r.divergence);
        EXPECT_EQ(back.weighting, r.weighting);
        EXPECT_EQ(back.moments.psi_sq, r.moments.psi_sq);
        EXPECT_EQ(back.moments.chi_sq, r.moments.chi_sq);
        EXPECT_EQ(back.moments.phi, r.moments.phi);
        EXPECT_EQ(back.moments.value_mean, r.moments.value_mean);
        EXPECT_EQ(back.moments.volume_mean_sq, r.moments.volume_mean_sq);
        EXPECT_EQ(back.moments.value_volume_cov, r.moments.value_volume_cov);
        EXPECT_EQ(back.theta_jk.rows(), r.theta_jk.rows());
        EXPECT_EQ(io::report_to_json(back), j);
    }
}

TEST(ReportJson, FieldNamesAndNullDivergence) {
    VarianceReport r;
    r.security_ids = {"A"};
    r.trade_count = 2;
    r.theta_m = 0.1;
    r.theta = 0.0;
    r.theta_jk = CovarianceMatrix(1);
    const auto j = io::report_to_json(r);
    for (const char* k : {"theta_m", "theta", "theta_t", "mean_return", "psi_sq", "chi_sq", "phi",
                          "theta_jk", "divergence", "security_ids"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_TRUE(j["divergence"].is_null());
    EXPECT_TRUE(j["theta_t"].is_null());
    EXPECT_THROW(io::report_from_json(nlohmann::json::object()), Error);
}

TEST(ReportCsv, HeaderAndRow) {
    VarianceReport r;
    r.security_ids = {"A", "B"};
    r.trade_count = 4;
    r.theta_m = 0.5;
    r.theta = 0.25;
    r.mean_return = 1.5;
    r.divergence = 1.0;
    EXPECT_EQ(io::report_csv_header(), "theta_m,theta,theta_t,mean_return,psi_sq,chi_sq,phi,divergence,n,j");
    EXPECT_EQ(io::report_csv_row(r), "0.5,0.25,,1.5,0,0,0,1,4,2");
}

TEST(SweepCsv, Layout) {
    std::vector<SweepCell> cells(1);
    cells[0].cv_u = 0.5;
    cells[0].rho = -0.8;
    cells[0].theta_m_mean = 1;
    cells[0].theta_mean = 2;
    cells[0].divergence_mean = -0.5;
    cells[0].divergence_stddev = 0.25;
    cells[0].replications = 10;
    std::ostringstream out;
    io::write_sweep_csv(out, cells);
    EXPECT_EQ(out.str(),
              "cv_u,rho,theta_m_mean,theta_mean,divergence_mean,divergence_stddev,replications\n"
              "0.5,-0.8,1,2,-0.5,0.25,10\n");
    cells[0].theta_t_mean = 3;
    std::ostringstream out2;
    io::write_sweep_csv(out2, cells);
    EXPECT_EQ(out2.str().substr(0, out2.str().find('\n')),
              "cv_u,rho,theta_m_mean,theta_mean,divergence_mean,divergence_stddev,replications,theta_t_mean");
}
