#include "mbv/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbv/error.hpp"
#include "mbv/io.hpp"
#include "mbv/pipeline.hpp"
#include "mbv/simulator.hpp"

namespace mbv::cli {

namespace {

/// Raised for usage and environment problems (exit 2).
struct EnvironmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EnvironmentError("cannot open " + path);
    return in;
}

io::TimestampFormat parse_format(const std::string& name) {
    if (name == "auto") return io::TimestampFormat::Auto;
    if (name == "epoch-ns") return io::TimestampFormat::EpochNs;
    if (name == "iso8601") return io::TimestampFormat::Iso8601;
    throw EnvironmentError("unknown timestamp format " + name);
}

/// Integer nanoseconds, optionally suffixed with ns, us, ms, s, m or h.
Duration parse_duration(const std::string& text) {
    static const std::pair<const char*, Duration> units[] = {
        {"ns", 1}, {"us", 1'000}, {"ms", 1'000'000}, {"s", 1'000'000'000},
        {"m", 60'000'000'000}, {"h", 3'600'000'000'000},
    };
    std::size_t digits = 0;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
    const std::string suffix = text.substr(digits);
    Duration scale = 0;
    if (suffix.empty()) scale = 1;
    for (const auto& [name, factor] : units) {
        if (suffix == name) scale = factor;
    }
    if (digits == 0 || scale == 0) throw EnvironmentError("bad duration '" + text + "'");
    return std::stoll(text.substr(0, digits)) * scale;
}

struct Sink {
    std::ostream& fallback;
    std::ofstream file;

    Sink(std::ostream& out, const std::string& path) : fallback(out) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw EnvironmentError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : fallback; }
};

// ---------------------------------------------------------------------------
// validate

struct ValidateOptions {
    std::string tape;
    std::string timestamp_format = "auto";
    std::string center;
    std::string width;
    std::size_t bins = 0;
    bool lenient_leading_bin = false;
};

int cmd_validate(const ValidateOptions& opt, std::ostream& out) {
    auto in = open_input(opt.tape);
    const auto rows = io::read_tape_csv(in, parse_format(opt.timestamp_format));
    auto violations = io::check_tape_rows(rows);

    auto line_for = [&](const io::RowViolation& v) {
        std::string s = "VIOLATION " + v.kind + " security=" + v.security_id;
        if (v.line) s += " row=" + std::to_string(v.line);
        return s;
    };

    if (opt.bins > 0) {
        if (opt.center.empty() || opt.width.empty()) {
            throw EnvironmentError("--bins requires --center and --width for validation");
        }
        const auto window = AveragingWindow::centered(
            io::parse_timestamp(opt.center, parse_format(opt.timestamp_format)),
            parse_duration(opt.width), opt.bins);
        for (const auto& r : rows) {
            if (!window.contains(r.timestamp)) {
                violations.push_back({"timestamp_out_of_window", r.security_id, r.line});
            }
        }
        if (violations.empty()) {
            const auto policy = opt.lenient_leading_bin ? LeadingBinPolicy::Backfill
                                                        : LeadingBinPolicy::Strict;
            for (const auto& [id, raw] : io::group_by_security(rows)) {
                try {
                    const auto tape = bin_raw_trades(id, raw, window, 1.0, policy);
                    for (const auto& v : validate_tape(tape).violations) {
                        violations.push_back({to_string(v.kind), id, 0});
                    }
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::EmptyLeadingBin) throw;
                    violations.push_back({"empty_leading_bin", id, 0});
                }
            }
        }
    }

    for (const auto& v : violations) out << line_for(v) << '\n';
    return violations.empty() ? kSuccess : kDomainError;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
    std::string portfolio;
    std::string tape;
    std::string timestamp_format = "auto";
    std::string center;
    std::string width;
    std::size_t bins = 0;
    bool lenient_leading_bin = false;
    std::optional<double> taylor_a;
    std::string format = "json";
    std::string weighting = "equal";
    std::string output;
};

AveragingWindow choose_window(const AnalyzeOptions& opt, const std::vector<io::TapeRow>& rows,
                              const PortfolioSpec& spec, io::TimestampFormat fmt) {
    if (!opt.center.empty() && opt.width.empty()) throw EnvironmentError("--center requires --width");
    if (!opt.center.empty()) {
        return AveragingWindow::centered(io::parse_timestamp(opt.center, fmt),
                                         parse_duration(opt.width), opt.bins);
    }
    Timestamp lo = std::numeric_limits<Timestamp>::max();
    Timestamp hi = std::numeric_limits<Timestamp>::min();
    for (const auto& r : rows) {
        if (!spec.index_of(r.security_id)) continue;
        lo = std::min(lo, r.timestamp);
        hi = std::max(hi, r.timestamp);
    }
    if (lo > hi) throw Error(ErrorCode::MissingSecurity, spec.holdings().front().security_id);
    const auto n = static_cast<Duration>(opt.bins);
    if (!opt.width.empty()) {
        return AveragingWindow::centered(lo + (hi - lo) / 2, parse_duration(opt.width), opt.bins);
    }
    const Duration span = std::max<Duration>(1, (hi - lo + n - 1) / n);
    return AveragingWindow::starting_at(lo, span * n, opt.bins);
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
    auto portfolio_in = open_input(opt.portfolio);
    auto tape_in = open_input(opt.tape);
    const auto fmt = parse_format(opt.timestamp_format);
    CovarianceWeighting weighting = CovarianceWeighting::Equal;
    if (opt.weighting == "volume") {
        weighting = CovarianceWeighting::Volume;
    } else if (opt.weighting != "equal") {
        throw EnvironmentError("unknown covariance weighting " + opt.weighting);
    }
    if (opt.format != "json" && opt.format != "csv") throw EnvironmentError("unknown format " + opt.format);

    const auto spec = PortfolioSpec::build(io::read_portfolio_csv(portfolio_in));
    const auto rows = io::read_tape_csv(tape_in, fmt);

    std::vector<io::TapeRow> held;
    for (const auto& r : rows) {
        if (spec.index_of(r.security_id)) held.push_back(r);
    }
    const auto violations = io::check_tape_rows(held);
    if (!violations.empty()) {
        for (const auto& v : violations) {
            err << "VIOLATION " << v.kind << " security=" << v.security_id;
            if (v.line) err << " row=" << v.line;
            err << '\n';
        }
        return kDomainError;
    }

    const auto groups = io::group_by_security(held);
    for (const auto& h : spec.holdings()) {
        if (!groups.contains(h.security_id)) throw Error(ErrorCode::MissingSecurity, h.security_id);
    }
    const auto window = choose_window(opt, held, spec, fmt);
    const auto policy = opt.lenient_leading_bin ? LeadingBinPolicy::Backfill : LeadingBinPolicy::Strict;

    std::vector<SecurityTape> tapes;
    for (const auto& h : spec.holdings()) {
        tapes.push_back(bin_raw_trades(h.security_id, groups.at(h.security_id), window, h.base_price, policy));
    }
    const auto analysis = analyze_portfolio(spec, tapes, opt.taylor_a, weighting);

    Sink sink(out, opt.output);
    if (opt.format == "json") {
        sink.stream() << io::report_to_json(analysis.report).dump(2) << '\n';
    } else {
        sink.stream() << io::report_csv_header() << '\n' << io::report_csv_row(analysis.report) << '\n';
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// simulate / generate

struct SimulateOptions {
    std::string config;
    std::uint64_t seed = 42;
    std::size_t securities = 2;
    std::size_t trades = 4;
    double sigma_p = 0.01;
    double mean_volume = 100.0;
    std::vector<double> grid_cv{0.0, 0.25, 0.5, 1.0};
    std::vector<double> grid_rho{-0.8, 0.0, 0.8};
    long long reps = 100;
    std::optional<double> taylor_a;
    std::string output;
    // generate only
    double cv_u = 0.5;
    double rho = 0.0;
    std::uint64_t stream = 0;
    std::string tape_out;
    std::string portfolio_out;
};

std::vector<SecurityParams> securities_from_json(const nlohmann::json& list) {
    std::vector<SecurityParams> out;
    for (const auto& s : list) {
        SecurityParams p;
        p.security_id = s.at("security_id").get<std::string>();
        p.base_price = s.value("base_price", p.base_price);
        p.sigma_p = s.value("sigma_p", p.sigma_p);
        p.mean_volume = s.value("mean_volume", p.mean_volume);
        p.shares = s.value("shares", p.shares);
        p.cv_u = s.value("cv_u", p.cv_u);
        p.rho = s.value("rho", p.rho);
        out.push_back(p);
    }
    return out;
}

/// Config file values first, then any flag given explicitly on the command line.
SweepConfig build_sweep(SimulateOptions opt, const CLI::App& cmd) {
    std::optional<nlohmann::json> file;
    if (!opt.config.empty()) {
        auto in = open_input(opt.config);
        try {
            file = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw EnvironmentError(opt.config + ": " + e.what());
        }
    }
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };

    SweepConfig sweep;
    std::vector<SecurityParams> securities;
    try {
        if (file) {
            const auto& f = *file;
            if (!given("--seed")) opt.seed = f.value("seed", opt.seed);
            if (!given("--trades")) opt.trades = f.value("trades", opt.trades);
            if (!given("--reps")) opt.reps = f.value("reps", opt.reps);
            if (!given("--grid-cv")) opt.grid_cv = f.value("grid_cv", opt.grid_cv);
            if (!given("--grid-rho")) opt.grid_rho = f.value("grid_rho", opt.grid_rho);
            if (!given("--taylor-a") && f.contains("taylor_a") && !f["taylor_a"].is_null()) {
                opt.taylor_a = f["taylor_a"].get<double>();
            }
            if (!given("--sigma-p")) opt.sigma_p = f.value("sigma_p", opt.sigma_p);
            if (!given("--mean-volume")) opt.mean_volume = f.value("mean_volume", opt.mean_volume);
            if (f.contains("securities") && !given("--securities")) {
                if (f["securities"].is_number_unsigned()) {
                    opt.securities = f["securities"].get<std::size_t>();
                } else {
                    securities = securities_from_json(f["securities"]);
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw EnvironmentError(opt.config + ": " + e.what());
    }
    if (securities.empty()) securities = default_securities(opt.securities, opt.sigma_p, opt.mean_volume);
    if (opt.reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");

    sweep.base.seed = opt.seed;
    sweep.base.trade_count = opt.trades;
    sweep.base.securities = std::move(securities);
    sweep.cv_grid = opt.grid_cv;
    sweep.rho_grid = opt.grid_rho;
    sweep.replications = static_cast<std::size_t>(opt.reps);
    sweep.taylor_a = opt.taylor_a;
    return sweep;
}

void echo_config(std::ostream& out, const SweepConfig& c) {
    auto list = [](const std::vector<double>& xs) {
        std::string s;
        for (double x : xs) s += (s.empty() ? "" : ",") + io::format_double(x);
        return s;
    };
    out << "# seed=" << c.base.seed << '\n';
    out << "# trades=" << c.base.trade_count << '\n';
    out << "# replications=" << c.replications << '\n';
    out << "# grid_cv=" << list(c.cv_grid) << '\n';
    out << "# grid_rho=" << list(c.rho_grid) << '\n';
    if (c.taylor_a) out << "# taylor_a=" << io::format_double(*c.taylor_a) << '\n';
    out << "# rng=xoshiro256**/splitmix64\n";
    for (const auto& s : c.base.securities) {
        out << "# security=" << s.security_id << " base_price=" << io::format_double(s.base_price)
            << " shares=" << io::format_double(s.shares) << " sigma_p=" << io::format_double(s.sigma_p)
            << " mean_volume=" << io::format_double(s.mean_volume) << '\n';
    }
}

int cmd_simulate(const SimulateOptions& opt, const CLI::App& cmd, std::ostream& out) {
    const auto sweep = build_sweep(opt, cmd);
    const auto table = divergence_experiment(sweep);
    Sink sink(out, opt.output);
    echo_config(sink.stream(), sweep);
    io::write_sweep_csv(sink.stream(), table);
    return kSuccess;
}

int cmd_generate(const SimulateOptions& opt, const CLI::App& cmd) {
    auto sweep = build_sweep(opt, cmd);
    SimConfig sim = sweep.base;
    sim.stream = opt.stream;
    const bool from_file = !opt.config.empty();
    for (auto& s : sim.securities) {
        if (!from_file || cmd.count("--cv-u")) s.cv_u = opt.cv_u;
        if (!from_file || cmd.count("--rho")) s.rho = opt.rho;
    }
    const auto portfolio = generate_tape(sim);
    Sink tape_sink(std::cout, opt.tape_out);
    Sink portfolio_sink(std::cout, opt.portfolio_out);
    io::write_portfolio_csv(portfolio_sink.stream(), portfolio.spec);
    io::write_tape_csv(tape_sink.stream(), portfolio.tapes);
    return kSuccess;
}

void add_window_flags(CLI::App* cmd, std::string& format, std::string& center, std::string& width,
                      bool& lenient) {
    cmd->add_option("--timestamp-format", format, "auto | epoch-ns | iso8601")->capture_default_str();
    cmd->add_option("--center", center, "Window center time t (same format as the tape)");
    cmd->add_option("--width", width, "Window width, integer ns or with unit (e.g. 300s)");
    cmd->add_flag("--lenient-leading-bin", lenient,
                  "Back-fill empty leading bins with the first observed price instead of failing");
}

void add_sim_flags(CLI::App* cmd, SimulateOptions& o) {
    cmd->add_option("--config", o.config, "JSON config file; explicit flags override it");
    cmd->add_option("--seed", o.seed, "Root seed")->capture_default_str();
    cmd->add_option("--securities", o.securities, "Number of securities J")->capture_default_str();
    cmd->add_option("--trades", o.trades, "Trades per window N")->capture_default_str();
    cmd->add_option("--sigma-p", o.sigma_p, "Per-trade log-price volatility")->capture_default_str();
    cmd->add_option("--mean-volume", o.mean_volume, "Mean trade volume")->capture_default_str();
    cmd->add_option("--output", o.output, "Write the report here instead of stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Market-based versus Markowitz portfolio variance from trade tapes", "mbv"};
    app.require_subcommand(1);

    ValidateOptions vopt;
    auto* validate = app.add_subcommand("validate", "Check a trade-tape CSV");
    validate->add_option("--tape", vopt.tape, "Tape CSV (security_id,timestamp,price,volume)")->required();
    validate->add_option("--bins", vopt.bins, "Also bin onto N trades and validate the grid tapes");
    add_window_flags(validate, vopt.timestamp_format, vopt.center, vopt.width, vopt.lenient_leading_bin);

    AnalyzeOptions aopt;
    auto* analyze = app.add_subcommand("analyze", "Compute the variance report for a portfolio");
    analyze->add_option("--portfolio", aopt.portfolio, "Portfolio CSV (security_id,shares,base_price)")->required();
    analyze->add_option("--tape", aopt.tape, "Tape CSV")->required();
    analyze->add_option("--bins", aopt.bins, "Trades per window N (>= 2)")->required();
    add_window_flags(analyze, aopt.timestamp_format, aopt.center, aopt.width, aopt.lenient_leading_bin);
    analyze->add_option("--taylor-a", aopt.taylor_a, "Coefficient a of the Taylor approximation");
    analyze->add_option("--format", aopt.format, "json | csv")->capture_default_str();
    analyze->add_option("--covariance-weighting", aopt.weighting, "equal | volume")->capture_default_str();
    analyze->add_option("--output", aopt.output, "Write the report here instead of stdout");

    SimulateOptions sopt;
    auto* simulate = app.add_subcommand("simulate", "Run the Markowitz vs market-based divergence sweep");
    add_sim_flags(simulate, sopt);
    simulate->add_option("--grid-cv", sopt.grid_cv, "Volume coefficient-of-variation grid")->delimiter(',');
    simulate->add_option("--grid-rho", sopt.grid_rho, "Price/volume coupling grid")->delimiter(',');
    simulate->add_option("--reps", sopt.reps, "Replications per cell")->capture_default_str();
    simulate->add_option("--taylor-a", sopt.taylor_a, "Also average the Taylor approximation");

    SimulateOptions gopt;
    auto* generate = app.add_subcommand("generate", "Write one simulated portfolio and tape as CSV");
    add_sim_flags(generate, gopt);
    generate->add_option("--cv-u", gopt.cv_u, "Volume coefficient of variation")->capture_default_str();
    generate->add_option("--rho", gopt.rho, "Price/volume coupling")->capture_default_str();
    generate->add_option("--stream", gopt.stream, "Replication stream index")->capture_default_str();
    generate->add_option("--tape-out", gopt.tape_out, "Tape CSV path")->required();
    generate->add_option("--portfolio-out", gopt.portfolio_out, "Portfolio CSV path")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kEnvironmentError;
    }

    try {
        if (validate->parsed()) return cmd_validate(vopt, out);
        if (analyze->parsed()) return cmd_analyze(aopt, out, err);
        if (simulate->parsed()) return cmd_simulate(sopt, *simulate, out);
        if (generate->parsed()) return cmd_generate(gopt, *generate);
    } catch (const EnvironmentError& e) {
        err << "error: " << e.what() << '\n';
        return kEnvironmentError;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return e.code() == ErrorCode::ParseError ? kEnvironmentError : kDomainError;
    }
    return kEnvironmentError;
}

}  // namespace mbv::cli
