#include "mbv/simulator.hpp"

#include <cmath>
#include <set>

#include "mbv/detmath.hpp"
#include "mbv/error.hpp"
#include "mbv/kernels.hpp"
#include "mbv/pipeline.hpp"

namespace mbv {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate_config(const SimConfig& config) {
    require(config.trade_count >= 2, "trade_count must be >= 2");
    require(!config.securities.empty(), "at least one security required");
    std::set<std::string> ids;
    for (const auto& s : config.securities) {
        const std::string& id = s.security_id;
        require(!id.empty(), "empty security id");
        require(ids.insert(id).second, "duplicate security " + id);
        require(finite_pos(s.base_price), id + ": base_price must be > 0");
        require(finite_nonneg(s.sigma_p), id + ": sigma_p must be >= 0");
        require(finite_pos(s.mean_volume), id + ": mean_volume must be > 0");
        require(finite_nonneg(s.cv_u), id + ": cv_u must be >= 0");
        require(std::isfinite(s.rho) && s.rho >= -1.0 && s.rho <= 1.0, id + ": rho must be in [-1, 1]");
        require(finite_pos(s.shares), id + ": shares must be > 0");
    }
}

SimulatedPortfolio generate_tape(const SimConfig& config) {
    validate_config(config);
    const std::size_t n = config.trade_count;
    const std::size_t nsec = config.securities.size();

    struct Law {
        double log_sigma;  // s, log-volume standard deviation
        double rho_perp;   // sqrt(1 - rho^2)
    };
    std::vector<Law> laws(nsec);
    for (std::size_t j = 0; j < nsec; ++j) {
        const auto& p = config.securities[j];
        laws[j].log_sigma = std::sqrt(detmath::log(1.0 + p.cv_u * p.cv_u));
        laws[j].rho_perp = std::sqrt(1.0 - p.rho * p.rho);
    }

    detmath::Xoshiro256StarStar rng(config.seed, config.stream);
    std::vector<double> log_return(nsec, 0.0);
    std::vector<std::vector<Trade>> trades(nsec, std::vector<Trade>(n));
    std::vector<double> z(nsec);
    std::vector<double> xi(nsec);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < nsec; ++j) {
            z[j] = rng.normal();
            xi[j] = rng.normal();
        }
        // Redraw the volume innovations if no security traded at this
        // instant; the portfolio price would be undefined there.
        while (true) {
            double instant_volume = 0.0;
            for (std::size_t j = 0; j < nsec; ++j) {
                const auto& p = config.securities[j];
                const Law& law = laws[j];
                double volume = p.mean_volume;
                if (law.log_sigma > 0.0) {
                    const double eta = p.rho * z[j] + law.rho_perp * xi[j];
                    volume = p.mean_volume *
                             detmath::exp(law.log_sigma * eta - 0.5 * law.log_sigma * law.log_sigma);
                }
                trades[j][i].volume = volume;
                instant_volume += volume;
            }
            if (instant_volume > 0.0) break;
            for (std::size_t j = 0; j < nsec; ++j) xi[j] = rng.normal();
        }
        for (std::size_t j = 0; j < nsec; ++j) {
            const auto& p = config.securities[j];
            log_return[j] += p.sigma_p * z[j];
            Trade& t = trades[j][i];
            t.grid_index = i + 1;
            t.price = p.sigma_p > 0.0 ? p.base_price * detmath::exp(log_return[j]) : p.base_price;
            t.value = t.price * t.volume;
        }
    }

    std::vector<HoldingInput> holdings;
    holdings.reserve(nsec);
    for (const auto& p : config.securities) holdings.push_back({p.security_id, p.shares, p.base_price});
    SimulatedPortfolio out{PortfolioSpec::build(holdings), {}};

    const auto window = AveragingWindow::unit(n);
    out.tapes.reserve(nsec);
    for (const auto& h : out.spec.holdings()) {
        std::size_t j = 0;
        while (config.securities[j].security_id != h.security_id) ++j;
        out.tapes.emplace_back(h.security_id, window, std::move(trades[j]), h.base_price);
    }
    return out;
}

std::vector<SecurityParams> default_securities(std::size_t count, double sigma_p,
                                               double mean_volume) {
    std::vector<SecurityParams> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        SecurityParams p;
        p.security_id = "S" + std::to_string(j + 1);
        p.base_price = j == 0 ? 100.0 : 300.0;
        p.shares = j == 0 ? 1000.0 : 7.0;
        p.sigma_p = sigma_p;
        p.mean_volume = mean_volume;
        out.push_back(p);
    }
    return out;
}

std::vector<SweepCell> divergence_experiment(const SweepConfig& config) {
    require(!config.cv_grid.empty(), "cv grid is empty");
    require(!config.rho_grid.empty(), "rho grid is empty");
    require(config.replications >= 1, "replications must be >= 1");
    validate_config(config.base);
    for (double cv : config.cv_grid) require(finite_nonneg(cv), "cv grid value must be >= 0");
    for (double rho : config.rho_grid) {
        require(std::isfinite(rho) && rho >= -1.0 && rho <= 1.0, "rho grid value must be in [-1, 1]");
    }

    const std::size_t cells = config.cv_grid.size() * config.rho_grid.size();
    const std::size_t reps = config.replications;

    struct Outcome {
        double theta_m = 0.0;
        double theta = 0.0;
        std::optional<double> divergence;
        std::optional<double> theta_t;
        std::optional<Error> failure;
    };
    std::vector<Outcome> outcomes(cells * reps);

    const auto tasks = static_cast<std::ptrdiff_t>(outcomes.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t task = 0; task < tasks; ++task) {
        const auto t = static_cast<std::size_t>(task);
        const std::size_t cell = t / reps;
        const std::size_t rep = t % reps;
        SimConfig sim = config.base;
        sim.stream = rep;
        for (auto& s : sim.securities) {
            s.cv_u = config.cv_grid[cell / config.rho_grid.size()];
            s.rho = config.rho_grid[cell % config.rho_grid.size()];
        }
        Outcome& out = outcomes[t];
        try {
            const auto portfolio = generate_tape(sim);
            const auto analysis = analyze_portfolio(portfolio.spec, portfolio.tapes, config.taylor_a);
            out.theta_m = analysis.report.theta_m;
            out.theta = analysis.report.theta;
            out.divergence = analysis.report.divergence;
            out.theta_t = analysis.report.theta_t;
        } catch (const Error& e) {
            out.failure = e;
        }
    }

    std::vector<SweepCell> table;
    table.reserve(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        SweepCell c;
        c.cv_u = config.cv_grid[cell / config.rho_grid.size()];
        c.rho = config.rho_grid[cell % config.rho_grid.size()];
        kernels::CompensatedSum theta_m;
        kernels::CompensatedSum theta;
        kernels::CompensatedSum theta_t;
        std::vector<double> divergences;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const Outcome& o = outcomes[cell * reps + rep];
            if (o.failure) throw *o.failure;
            theta_m.add(o.theta_m);
            theta.add(o.theta);
            if (o.theta_t) theta_t.add(*o.theta_t);
            if (o.divergence) divergences.push_back(*o.divergence);
        }
        const double r = static_cast<double>(reps);
        c.theta_m_mean = theta_m.value() / r;
        c.theta_mean = theta.value() / r;
        if (config.taylor_a) c.theta_t_mean = theta_t.value() / r;
        c.replications = divergences.size();
        if (!divergences.empty()) {
            const double m = static_cast<double>(divergences.size());
            c.divergence_mean = kernels::serial::sum(divergences) / m;
            if (divergences.size() > 1) {
                const double ss = kernels::serial::centered_cross(divergences, c.divergence_mean,
                                                                  divergences, c.divergence_mean);
                c.divergence_stddev = std::sqrt(ss / (m - 1.0));
            }
        } else {
            c.divergence_mean = std::nan("");
            c.divergence_stddev = std::nan("");
        }
        table.push_back(c);
    }
    return table;
}

}  // namespace mbv
