#pragma once

// Seeded synthetic trade tapes.
//
// Per security j and trade i, with z and xi independent standard normals:
//   log p_j(t_i) = log p_j(t_{i-1}) + sigma_p * z          (p_j(t_0) = base price)
//   U_j(t_i)     = mu_U * exp(s * (rho * z + sqrt(1 - rho^2) * xi) - s^2 / 2)
// where s^2 = log(1 + cv_U^2), so U is log-normal with mean mu_U and
// coefficient of variation cv_U. cv_U = 0 gives U = mu_U exactly and
// sigma_p = 0 gives p = base exactly. Values are C = p * U.
//
// Random numbers come from xoshiro256** seeded via SplitMix64 from
// (seed, stream); draws are consumed instant by instant, security by
// security, two normals per (i, j), regardless of the parameters, so two
// configurations that differ only in cv_U or rho share their innovations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbv/portfolio.hpp"
#include "mbv/tape.hpp"

namespace mbv {

struct SecurityParams {
    std::string security_id;
    double base_price = 100.0;
    double sigma_p = 0.01;       // per-trade log-price volatility
    double mean_volume = 100.0;  // mu_U
    double cv_u = 0.0;           // volume coefficient of variation target
    double rho = 0.0;            // log-price / log-volume innovation coupling
    double shares = 1000.0;      // U_j(t0)
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t trade_count = 100;
    std::vector<SecurityParams> securities;
};

/// Throws InvalidConfig naming the first offending field.
void validate_config(const SimConfig& config);

struct SimulatedPortfolio {
    PortfolioSpec spec;
    std::vector<SecurityTape> tapes;  // ordered like spec.holdings()
};

SimulatedPortfolio generate_tape(const SimConfig& config);

/// Securities S1..Sn: S1 is a core holding (1000 shares at 100), every other
/// one a small satellite (7 shares at 300). With N = 4 and sigma_p = 0.01
/// this layout shows divergence of both signs across the default sweep grid.
std::vector<SecurityParams> default_securities(std::size_t count, double sigma_p,
                                               double mean_volume);

struct SweepConfig {
    SimConfig base;
    std::vector<double> cv_grid;
    std::vector<double> rho_grid;
    std::size_t replications = 100;
    std::optional<double> taylor_a;
};

struct SweepCell {
    double cv_u = 0.0;
    double rho = 0.0;
    double theta_m_mean = 0.0;
    double theta_mean = 0.0;
    double divergence_mean = 0.0;
    double divergence_stddev = 0.0;  // sample standard deviation
    std::size_t replications = 0;    // replications with a defined divergence
    std::optional<double> theta_t_mean;
};

/// Runs every (cv_u, rho) cell, cv-major. Replication r of every cell uses
/// stream r of the base seed; replications run in parallel and are
/// aggregated in index order, so results do not depend on thread count.
std::vector<SweepCell> divergence_experiment(const SweepConfig& config);

}  // namespace mbv
