#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbv/tape.hpp"

namespace mbv {

struct Holding {
    std::string security_id;
    double shares = 0.0;      // U_j(t0)
    double base_price = 0.0;  // p_j(t0)
    double base_value = 0.0;  // C_j(t0) = p_j(t0) * U_j(t0)
};

struct HoldingInput {
    std::string security_id;
    double shares = 0.0;
    double base_price = 0.0;
};

/// Fixed portfolio composition at t0.
///
/// Holdings are stored sorted by security id, so every quantity built from a
/// spec is independent of the order the holdings were supplied in.
class PortfolioSpec {
public:
    /// Throws DuplicateSecurity, NonpositiveShares, NonpositivePrice, or
    /// InvalidArgument for an empty list.
    static PortfolioSpec build(std::span<const HoldingInput> holdings);

    std::span<const Holding> holdings() const noexcept { return holdings_; }
    std::size_t size() const noexcept { return holdings_.size(); }
    /// Position of `security_id` in holdings(), if held.
    std::optional<std::size_t> index_of(const std::string& security_id) const;

    double total_value() const noexcept { return total_value_; }    // Q_sum(t0)
    double total_shares() const noexcept { return total_shares_; }  // W_sum(t0)
    double share_price() const noexcept { return share_price_; }    // s(t0)
    /// X_j(t0) = C_j(t0) / Q_sum(t0)
    std::span<const double> value_weights() const noexcept { return value_weights_; }
    /// x_j(t0) = U_j(t0) / W_sum(t0)
    std::span<const double> share_weights() const noexcept { return share_weights_; }

private:
    std::vector<Holding> holdings_;
    double total_value_ = 0.0;
    double total_shares_ = 0.0;
    double share_price_ = 0.0;
    std::vector<double> value_weights_;
    std::vector<double> share_weights_;
};

/// Market trades of one security rescaled so their total volume equals the
/// portfolio holding. Prices are untouched by the rescaling.
struct NormalizedTape {
    std::string security_id;
    AveragingWindow window;
    double lambda = 0.0;
    std::vector<double> prices;   // p_j(t_i)
    std::vector<double> values;   // c_j(t_i)
    std::vector<double> volumes;  // u_j(t_i)
};

/// The portfolio traded as a single security: Q(t_i), W(t_i), s(t_i).
struct PortfolioTape {
    AveragingWindow window;
    std::vector<double> values;   // Q(t_i)
    std::vector<double> volumes;  // W(t_i)
    std::vector<double> prices;   // s(t_i)
    double total_value = 0.0;     // Q_sum(t)
    double total_shares = 0.0;    // W_sum(t)
    double mean_price = 0.0;      // s(t)

    std::size_t size() const noexcept { return values.size(); }
};

/// U_j(t0) / U_sum_j(t). Throws SecurityMismatch or ZeroTotalVolume.
double lambda_factor(const Holding& holding, const SecurityTape& tape);

NormalizedTape normalize_tape(const Holding& holding, const SecurityTape& tape);

/// Normalizes every holding's tape, in parallel across securities. Tapes
/// are matched to holdings by id; throws MissingSecurity or UnknownSecurity.
std::vector<NormalizedTape> normalize_all(const PortfolioSpec& spec,
                                          std::span<const SecurityTape> tapes);

/// Sums normalized trades across securities instant by instant. Throws
/// MissingSecurity, UnknownSecurity, WindowMismatch, or
/// ZeroPortfolioVolumeAtInstant.
PortfolioTape build_portfolio_tape(const PortfolioSpec& spec,
                                   std::span<const NormalizedTape> normalized);

}  // namespace mbv
