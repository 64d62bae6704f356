#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ratiomarket/market.hpp"
#include "ratiomarket/random.hpp"

namespace ratiomarket {

/// A recorded return was non-positive or not finite.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exactly m agents trade each period.
struct FixedCount {
    std::size_t m = 1;
};

/// m is drawn uniformly from {low, ..., high} each period.
struct UniformCount {
    std::size_t low = 2;
    std::size_t high = 2;
};

/// Each of n agents joins independently with probability p.
struct BinomialCount {
    std::size_t n = 0;
    double p = 0.0;
};

using SelectionScheme = std::variant<FixedCount, UniformCount, BinomialCount>;

void validate(const SelectionScheme& scheme, std::size_t n_agents);
/// Expected number of active agents per period.
[[nodiscard]] double mean_active(const SelectionScheme& scheme);
/// "fixed", "uniform" or "binomial".
[[nodiscard]] std::string scheme_name(const SelectionScheme& scheme);

/// Starting population near the balanced steady state.
struct InitSpec {
    double k_low = 0.2;
    double k_high = 1.0;
    double b0 = 10.0;
    double epsilon = 0.02;

    void validate() const;
};

struct SimulationConfig {
    std::size_t n_agents = 500;
    MarketParams params{1.001, 4.0, 0.3};
    SelectionScheme scheme = FixedCount{40};
    std::size_t periods_per_year = 200;
    double years = 4.0;
    double burn_in_years = 2.0;
    std::size_t n_trajectories = 2000;
    std::uint64_t master_seed = 20240601;
    InitSpec init;

    void validate() const;
    [[nodiscard]] std::size_t total_periods() const;
    [[nodiscard]] std::size_t burn_in_periods() const;
};

/// Balanced targets k* ~ U[k_low, k_high], b = b0, s = k* b0, then k = k*(1 + d), d ~ U[-eps, eps].
[[nodiscard]] std::vector<AgentState> init_population(std::size_t n_agents, const InitSpec& init,
                                                      CounterStream& stream);

/// Draws active sets. Keeps a permutation buffer so that a fixed-size draw
/// costs O(m) rather than O(N).
class ActiveSetSampler {
public:
    ActiveSetSampler(SelectionScheme scheme, std::size_t n_agents);

    /// Distinct agent indices for one period. The returned span is valid
    /// until the next call.
    std::span<const std::size_t> draw(CounterStream& stream);

    [[nodiscard]] const SelectionScheme& scheme() const noexcept { return scheme_; }

private:
    std::span<const std::size_t> draw_subset(std::size_t m, CounterStream& stream);

    SelectionScheme scheme_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> picked_;
};

/// One-shot active set draw.
[[nodiscard]] std::vector<std::size_t> select_active(const SelectionScheme& scheme, std::size_t n_agents,
                                                     CounterStream& stream);

/// One trajectory of the N-agent market.
///
/// Holdings are kept in units of the running price level and bond growth
/// factor, so agents outside the active set are marked to the new price and
/// credited bond interest without being touched.
class MarketSimulation {
public:
    MarketSimulation(const SimulationConfig& config, std::uint64_t trajectory_index);

    /// Advance one trading period and return P_n / P_{n-1}.
    double step();

    [[nodiscard]] std::vector<AgentState> population() const;
    [[nodiscard]] AgentState agent(std::size_t i) const;
    [[nodiscard]] std::size_t times_active(std::size_t i) const { return times_active_[i]; }
    [[nodiscard]] std::size_t last_active_count() const noexcept { return last_active_count_; }
    /// P_n / P_0.
    [[nodiscard]] double price_level() const noexcept { return price_level_; }
    /// r^n.
    [[nodiscard]] double bond_level() const noexcept { return bond_level_; }
    [[nodiscard]] std::size_t period() const noexcept { return period_; }

private:
    MarketParams params_;
    CounterStream stream_;
    ActiveSetSampler sampler_;
    std::vector<double> k_;
    std::vector<double> shares_;      // s / price_level
    std::vector<double> bond_units_;  // b / bond_level
    std::vector<std::size_t> times_active_;
    std::vector<AgentState> scratch_;
    double price_level_ = 1.0;
    double bond_level_ = 1.0;
    std::size_t period_ = 0;
    std::size_t last_active_count_ = 0;
};

struct ReturnsSeries {
    std::uint64_t trajectory_index = 0;
    std::uint64_t stream_key = 0;
    std::vector<double> returns;
};

[[nodiscard]] ReturnsSeries simulate_trajectory(const SimulationConfig& config, std::uint64_t trajectory_index);

/// Trajectory-major matrix of gross returns.
class Ensemble {
public:
    Ensemble() = default;
    Ensemble(std::size_t n_trajectories, std::size_t n_periods);

    [[nodiscard]] std::size_t trajectories() const noexcept { return n_trajectories_; }
    [[nodiscard]] std::size_t periods() const noexcept { return n_periods_; }

    [[nodiscard]] std::span<const double> trajectory(std::size_t i) const {
        return {data_.data() + i * n_periods_, n_periods_};
    }
    [[nodiscard]] std::span<double> trajectory(std::size_t i) { return {data_.data() + i * n_periods_, n_periods_}; }
    [[nodiscard]] double at(std::size_t i, std::size_t n) const { return data_[i * n_periods_ + n]; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    /// Build from rows of equal length.
    [[nodiscard]] static Ensemble from_rows(const std::vector<std::vector<double>>& rows);

private:
    std::size_t n_trajectories_ = 0;
    std::size_t n_periods_ = 0;
    std::vector<double> data_;
};

/// Run every trajectory; output is independent of `workers`.
[[nodiscard]] Ensemble simulate_ensemble(const SimulationConfig& config, unsigned workers = 1);

/// Predicted stationary return r * (alpha * beta)^(m / 2N).
[[nodiscard]] double rate_stock_n(const MarketParams& params, double m, std::size_t n_agents);

}  // namespace ratiomarket
