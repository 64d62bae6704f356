#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ratiomarket/market.hpp"

namespace ratiomarket {

struct TwoAgentConfig {
    AgentState agent1;
    AgentState agent2;
    MarketParams params;
    std::size_t n_periods = 1;
    double p0 = 1.0;

    /// Throws InvalidInput naming the offending field.
    void validate() const;
};

struct TwoAgentPath {
    std::vector<double> prices;   ///< P_1 .. P_n
    std::vector<double> returns;  ///< R_n = P_n / P_{n-1}
    std::array<AgentState, 2> final_agents{};
};

/// Iterate the deterministic two-agent market for `n_periods`.
[[nodiscard]] TwoAgentPath iterate_two_agent(const TwoAgentConfig& config);

/// Per-period return r * sqrt(alpha * beta) the two-agent cycle settles at.
[[nodiscard]] double rate_stock(const MarketParams& params);

/// Per-period amplification over one buy/sell cycle, relative to r.
///
/// Both agents start balanced with bonds b_i = s_i / k_i. Their ratios were
/// just moved to alpha*k1 and beta*k2, so agent 1 buys and agent 2 sells in
/// the first period; the roles reverse in the second. Returns
/// sqrt(P~/P0) / r, where P~ is the price after both periods. The value does
/// not depend on r and is homogeneous of degree zero in (s1, s2).
[[nodiscard]] double amplification_A(double k1, double k2, double s1, double s2, double alpha, double beta,
                                     double r = 1.0);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ScanSpec {
    Interval k_range{0.01, 100.0};
    Interval s_range{1.0, 100.0};
    std::size_t k_points = 5;
    std::size_t s_points = 5;
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
    /// Grid with every interval halved; contains every node of this grid.
    [[nodiscard]] ScanSpec refined() const;
};

/// Grid node: (k1, k2, s1, s2).
using ScanPoint = std::array<double, 4>;

struct ScanResult {
    double min_a = 0.0;
    double max_a = 0.0;
    ScanPoint argmin{};
    ScanPoint argmax{};
    std::size_t evaluations = 0;

    /// Two-period gross growth relative to r^2, i.e. A^2.
    [[nodiscard]] double min_two_period() const { return min_a * min_a; }
    [[nodiscard]] double max_two_period() const { return max_a * max_a; }
};

/// k axis nodes: log-uniform over k_range.
[[nodiscard]] std::vector<double> k_axis(const ScanSpec& spec);
/// s axis nodes: uniform over s_range.
[[nodiscard]] std::vector<double> s_axis(const ScanSpec& spec);

/// Exhaustive grid scan of amplification_A.
///
/// Ties are broken towards the lexicographically smallest (k1, k2, s1, s2),
/// so the result does not depend on `workers`.
[[nodiscard]] ScanResult scan_A(const ScanSpec& spec, double r = 1.0, unsigned workers = 1);

}  // namespace ratiomarket
