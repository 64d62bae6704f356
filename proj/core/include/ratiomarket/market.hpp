#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace ratiomarket {

/// One trader: target stock-to-bond ratio and current dollar holdings.
struct AgentState {
    double k = 1.0;  ///< target stock-to-bond ratio
    double s = 1.0;  ///< dollars held in stock
    double b = 1.0;  ///< dollars held in bonds

    [[nodiscard]] bool valid() const noexcept { return k > 0.0 && s > 0.0 && b > 0.0; }
    [[nodiscard]] double ratio() const noexcept { return s / b; }
};

/// Exogenous bond return and the adaptive multipliers.
///
/// `alpha` scales the ratio of a seller, `beta` the ratio of a buyer. The
/// feedback regime studied in practice is alpha > 1, beta < 1, but any
/// positive pair is accepted.
struct MarketParams {
    double r = 1.0;
    double alpha = 1.0;
    double beta = 1.0;

    [[nodiscard]] bool valid() const noexcept { return r > 0.0 && alpha > 0.0 && beta > 0.0; }
};

/// Result of one trading period over an active set.
struct TradeOutcome {
    double price_ratio = 1.0;          ///< P / P_prev
    std::vector<double> fills;         ///< signed dollars, one per active agent
    std::vector<AgentState> updated;   ///< settled and ratio-updated agents
    bool degenerate = false;           ///< every agent already sat at one common zero-demand price
};

/// Raised for inputs that break a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Relative tolerance used to decide that all zero-demand prices coincide.
inline constexpr double kCoincidentPriceTolerance = 1e-12;

/// Relative tolerance (against the demand's two terms) below which a fill counts as zero.
inline constexpr double kZeroFillTolerance = 1e-12;

/// Signed dollar demand at `price_ratio` = P/P0.
///
/// Solves (P/P0 * s + x) / (r b - x) = k for x; positive is a purchase.
[[nodiscard]] double demand(const AgentState& agent, double price_ratio, const MarketParams& params);

/// Price at which `agent` demands nothing: r k b / s.
[[nodiscard]] double zero_demand_price(const AgentState& agent, const MarketParams& params);

/// Market-clearing P/P0 for a nonempty active set.
///
/// r * sum(k b / (1 + k)) / sum(s / (1 + k)). Homogeneous of degree zero in
/// the holdings, so a common rescaling of every (s, b) leaves it unchanged.
[[nodiscard]] double clearing_price(std::span<const AgentState> agents, const MarketParams& params);

/// Move the agent to its post-trade holdings; k is left alone.
///
/// Throws InvalidInput when the fill would make either holding non-positive,
/// which can only happen for a fill that did not come from demand().
[[nodiscard]] AgentState settle(const AgentState& agent, double price_ratio, double fill,
                                const MarketParams& params);

/// Three-branch adaptive rule: sellers scale k by alpha, buyers by beta.
///
/// The caller decides what counts as a zero fill; see is_zero_fill().
[[nodiscard]] double update_ratio(double k, double fill, const MarketParams& params);

/// True when |fill| is round-off relative to the two terms of the demand line.
[[nodiscard]] bool is_zero_fill(const AgentState& agent, double price_ratio, double fill,
                                const MarketParams& params);

/// Clear, settle and update one active set.
[[nodiscard]] TradeOutcome trading_step(std::span<const AgentState> active, const MarketParams& params);

}  // namespace ratiomarket
