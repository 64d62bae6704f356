#include "ratiomarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ratiomarket {

namespace {

void require_valid(const MarketParams& params) {
    if (!params.valid()) {
        throw InvalidInput("market parameters r, alpha, beta must all be positive");
    }
}

void require_valid(const AgentState& agent) {
    if (!agent.valid()) {
        throw InvalidInput("agent state requires k > 0, s > 0, b > 0 (got k=" + std::to_string(agent.k) +
                           ", s=" + std::to_string(agent.s) + ", b=" + std::to_string(agent.b) + ")");
    }
}

}  // namespace

double demand(const AgentState& agent, double price_ratio, const MarketParams& params) {
    return (params.r * agent.k * agent.b - agent.s * price_ratio) / (1.0 + agent.k);
}

double zero_demand_price(const AgentState& agent, const MarketParams& params) {
    return params.r * ((agent.k * agent.b) / agent.s);
}

double clearing_price(std::span<const AgentState> agents, const MarketParams& params) {
    if (agents.empty()) {
        throw InvalidInput("clearing_price needs at least one agent");
    }
    require_valid(params);
    double bond_side = 0.0;
    double stock_side = 0.0;
    for (const auto& a : agents) {
        require_valid(a);
        const double w = 1.0 / (1.0 + a.k);
        bond_side += a.k * a.b * w;
        stock_side += a.s * w;
    }
    return params.r * bond_side / stock_side;
}

AgentState settle(const AgentState& agent, double price_ratio, double fill, const MarketParams& params) {
    AgentState out = agent;
    out.s = price_ratio * agent.s + fill;
    out.b = params.r * agent.b - fill;
    if (!(out.s > 0.0) || !(out.b > 0.0)) {
        throw InvalidInput("fill " + std::to_string(fill) + " leaves non-positive holdings");
    }
    return out;
}

double update_ratio(double k, double fill, const MarketParams& params) {
    if (fill < 0.0) return params.alpha * k;
    if (fill > 0.0) return params.beta * k;
    return k;
}

bool is_zero_fill(const AgentState& agent, double price_ratio, double fill, const MarketParams& params) {
    // Scale of the two terms whose difference is the demand; the round-off in
    // the fill is a few ulps of this.
    const double scale = (params.r * agent.k * agent.b + agent.s * price_ratio) / (1.0 + agent.k);
    return std::abs(fill) <= kZeroFillTolerance * scale;
}

TradeOutcome trading_step(std::span<const AgentState> active, const MarketParams& params) {
    TradeOutcome out;
    out.price_ratio = clearing_price(active, params);  // validates inputs

    double lo = zero_demand_price(active.front(), params);
    double hi = lo;
    for (const auto& a : active.subspan(1)) {
        const double z = zero_demand_price(a, params);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
    }
    out.degenerate = (hi - lo) <= kCoincidentPriceTolerance * lo;
    if (out.degenerate && std::abs(out.price_ratio - params.r) <= kCoincidentPriceTolerance * params.r) {
        out.price_ratio = params.r;
    }

    out.fills.reserve(active.size());
    out.updated.reserve(active.size());
    for (const auto& a : active) {
        const double x = out.degenerate ? 0.0 : demand(a, out.price_ratio, params);
        AgentState next = settle(a, out.price_ratio, x, params);
        // Round-off sized fills still settle, but do not flip the ratio.
        const double signal = is_zero_fill(a, out.price_ratio, x, params) ? 0.0 : x;
        next.k = update_ratio(a.k, signal, params);
        out.fills.push_back(x);
        out.updated.push_back(next);
    }
    return out;
}

}  // namespace ratiomarket
