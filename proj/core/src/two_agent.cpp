#include "ratiomarket/two_agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace ratiomarket {

void TwoAgentConfig::validate() const {
    auto check = [](bool ok, const char* field) {
        if (!ok) throw InvalidInput(std::string(field) + " must be positive");
    };
    check(agent1.k > 0.0, "k1");
    check(agent1.s > 0.0, "s1");
    check(agent1.b > 0.0, "b1");
    check(agent2.k > 0.0, "k2");
    check(agent2.s > 0.0, "s2");
    check(agent2.b > 0.0, "b2");
    check(params.r > 0.0, "r");
    check(params.alpha > 0.0, "alpha");
    check(params.beta > 0.0, "beta");
    check(n_periods >= 1, "n_periods");
    check(p0 > 0.0, "p0");
}

TwoAgentPath iterate_two_agent(const TwoAgentConfig& config) {
    config.validate();
    TwoAgentPath path;
    path.prices.reserve(config.n_periods);
    path.returns.reserve(config.n_periods);

    std::array<AgentState, 2> agents{config.agent1, config.agent2};
    double price = config.p0;
    for (std::size_t n = 0; n < config.n_periods; ++n) {
        const TradeOutcome step = trading_step(agents, config.params);
        agents = {step.updated[0], step.updated[1]};
        price *= step.price_ratio;
        path.prices.push_back(price);
        path.returns.push_back(step.price_ratio);
    }
    path.final_agents = agents;
    return path;
}

double rate_stock(const MarketParams& params) {
    return params.r * std::sqrt(params.alpha * params.beta);
}

double amplification_A(double k1, double k2, double s1, double s2, double alpha, double beta, double r) {
    // First period: ratios alpha*k1 (buyer) and beta*k2 (seller), balanced
    // holdings b_i = s_i / k_i.
    const double d1 = 1.0 + alpha * k1;
    const double d2 = 1.0 + beta * k2;
    const double first = r * (alpha * s1 / d1 + beta * s2 / d2) / (s1 / d1 + s2 / d2);

    const double x1 = (r * alpha * s1 - s1 * first) / d1;
    const double s1_hat = first * s1 + x1;
    const double s2_hat = first * s2 - x1;

    // Second period: agent 1 now sells (beta applied after buying), agent 2 buys.
    const double e1 = 1.0 + beta * alpha * k1;
    const double e2 = 1.0 + alpha * beta * k2;
    const double second = r * (beta * s1_hat / e1 + alpha * s2_hat / e2) / (s1_hat / e1 + s2_hat / e2);

    return std::sqrt(first * second) / r;
}

void ScanSpec::validate() const {
    if (!(k_range.lo > 0.0) || !(k_range.hi >= k_range.lo)) {
        throw InvalidInput("k range must satisfy 0 < k_min <= k_max");
    }
    if (!(s_range.lo > 0.0) || !(s_range.hi >= s_range.lo)) {
        throw InvalidInput("s range must satisfy 0 < s_min <= s_max");
    }
    if (k_points < 2) throw InvalidInput("k_points must be at least 2");
    if (s_points < 2) throw InvalidInput("s_points must be at least 2");
    if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
    if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
}

ScanSpec ScanSpec::refined() const {
    ScanSpec out = *this;
    out.k_points = 2 * k_points - 1;
    out.s_points = 2 * s_points - 1;
    return out;
}

std::vector<double> k_axis(const ScanSpec& spec) {
    std::vector<double> axis(spec.k_points);
    const double lo = std::log(spec.k_range.lo);
    const double hi = std::log(spec.k_range.hi);
    const double last = static_cast<double>(spec.k_points - 1);
    for (std::size_t i = 0; i < spec.k_points; ++i) {
        axis[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / last);
    }
    axis.front() = spec.k_range.lo;
    axis.back() = spec.k_range.hi;
    return axis;
}

std::vector<double> s_axis(const ScanSpec& spec) {
    std::vector<double> axis(spec.s_points);
    const double last = static_cast<double>(spec.s_points - 1);
    for (std::size_t i = 0; i < spec.s_points; ++i) {
        axis[i] = spec.s_range.lo + (spec.s_range.hi - spec.s_range.lo) * static_cast<double>(i) / last;
    }
    axis.back() = spec.s_range.hi;
    return axis;
}

namespace {

// Candidate comparison: smaller value wins, ties go to the smaller point.
bool better_min(double v, const ScanPoint& p, double best, const ScanPoint& best_p) {
    return v < best || (v == best && p < best_p);
}

bool better_max(double v, const ScanPoint& p, double best, const ScanPoint& best_p) {
    return v > best || (v == best && p < best_p);
}

ScanResult scan_rows(const ScanSpec& spec, double r, const std::vector<double>& ks,
                     const std::vector<double>& ss, std::size_t row_begin, std::size_t row_end) {
    ScanResult out;
    bool first = true;
    for (std::size_t i = row_begin; i < row_end; ++i) {
        for (double k2 : ks) {
            for (double s1 : ss) {
                for (double s2 : ss) {
                    const ScanPoint p{ks[i], k2, s1, s2};
                    const double a = amplification_A(p[0], p[1], p[2], p[3], spec.alpha, spec.beta, r);
                    ++out.evaluations;
                    if (first) {
                        out.min_a = out.max_a = a;
                        out.argmin = out.argmax = p;
                        first = false;
                        continue;
                    }
                    if (better_min(a, p, out.min_a, out.argmin)) {
                        out.min_a = a;
                        out.argmin = p;
                    }
                    if (better_max(a, p, out.max_a, out.argmax)) {
                        out.max_a = a;
                        out.argmax = p;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

ScanResult scan_A(const ScanSpec& spec, double r, unsigned workers) {
    spec.validate();
    if (!(r > 0.0)) throw InvalidInput("r must be positive");
    const auto ks = k_axis(spec);
    const auto ss = s_axis(spec);

    const std::size_t rows = ks.size();
    const std::size_t n_chunks = std::clamp<std::size_t>(workers, 1, rows);
    std::vector<ScanResult> partial(n_chunks);
    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = rows * c / n_chunks;
        const std::size_t end = rows * (c + 1) / n_chunks;
        partial[c] = scan_rows(spec, r, ks, ss, begin, end);
    };
    if (n_chunks == 1) {
        run_chunk(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t c = 0; c < n_chunks; ++c) pool.emplace_back(run_chunk, c);
    }

    ScanResult out = partial.front();
    for (std::size_t c = 1; c < n_chunks; ++c) {
        const ScanResult& p = partial[c];
        out.evaluations += p.evaluations;
        if (better_min(p.min_a, p.argmin, out.min_a, out.argmin)) {
            out.min_a = p.min_a;
            out.argmin = p.argmin;
        }
        if (better_max(p.max_a, p.argmax, out.max_a, out.argmax)) {
            out.max_a = p.max_a;
            out.argmax = p.argmax;
        }
    }
    return out;
}

}  // namespace ratiomarket
