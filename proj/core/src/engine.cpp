#include "ratiomarket/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace ratiomarket {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const SelectionScheme& scheme, std::size_t n_agents) {
    std::visit(overloaded{
                   [&](const FixedCount& f) {
                       if (f.m < 1 || f.m > n_agents) {
                           throw InvalidInput("m must lie in [1, n_agents]");
                       }
                   },
                   [&](const UniformCount& u) {
                       if (u.low < 2) throw InvalidInput("m_low must be at least 2");
                       if (u.high < u.low) throw InvalidInput("m_high must be >= m_low");
                       if (u.high > n_agents) throw InvalidInput("m_high must not exceed n_agents");
                   },
                   [&](const BinomialCount& b) {
                       if (b.n != n_agents) throw InvalidInput("binomial n must equal n_agents");
                       if (!(b.p >= 0.0 && b.p <= 1.0)) throw InvalidInput("p must lie in [0, 1]");
                   },
               },
               scheme);
}

double mean_active(const SelectionScheme& scheme) {
    return std::visit(overloaded{
                          [](const FixedCount& f) { return static_cast<double>(f.m); },
                          [](const UniformCount& u) { return 0.5 * static_cast<double>(u.low + u.high); },
                          [](const BinomialCount& b) { return static_cast<double>(b.n) * b.p; },
                      },
                      scheme);
}

std::string scheme_name(const SelectionScheme& scheme) {
    return std::visit(overloaded{
                          [](const FixedCount&) { return std::string("fixed"); },
                          [](const UniformCount&) { return std::string("uniform"); },
                          [](const BinomialCount&) { return std::string("binomial"); },
                      },
                      scheme);
}

void InitSpec::validate() const {
    if (!(k_low > 0.0)) throw InvalidInput("k_low must be positive");
    if (!(k_high >= k_low)) throw InvalidInput("k_high must be >= k_low");
    if (!(b0 > 0.0)) throw InvalidInput("b0 must be positive");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in [0, 1)");
}

void SimulationConfig::validate() const {
    if (n_agents < 1) throw InvalidInput("n_agents must be positive");
    if (!(params.r > 0.0)) throw InvalidInput("r must be positive");
    if (!(params.alpha > 0.0)) throw InvalidInput("alpha must be positive");
    if (!(params.beta > 0.0)) throw InvalidInput("beta must be positive");
    if (periods_per_year < 1) throw InvalidInput("periods_per_year must be positive");
    if (!(years > 0.0)) throw InvalidInput("years must be positive");
    if (!(burn_in_years >= 0.0 && burn_in_years < years)) {
        throw InvalidInput("burn_in_years must lie in [0, years)");
    }
    if (total_periods() < 1) throw InvalidInput("years * periods_per_year must be at least one period");
    if (n_trajectories < 1) throw InvalidInput("trajectories must be positive");
    ratiomarket::validate(scheme, n_agents);
    init.validate();
}

std::size_t SimulationConfig::total_periods() const {
    return static_cast<std::size_t>(std::llround(years * static_cast<double>(periods_per_year)));
}

std::size_t SimulationConfig::burn_in_periods() const {
    return static_cast<std::size_t>(std::llround(burn_in_years * static_cast<double>(periods_per_year)));
}

std::vector<AgentState> init_population(std::size_t n_agents, const InitSpec& init, CounterStream& stream) {
    init.validate();
    std::vector<AgentState> agents(n_agents);
    for (auto& a : agents) {
        const double k_star = init.k_low == init.k_high ? init.k_low : stream.uniform(init.k_low, init.k_high);
        a.b = init.b0;
        a.s = k_star * init.b0;
        const double delta = init.epsilon > 0.0 ? stream.uniform(-init.epsilon, init.epsilon) : 0.0;
        a.k = k_star * (1.0 + delta);
    }
    return agents;
}

ActiveSetSampler::ActiveSetSampler(SelectionScheme scheme, std::size_t n_agents)
    : scheme_(scheme), perm_(n_agents) {
    ratiomarket::validate(scheme_, n_agents);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    picked_.reserve(n_agents);
}

std::span<const std::size_t> ActiveSetSampler::draw_subset(std::size_t m, CounterStream& stream) {
    // Partial Fisher-Yates: the first m slots form a uniform m-subset whatever
    // order the buffer was left in by the previous draw.
    const std::size_t n = perm_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(stream.below(n - i));
        std::swap(perm_[i], perm_[j]);
    }
    return {perm_.data(), m};
}

std::span<const std::size_t> ActiveSetSampler::draw(CounterStream& stream) {
    return std::visit(
        overloaded{
            [&](const FixedCount& f) { return draw_subset(f.m, stream); },
            [&](const UniformCount& u) {
                const auto m = u.low + static_cast<std::size_t>(stream.below(u.high - u.low + 1));
                return draw_subset(m, stream);
            },
            [&](const BinomialCount& b) -> std::span<const std::size_t> {
                picked_.clear();
                const std::size_t n = perm_.size();
                if (b.p >= 1.0) {
                    for (std::size_t i = 0; i < n; ++i) picked_.push_back(i);
                } else if (b.p > 0.0) {
                    // Geometric gaps between successive members.
                    const double log_q = std::log1p(-b.p);
                    std::size_t i = 0;
                    while (true) {
                        const double gap = std::floor(std::log1p(-stream.uniform()) / log_q);
                        if (gap >= static_cast<double>(n - i)) break;
                        i += static_cast<std::size_t>(gap);
                        picked_.push_back(i);
                        ++i;
                        if (i >= n) break;
                    }
                }
                return picked_;
            },
        },
        scheme_);
}

std::vector<std::size_t> select_active(const SelectionScheme& scheme, std::size_t n_agents, CounterStream& stream) {
    ActiveSetSampler sampler(scheme, n_agents);
    const auto picked = sampler.draw(stream);
    return {picked.begin(), picked.end()};
}

MarketSimulation::MarketSimulation(const SimulationConfig& config, std::uint64_t trajectory_index)
    : params_(config.params),
      stream_(CounterStream::for_substream(config.master_seed, trajectory_index)),
      sampler_(config.scheme, config.n_agents) {
    const auto agents = init_population(config.n_agents, config.init, stream_);
    k_.reserve(agents.size());
    shares_.reserve(agents.size());
    bond_units_.reserve(agents.size());
    for (const auto& a : agents) {
        k_.push_back(a.k);
        shares_.push_back(a.s);
        bond_units_.push_back(a.b);
    }
    times_active_.assign(agents.size(), 0);
    scratch_.reserve(agents.size());
}

AgentState MarketSimulation::agent(std::size_t i) const {
    return {k_[i], shares_[i] * price_level_, bond_units_[i] * bond_level_};
}

std::vector<AgentState> MarketSimulation::population() const {
    std::vector<AgentState> out;
    out.reserve(k_.size());
    for (std::size_t i = 0; i < k_.size(); ++i) out.push_back(agent(i));
    return out;
}

double MarketSimulation::step() {
    const auto active = sampler_.draw(stream_);
    last_active_count_ = active.size();
    ++period_;

    if (active.empty()) {
        price_level_ *= params_.r;
        bond_level_ *= params_.r;
        return params_.r;
    }

    scratch_.clear();
    for (std::size_t i : active) scratch_.push_back(agent(i));
    const TradeOutcome outcome = trading_step(scratch_, params_);

    const double ret = outcome.price_ratio;
    if (!std::isfinite(ret) || !(ret > 0.0)) {
        std::ostringstream msg;
        msg << "non-positive or non-finite return " << ret << " at period " << period_;
        throw NumericalFailure(msg.str());
    }
    price_level_ *= ret;
    bond_level_ *= params_.r;
    for (std::size_t j = 0; j < active.size(); ++j) {
        const std::size_t i = active[j];
        const AgentState& next = outcome.updated[j];
        k_[i] = next.k;
        shares_[i] = next.s / price_level_;
        bond_units_[i] = next.b / bond_level_;
        ++times_active_[i];
    }
    return ret;
}

ReturnsSeries simulate_trajectory(const SimulationConfig& config, std::uint64_t trajectory_index) {
    config.validate();
    MarketSimulation sim(config, trajectory_index);
    ReturnsSeries out;
    out.trajectory_index = trajectory_index;
    out.stream_key = CounterStream::for_substream(config.master_seed, trajectory_index).key();
    const std::size_t n = config.total_periods();
    out.returns.reserve(n);
    for (std::size_t t = 0; t < n; ++t) out.returns.push_back(sim.step());
    return out;
}

Ensemble::Ensemble(std::size_t n_trajectories, std::size_t n_periods)
    : n_trajectories_(n_trajectories), n_periods_(n_periods), data_(n_trajectories * n_periods) {}

Ensemble Ensemble::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    Ensemble out(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) throw InvalidInput("ensemble rows must have equal length");
        std::copy(rows[i].begin(), rows[i].end(), out.trajectory(i).begin());
    }
    return out;
}

Ensemble simulate_ensemble(const SimulationConfig& config, unsigned workers) {
    config.validate();
    const std::size_t n_periods = config.total_periods();
    Ensemble out(config.n_trajectories, n_periods);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.n_trajectories) return;
            try {
                MarketSimulation sim(config, i);
                auto row = out.trajectory(i);
                for (std::size_t t = 0; t < n_periods; ++t) row[t] = sim.step();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(config.n_trajectories);
                return;
            }
        }
    };

    const unsigned n_workers = std::max(1u, workers);
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

double rate_stock_n(const MarketParams& params, double m, std::size_t n_agents) {
    if (!params.valid()) throw InvalidInput("market parameters must be positive");
    if (n_agents < 1) throw InvalidInput("n_agents must be positive");
    if (!(m > 0.0) || m > static_cast<double>(n_agents)) throw InvalidInput("m must lie in (0, n_agents]");
    return params.r * std::pow(params.alpha * params.beta, m / (2.0 * static_cast<double>(n_agents)));
}

}  // namespace ratiomarket
