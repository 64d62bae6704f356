#include "cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratiomarket/csv.hpp"
#include "ratiomarket/engine.hpp"
#include "ratiomarket/statistics.hpp"
#include "ratiomarket/two_agent.hpp"

#ifndef RATIOMARKET_VERSION
#define RATIOMARKET_VERSION "unknown"
#endif

namespace ratiomarket::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return csv::number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out + "': " + ec.message());
    return dir;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    writer(os);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

struct ManifestInfo {
    std::string command;
    KeyValues config;
    std::optional<std::uint64_t> seed;
    std::string started;
    std::vector<std::string> outputs;
};

// Written to a temporary name and renamed, so a manifest only exists for a
// finished run.
void write_manifest(const fs::path& dir, const ManifestInfo& info) {
    nlohmann::ordered_json j;
    j["tool"] = "ratiomarket";
    j["version"] = RATIOMARKET_VERSION;
    j["command"] = info.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : info.config) cfg[k] = v;
    j["config"] = cfg;
    if (info.seed) j["master_seed"] = *info.seed;
    j["started_utc"] = info.started;
    j["finished_utc"] = utc_now();
    j["outputs"] = info.outputs;

    const fs::path tmp = dir / "manifest.json.tmp";
    write_file(tmp, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    fs::rename(tmp, dir / "manifest.json");
}

std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(field) + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(std::string(field) + ": empty list");
    return out;
}

double geometric_mean(const std::vector<double>& v, std::size_t from) {
    double acc = 0.0;
    for (std::size_t i = from; i < v.size(); ++i) acc += std::log(v[i]);
    return std::exp(acc / static_cast<double>(v.size() - from));
}

}  // namespace

KeyValues TwoAgentOptions::resolved() const {
    return {{"k1", num(k1)},       {"s1", num(s1)},          {"b1", num(b1)},       {"k2", num(k2)},
            {"s2", num(s2)},       {"b2", num(b2)},          {"r", num(r)},         {"alpha", num(alpha)},
            {"beta", num(beta)},   {"n_periods", num(n_periods)}, {"p0", num(p0)}, {"transient", num(transient)},
            {"out", out}};
}

KeyValues ScanOptions::resolved() const {
    return {{"alpha", alpha},           {"beta", beta},       {"k_min", num(k_min)},
            {"k_max", num(k_max)},      {"s_min", num(s_min)}, {"s_max", num(s_max)},
            {"k_points", num(k_points)}, {"s_points", num(s_points)}, {"r", num(r)},
            {"refine", flag(refine)},   {"workers", num(static_cast<std::size_t>(workers))}, {"out", out}};
}

KeyValues SimulateOptions::resolved() const {
    return {{"n_agents", num(n_agents)},
            {"r", num(r)},
            {"alpha", num(alpha)},
            {"beta", num(beta)},
            {"scheme", scheme},
            {"m", num(m)},
            {"m_low", num(m_low)},
            {"m_high", num(m_high)},
            {"p", num(p)},
            {"periods_per_year", num(periods_per_year)},
            {"years", num(years)},
            {"burn_in_years", num(burn_in_years)},
            {"trajectories", num(trajectories)},
            {"seed", std::to_string(seed)},
            {"k_low", num(k_low)},
            {"k_high", num(k_high)},
            {"b0", num(b0)},
            {"epsilon", num(epsilon)},
            {"acf_base_period", num(acf_base_period)},
            {"acf_max_lag", num(acf_max_lag)},
            {"n_bins", num(n_bins)},
            {"dump_returns", flag(dump_returns)},
            {"workers", num(static_cast<std::size_t>(workers))},
            {"out", out}};
}

int run_two_agent(const TwoAgentOptions& opts, std::ostream& log) {
    const std::string started = utc_now();
    TwoAgentConfig cfg;
    cfg.agent1 = {opts.k1, opts.s1, opts.b1};
    cfg.agent2 = {opts.k2, opts.s2, opts.b2};
    cfg.params = {opts.r, opts.alpha, opts.beta};
    cfg.n_periods = opts.n_periods;
    cfg.p0 = opts.p0;
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }

    const TwoAgentPath path = iterate_two_agent(cfg);
    for (double ret : path.returns) {
        if (!std::isfinite(ret) || !(ret > 0.0)) throw NumericalFailure("two-agent iteration produced an invalid return");
    }
    const double rs = rate_stock(cfg.params);

    const fs::path dir = prepare_out_dir(opts.out);
    write_file(dir / "two_agent.csv", [&](std::ostream& os) { csv::write_two_agent(os, path, rs); });
    write_manifest(dir, {"two-agent", opts.resolved(), std::nullopt, started, {"two_agent.csv"}});

    const std::size_t skip = opts.transient < path.returns.size() ? opts.transient : 0;
    log << "two-agent: " << path.returns.size() << " periods, geometric mean return after period " << skip
        << " = " << num(geometric_mean(path.returns, skip)) << ", rate_stock = " << num(rs) << '\n';
    return kOk;
}

int run_scan(const ScanOptions& opts, std::ostream& log) {
    const std::string started = utc_now();
    const auto alphas = parse_list(opts.alpha, "alpha");
    const auto betas = parse_list(opts.beta, "beta");
    if (alphas.size() != betas.size()) throw ConfigError("alpha and beta lists must have the same length");
    if (!(opts.r > 0.0)) throw ConfigError("r must be positive");

    std::vector<csv::ScanRow> rows;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        ScanSpec spec;
        spec.k_range = {opts.k_min, opts.k_max};
        spec.s_range = {opts.s_min, opts.s_max};
        spec.k_points = opts.k_points;
        spec.s_points = opts.s_points;
        spec.alpha = alphas[i];
        spec.beta = betas[i];
        if (opts.refine) spec = spec.refined();
        try {
            spec.validate();
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
        rows.push_back({alphas[i], betas[i], spec, scan_A(spec, opts.r, opts.workers)});
    }

    const fs::path dir = prepare_out_dir(opts.out);
    write_file(dir / "scan.csv", [&](std::ostream& os) { csv::write_scan(os, rows); });
    write_file(dir / "scan_summary.csv", [&](std::ostream& os) { csv::write_scan_summary(os, rows); });
    write_manifest(dir, {"scan-a", opts.resolved(), std::nullopt, started, {"scan.csv", "scan_summary.csv"}});

    for (const auto& row : rows) {
        log << "scan-a alpha=" << num(row.alpha) << " beta=" << num(row.beta) << ": A in [" << num(row.result.min_a)
            << ", " << num(row.result.max_a) << "], two-period [" << num(row.result.min_two_period()) << ", "
            << num(row.result.max_two_period()) << "]\n";
    }
    return kOk;
}

int run_simulate(const SimulateOptions& opts, std::ostream& log) {
    const std::string started = utc_now();
    SimulationConfig cfg;
    cfg.n_agents = opts.n_agents;
    cfg.params = {opts.r, opts.alpha, opts.beta};
    if (opts.scheme == "fixed") {
        cfg.scheme = FixedCount{opts.m};
    } else if (opts.scheme == "uniform") {
        cfg.scheme = UniformCount{opts.m_low, opts.m_high};
    } else if (opts.scheme == "binomial") {
        cfg.scheme = BinomialCount{opts.n_agents, opts.p};
    } else {
        throw ConfigError("scheme must be one of fixed, uniform, binomial (got '" + opts.scheme + "')");
    }
    cfg.periods_per_year = opts.periods_per_year;
    cfg.years = opts.years;
    cfg.burn_in_years = opts.burn_in_years;
    cfg.n_trajectories = opts.trajectories;
    cfg.master_seed = opts.seed;
    cfg.init = {opts.k_low, opts.k_high, opts.b0, opts.epsilon};
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    const std::size_t burn_in = cfg.burn_in_periods();
    const std::size_t base = opts.acf_base_period == 0 ? burn_in : opts.acf_base_period - 1;
    if (base + opts.acf_max_lag >= cfg.total_periods()) {
        throw ConfigError("acf_base_period + acf_max_lag runs past the last period");
    }
    if (opts.n_bins == 1) throw ConfigError("n_bins must be at least 2 (or 0 for automatic)");
    if (cfg.n_trajectories < 4) throw ConfigError("trajectories must be at least 4 for the moment statistics");

    const Ensemble ensemble = simulate_ensemble(cfg, opts.workers);

    const MomentsOverTime moments = moments_over_time(ensemble);
    const StationarityReport trend = stationarity(moments, burn_in);
    const AcfResult acf = ensemble_acf(ensemble, base, opts.acf_max_lag);
    const HistogramWithFit hist =
        pooled_histogram(ensemble, burn_in, opts.n_bins == 0 ? std::nullopt : std::optional(opts.n_bins));
    const MeanReturnSummary means = mean_return_summary(ensemble, burn_in);
    const double mean_m = mean_active(cfg.scheme);

    csv::SummaryRow row;
    row.scheme = scheme_name(cfg.scheme);
    row.m_or_mean_m = mean_m;
    row.means = means;
    row.predicted_rs = rate_stock_n(cfg.params, mean_m > 0.0 ? mean_m : 1e-300, cfg.n_agents);
    row.ks_distance = hist.ks_distance;
    row.excess_kurtosis_log_returns = hist.excess_kurtosis_log;

    const fs::path dir = prepare_out_dir(opts.out);
    std::vector<std::string> outputs{"moments.csv", "acf.csv", "hist.csv", "summary.csv"};
    write_file(dir / "moments.csv", [&](std::ostream& os) { csv::write_moments(os, moments, cfg.periods_per_year); });
    write_file(dir / "acf.csv", [&](std::ostream& os) { csv::write_acf(os, acf); });
    write_file(dir / "hist.csv", [&](std::ostream& os) { csv::write_histogram(os, hist); });
    write_file(dir / "summary.csv", [&](std::ostream& os) { csv::write_summary(os, {row}); });
    if (opts.dump_returns) {
        write_file(dir / "returns.csv", [&](std::ostream& os) { csv::write_returns(os, ensemble); });
        outputs.emplace_back("returns.csv");
    }
    write_manifest(dir, {"simulate", opts.resolved(), cfg.master_seed, started, outputs});

    if (!trend.stationary()) {
        log << "warning: post-burn-in moments show a trend (mean slope " << num(trend.mean.slope) << " +/- "
            << num(trend.mean.std_error) << ", variance slope " << num(trend.variance.slope) << " +/- "
            << num(trend.variance.std_error) << "); pooled statistics assume stationarity\n";
    }
    log << "simulate " << row.scheme << " m=" << num(mean_m) << ": geometric mean " << num(means.geometric_mean)
        << " (predicted " << num(row.predicted_rs) << "), arithmetic mean " << num(means.arithmetic_mean)
        << ", KS " << csv::number(hist.ks_distance) << ", excess kurtosis(log R) "
        << csv::number(hist.excess_kurtosis_log) << '\n';
    return kOk;
}

namespace {

void set_defaults(CLI::App& app) {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive stock-to-bond ratio market simulator", "ratiomarket"};
    app.set_version_flag("--version", RATIOMARKET_VERSION);
    app.require_subcommand(1);
    set_defaults(app);

    std::string config_path;

    TwoAgentOptions two;
    auto* two_cmd = app.add_subcommand("two-agent", "Iterate the deterministic two-agent market");
    set_defaults(*two_cmd);
    two_cmd->add_option("--config", config_path, "key = value config file or a previous run's manifest.json");
    two_cmd->add_option("--k1", two.k1, "agent 1 target ratio")->required();
    two_cmd->add_option("--s1", two.s1, "agent 1 stock dollars")->required();
    two_cmd->add_option("--b1", two.b1, "agent 1 bond dollars")->required();
    two_cmd->add_option("--k2", two.k2, "agent 2 target ratio")->required();
    two_cmd->add_option("--s2", two.s2, "agent 2 stock dollars")->required();
    two_cmd->add_option("--b2", two.b2, "agent 2 bond dollars")->required();
    two_cmd->add_option("--r", two.r, "gross bond return per period")->required();
    two_cmd->add_option("--alpha", two.alpha, "seller ratio multiplier")->required();
    two_cmd->add_option("--beta", two.beta, "buyer ratio multiplier")->required();
    two_cmd->add_option("--n_periods", two.n_periods, "number of trading periods")->required();
    two_cmd->add_option("--p0", two.p0, "initial price")->capture_default_str();
    two_cmd->add_option("--transient", two.transient, "periods skipped in the printed mean")->capture_default_str();
    two_cmd->add_option("--out", two.out, "output directory")->capture_default_str();

    ScanOptions scan;
    auto* scan_cmd = app.add_subcommand("scan-a", "Grid scan of the two-period amplification function");
    set_defaults(*scan_cmd);
    scan_cmd->add_option("--config", config_path, "key = value config file or a previous run's manifest.json");
    scan_cmd->add_option("--alpha", scan.alpha, "comma separated alpha values")->required();
    scan_cmd->add_option("--beta", scan.beta, "comma separated beta values, paired with alpha")->required();
    scan_cmd->add_option("--k_min", scan.k_min)->capture_default_str();
    scan_cmd->add_option("--k_max", scan.k_max)->capture_default_str();
    scan_cmd->add_option("--s_min", scan.s_min)->capture_default_str();
    scan_cmd->add_option("--s_max", scan.s_max)->capture_default_str();
    scan_cmd->add_option("--k_points", scan.k_points, "log-spaced nodes per k axis")->capture_default_str();
    scan_cmd->add_option("--s_points", scan.s_points, "uniform nodes per s axis")->capture_default_str();
    scan_cmd->add_option("--r", scan.r)->capture_default_str();
    scan_cmd->add_flag("--refine", scan.refine, "halve the grid spacing on every axis");
    scan_cmd->add_option("--workers", scan.workers)->capture_default_str();
    scan_cmd->add_option("--out", scan.out)->capture_default_str();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo ensemble of the N-agent market plus statistics");
    set_defaults(*sim_cmd);
    sim_cmd->add_option("--config", config_path, "key = value config file or a previous run's manifest.json");
    sim_cmd->add_option("--n_agents", sim.n_agents)->capture_default_str();
    sim_cmd->add_option("--r", sim.r)->capture_default_str();
    sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
    sim_cmd->add_option("--beta", sim.beta)->capture_default_str();
    sim_cmd->add_option("--scheme", sim.scheme, "fixed | uniform | binomial")->capture_default_str();
    sim_cmd->add_option("--m", sim.m, "active agents per period (fixed)")->capture_default_str();
    sim_cmd->add_option("--m_low", sim.m_low, "smallest m (uniform)")->capture_default_str();
    sim_cmd->add_option("--m_high", sim.m_high, "largest m (uniform)")->capture_default_str();
    sim_cmd->add_option("--p", sim.p, "participation probability (binomial)")->capture_default_str();
    sim_cmd->add_option("--periods_per_year", sim.periods_per_year)->capture_default_str();
    auto* years_opt = sim_cmd->add_option("--years", sim.years)->capture_default_str();
    sim_cmd->add_option("--burn_in_years", sim.burn_in_years)->capture_default_str();
    auto* traj_opt =
        sim_cmd->add_option("--trajectories,--n_trajectories", sim.trajectories)->capture_default_str();
    sim_cmd->add_option("--seed,--master_seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--k_low", sim.k_low)->capture_default_str();
    sim_cmd->add_option("--k_high", sim.k_high)->capture_default_str();
    sim_cmd->add_option("--b0", sim.b0)->capture_default_str();
    sim_cmd->add_option("--epsilon", sim.epsilon)->capture_default_str();
    sim_cmd->add_option("--acf_base_period", sim.acf_base_period, "1-based; 0 = first period after burn-in")
        ->capture_default_str();
    sim_cmd->add_option("--acf_max_lag", sim.acf_max_lag)->capture_default_str();
    sim_cmd->add_option("--n_bins", sim.n_bins, "histogram bins; 0 = Freedman-Diaconis")->capture_default_str();
    sim_cmd->add_flag("--dump-returns,--dump_returns", sim.dump_returns, "also write returns.csv");
    sim_cmd->add_flag("--paper-scale,--paper_scale", sim.paper_scale,
                      "200000 trajectories over 10 years unless given explicitly");
    sim_cmd->add_option("--workers", sim.workers, "worker threads; never changes the output")->capture_default_str();
    sim_cmd->add_option("--out", sim.out)->capture_default_str();

    try {
        std::vector<std::string> argv_tokens{"ratiomarket"};
        if (!args.empty()) {
            argv_tokens.push_back(args.front());
            const std::string config = find_config_argument(args);
            if (!config.empty() && args.front().rfind("-", 0) != 0) {
                const auto extra = to_arguments(
                    load_config(config), {"refine", "dump_returns", "dump-returns", "paper_scale", "paper-scale"});
                argv_tokens.insert(argv_tokens.end(), extra.begin(), extra.end());
            }
            argv_tokens.insert(argv_tokens.end(), args.begin() + 1, args.end());
        }
        std::vector<char*> argv;
        argv.reserve(argv_tokens.size());
        for (auto& t : argv_tokens) argv.push_back(t.data());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << RATIOMARKET_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    if (sim.paper_scale) {
        if (traj_opt->count() == 0) sim.trajectories = 200000;
        if (years_opt->count() == 0) sim.years = 10.0;
    }

    try {
        if (two_cmd->parsed()) return run_two_agent(two, out);
        if (scan_cmd->parsed()) return run_scan(scan, out);
        if (sim_cmd->parsed()) return run_simulate(sim, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidInput& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}

}  // namespace ratiomarket::cli
