#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config_file.hpp"

namespace ratiomarket::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,  // I/O and other non-numerical failures
    kConfigError = 2,
    kNumericalFailure = 3,
};

struct TwoAgentOptions {
    double k1 = 0.0, s1 = 0.0, b1 = 0.0;
    double k2 = 0.0, s2 = 0.0, b2 = 0.0;
    double r = 0.0, alpha = 0.0, beta = 0.0;
    std::size_t n_periods = 0;
    double p0 = 1.0;
    std::size_t transient = 100;  // periods skipped in the printed geometric mean
    std::string out = ".";

    [[nodiscard]] KeyValues resolved() const;
};

struct ScanOptions {
    std::string alpha;  // comma separated, paired with beta
    std::string beta;
    double k_min = 0.01, k_max = 100.0;
    double s_min = 1.0, s_max = 100.0;
    std::size_t k_points = 5, s_points = 5;
    double r = 1.0;
    bool refine = false;
    unsigned workers = 1;
    std::string out = ".";

    [[nodiscard]] KeyValues resolved() const;
};

struct SimulateOptions {
    std::size_t n_agents = 500;
    double r = 1.001, alpha = 4.0, beta = 0.3;
    std::string scheme = "fixed";
    std::size_t m = 40;
    std::size_t m_low = 2, m_high = 79;
    double p = 0.1;
    std::size_t periods_per_year = 200;
    double years = 4.0;
    double burn_in_years = 2.0;
    std::size_t trajectories = 2000;
    std::uint64_t seed = 20240601;
    double k_low = 0.2, k_high = 1.0, b0 = 10.0, epsilon = 0.02;
    std::size_t acf_base_period = 0;  // 1-based; 0 means first period after burn-in
    std::size_t acf_max_lag = 50;
    std::size_t n_bins = 0;  // 0 selects Freedman-Diaconis
    bool dump_returns = false;
    bool paper_scale = false;
    unsigned workers = 1;
    std::string out = ".";

    [[nodiscard]] KeyValues resolved() const;
};

int run_two_agent(const TwoAgentOptions& opts, std::ostream& log);
int run_scan(const ScanOptions& opts, std::ostream& log);
int run_simulate(const SimulateOptions& opts, std::ostream& log);

/// Entry point shared by main() and tests: `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratiomarket::cli
