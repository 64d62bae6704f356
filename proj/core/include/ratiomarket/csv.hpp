#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ratiomarket/engine.hpp"
#include "ratiomarket/statistics.hpp"
#include "ratiomarket/two_agent.hpp"

namespace ratiomarket::csv {

// Column contracts. Consumers (tests, plotting scripts) pin these headers.
inline constexpr std::string_view kMomentsHeader = "period,t_years,mean,variance,skewness,kurtosis";
inline constexpr std::string_view kAcfHeader = "lag,correlation";
inline constexpr std::string_view kHistogramHeader = "bin_left,bin_right,count,empirical_density,lognormal_density";
inline constexpr std::string_view kSummaryHeader =
    "scheme,m_or_mean_m,geometric_mean_return,arithmetic_mean_return,std_return,predicted_rs,ks_distance,"
    "excess_kurtosis_log_returns";
inline constexpr std::string_view kTwoAgentHeader = "period,price,gross_return,rate_stock";
inline constexpr std::string_view kScanHeader = "alpha,beta,extreme,k1,k2,s1,s2,A,A_two_period";
inline constexpr std::string_view kScanSummaryHeader =
    "alpha,beta,alpha_beta,k_points,s_points,min_A,max_A,min_A_two_period,max_A_two_period";
inline constexpr std::string_view kReturnsHeader = "trajectory_index,period,gross_return";

/// Shortest round-trip decimal form; "nan" for an empty optional.
[[nodiscard]] std::string number(double v);
[[nodiscard]] std::string number(const std::optional<double>& v);

struct SummaryRow {
    std::string scheme;
    double m_or_mean_m = 0.0;
    MeanReturnSummary means;
    double predicted_rs = 0.0;
    std::optional<double> ks_distance;
    std::optional<double> excess_kurtosis_log_returns;
};

/// Periods are numbered from 1; t_years = period / periods_per_year.
void write_moments(std::ostream& os, const MomentsOverTime& moments, std::size_t periods_per_year);
void write_acf(std::ostream& os, const AcfResult& acf);
void write_histogram(std::ostream& os, const HistogramWithFit& hist);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_two_agent(std::ostream& os, const TwoAgentPath& path, double rate_stock_value);

struct ScanRow {
    double alpha = 0.0;
    double beta = 0.0;
    ScanSpec spec;
    ScanResult result;
};

void write_scan(std::ostream& os, const std::vector<ScanRow>& rows);
void write_scan_summary(std::ostream& os, const std::vector<ScanRow>& rows);

/// Raw returns, one line per (trajectory, period); periods numbered from 1.
void write_returns(std::ostream& os, const Ensemble& ensemble);

}  // namespace ratiomarket::csv
