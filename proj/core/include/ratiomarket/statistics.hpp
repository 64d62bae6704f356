#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ratiomarket/engine.hpp"

namespace ratiomarket {

/// Cross-trajectory moments of R_n for one period.
///
/// Central moments use the 1/n normalisation. Skewness is m3 / m2^1.5 and
/// kurtosis is the raw standardised fourth moment m4 / m2^2 (3 for a
/// Gaussian). Both are empty when the period has zero spread.
struct PeriodMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
};

struct MomentsOverTime {
    std::vector<PeriodMoments> periods;
};

struct AcfResult {
    std::size_t base_period = 0;
    /// correlation[tau] for tau = 0..max_lag; empty where a period has no spread.
    std::vector<std::optional<double>> correlation;
};

struct LognormalParams {
    double mu = 0.0;
    double sigma = 0.0;

    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double cdf(double x) const;
};

struct HistogramWithFit {
    std::vector<double> edges;  ///< n_bins + 1 edges; the last bin is closed on the right
    std::vector<std::size_t> counts;
    std::vector<double> empirical_density;
    std::vector<double> lognormal_density;  ///< fitted density at bin centres (0 when no fit)
    std::size_t sample_size = 0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    std::optional<LognormalParams> fit;
    std::optional<double> ks_distance;
    std::optional<double> excess_kurtosis_log;
};

struct MeanReturnSummary {
    double geometric_mean = 0.0;
    double arithmetic_mean = 0.0;
    double std_dev = 0.0;
    std::size_t sample_size = 0;
};

/// Least-squares slope of y against its index, with its standard error.
struct TrendTest {
    double slope = 0.0;
    double std_error = 0.0;
    /// |slope| < 2 standard errors (a zero-residual constant series counts as flat).
    [[nodiscard]] bool flat() const { return std_error > 0.0 ? std::abs(slope) < 2.0 * std_error : slope == 0.0; }
};

struct StationarityReport {
    TrendTest mean;
    TrendTest variance;
    [[nodiscard]] bool stationary() const { return mean.flat() && variance.flat(); }
};

[[nodiscard]] MomentsOverTime moments_over_time(const Ensemble& ensemble);

/// Pearson correlation across trajectories of (log R_n0, log R_{n0+tau}).
[[nodiscard]] AcfResult ensemble_acf(const Ensemble& ensemble, std::size_t base_period, std::size_t max_lag);

/// Log-normal with the given mean and variance.
[[nodiscard]] LognormalParams lognormal_match(double mean, double variance);

/// Freedman-Diaconis bin count for a sorted sample, clamped to [2, max_bins].
[[nodiscard]] std::size_t freedman_diaconis_bins(std::span<const double> sorted, std::size_t max_bins = 400);

/// Sup distance between the empirical CDF of `sorted` and `cdf`.
template <class Cdf>
[[nodiscard]] double ks_distance(std::span<const double> sorted, Cdf&& cdf) {
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(i + 1) / n;
        d = std::max({d, f - below, above - f});
    }
    return d;
}

/// m4 / m2^2 - 3; empty when the sample has no spread.
[[nodiscard]] std::optional<double> excess_kurtosis(std::span<const double> sample);

/// All returns from period `burn_in_period` onward, trajectory by trajectory.
[[nodiscard]] std::vector<double> pooled_returns(const Ensemble& ensemble, std::size_t burn_in_period);

/// Histogram of pooled post-burn-in returns with a moment-matched log-normal.
///
/// `n_bins` defaults to the Freedman-Diaconis rule; an explicit value below
/// two is rejected.
[[nodiscard]] HistogramWithFit pooled_histogram(const Ensemble& ensemble, std::size_t burn_in_period,
                                                std::optional<std::size_t> n_bins = std::nullopt);

[[nodiscard]] MeanReturnSummary mean_return_summary(const Ensemble& ensemble, std::size_t burn_in_period);

[[nodiscard]] TrendTest trend_test(std::span<const double> y);

/// Trend tests on the per-period mean and variance from `burn_in_period` on.
[[nodiscard]] StationarityReport stationarity(const MomentsOverTime& moments, std::size_t burn_in_period);

}  // namespace ratiomarket
