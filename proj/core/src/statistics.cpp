#include "ratiomarket/statistics.hpp"

#include <numbers>

namespace ratiomarket {

namespace {

struct Central {
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

// Two-pass central moments with 1/n normalisation.
template <class Get>
Central central_moments(std::size_t n, Get&& get) {
    Central c;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += get(i);
    c.mean = sum / static_cast<double>(n);
    // One correction pass removes the rounding left by the plain sum, so a
    // constant sample gets its value back exactly and zero variance.
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += get(i) - c.mean;
    c.mean += residual / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = get(i) - c.mean;
        const double d2 = d * d;
        c.m2 += d2;
        c.m3 += d2 * d;
        c.m4 += d2 * d2;
    }
    const auto nn = static_cast<double>(n);
    c.m2 /= nn;
    c.m3 /= nn;
    c.m4 /= nn;
    return c;
}

}  // namespace

double LognormalParams::mean() const { return std::exp(mu + 0.5 * sigma * sigma); }

double LognormalParams::variance() const {
    const double s2 = sigma * sigma;
    return std::expm1(s2) * std::exp(2.0 * mu + s2);
}

double LognormalParams::pdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double LognormalParams::cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2));
}

MomentsOverTime moments_over_time(const Ensemble& ensemble) {
    if (ensemble.trajectories() < 4) {
        throw InvalidInput("moments_over_time needs at least 4 trajectories");
    }
    MomentsOverTime out;
    out.periods.reserve(ensemble.periods());
    for (std::size_t n = 0; n < ensemble.periods(); ++n) {
        const Central c = central_moments(ensemble.trajectories(), [&](std::size_t i) { return ensemble.at(i, n); });
        PeriodMoments pm;
        pm.mean = c.mean;
        pm.variance = c.m2;
        if (c.m2 > 0.0) {
            pm.skewness = c.m3 / std::pow(c.m2, 1.5);
            pm.kurtosis = c.m4 / (c.m2 * c.m2);
        }
        out.periods.push_back(pm);
    }
    return out;
}

AcfResult ensemble_acf(const Ensemble& ensemble, std::size_t base_period, std::size_t max_lag) {
    if (ensemble.trajectories() < 2) throw InvalidInput("ensemble_acf needs at least 2 trajectories");
    if (base_period + max_lag >= ensemble.periods()) {
        throw InvalidInput("base period plus max lag runs past the end of the series");
    }
    const std::size_t n = ensemble.trajectories();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::log(ensemble.at(i, base_period));
    const Central cx = central_moments(n, [&](std::size_t i) { return x[i]; });

    AcfResult out;
    out.base_period = base_period;
    out.correlation.reserve(max_lag + 1);
    std::vector<double> y(n);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        for (std::size_t i = 0; i < n; ++i) y[i] = std::log(ensemble.at(i, base_period + lag));
        const Central cy = central_moments(n, [&](std::size_t i) { return y[i]; });
        if (!(cx.m2 > 0.0) || !(cy.m2 > 0.0)) {
            out.correlation.emplace_back(std::nullopt);
            continue;
        }
        double sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - cx.mean) * (y[i] - cy.mean);
        sxy /= static_cast<double>(n);
        out.correlation.emplace_back(sxy / std::sqrt(cx.m2 * cy.m2));
    }
    return out;
}

LognormalParams lognormal_match(double mean, double variance) {
    if (!(mean > 0.0)) throw InvalidInput("log-normal match needs a positive mean");
    if (!(variance > 0.0)) throw InvalidInput("log-normal match needs a positive variance (degenerate sample)");
    const double s2 = std::log1p(variance / (mean * mean));
    return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

std::size_t freedman_diaconis_bins(std::span<const double> sorted, std::size_t max_bins) {
    if (sorted.size() < 2) return 2;
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double range = sorted.back() - sorted.front();
    if (!(iqr > 0.0) || !(range > 0.0)) return 2;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    const double bins = std::ceil(range / width);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::min(bins, 1e9)), 2, max_bins);
}

std::optional<double> excess_kurtosis(std::span<const double> sample) {
    if (sample.empty()) return std::nullopt;
    const Central c = central_moments(sample.size(), [&](std::size_t i) { return sample[i]; });
    if (!(c.m2 > 0.0)) return std::nullopt;
    return c.m4 / (c.m2 * c.m2) - 3.0;
}

std::vector<double> pooled_returns(const Ensemble& ensemble, std::size_t burn_in_period) {
    std::vector<double> out;
    if (burn_in_period >= ensemble.periods()) return out;
    out.reserve(ensemble.trajectories() * (ensemble.periods() - burn_in_period));
    for (std::size_t i = 0; i < ensemble.trajectories(); ++i) {
        const auto row = ensemble.trajectory(i).subspan(burn_in_period);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

HistogramWithFit pooled_histogram(const Ensemble& ensemble, std::size_t burn_in_period,
                                  std::optional<std::size_t> n_bins) {
    if (n_bins && *n_bins < 2) throw InvalidInput("n_bins must be at least 2");
    std::vector<double> sample = pooled_returns(ensemble, burn_in_period);
    if (sample.empty()) throw InvalidInput("no returns after the burn-in period");

    HistogramWithFit out;
    out.sample_size = sample.size();
    const Central c = central_moments(sample.size(), [&](std::size_t i) { return sample[i]; });
    out.sample_mean = c.mean;
    out.sample_variance = c.m2;

    {
        std::vector<double> logs(sample.size());
        std::transform(sample.begin(), sample.end(), logs.begin(), [](double v) { return std::log(v); });
        out.excess_kurtosis_log = excess_kurtosis(logs);
    }

    std::sort(sample.begin(), sample.end());
    const std::size_t bins = n_bins.value_or(freedman_diaconis_bins(sample));

    double lo = sample.front();
    double hi = sample.back();
    if (!(hi > lo)) {
        const double pad = std::max(std::abs(lo), 1.0) * 1e-9;
        lo -= pad;
        hi += pad;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    out.edges.resize(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j) out.edges[j] = lo + width * static_cast<double>(j);
    out.edges.back() = hi;

    out.counts.assign(bins, 0);
    for (double v : sample) {
        auto j = static_cast<std::size_t>((v - lo) / width);
        j = std::min(j, bins - 1);
        // Guard against the computed index landing one bin off an edge.
        while (j > 0 && v < out.edges[j]) --j;
        while (j + 1 < bins && v >= out.edges[j + 1]) ++j;
        ++out.counts[j];
    }

    if (c.m2 > 0.0 && c.mean > 0.0) {
        out.fit = lognormal_match(c.mean, c.m2);
        const LognormalParams fit = *out.fit;
        out.ks_distance = ks_distance(sample, [&](double x) { return fit.cdf(x); });
    }

    const auto total = static_cast<double>(sample.size());
    out.empirical_density.resize(bins);
    out.lognormal_density.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        const double w = out.edges[j + 1] - out.edges[j];
        out.empirical_density[j] = static_cast<double>(out.counts[j]) / (total * w);
        const double centre = 0.5 * (out.edges[j] + out.edges[j + 1]);
        out.lognormal_density[j] = out.fit ? out.fit->pdf(centre) : 0.0;
    }
    return out;
}

MeanReturnSummary mean_return_summary(const Ensemble& ensemble, std::size_t burn_in_period) {
    const std::vector<double> sample = pooled_returns(ensemble, burn_in_period);
    if (sample.empty()) throw InvalidInput("no returns after the burn-in period");
    MeanReturnSummary out;
    out.sample_size = sample.size();
    const Central c = central_moments(sample.size(), [&](std::size_t i) { return sample[i]; });
    if (c.m2 > 0.0) {
        const Central logs = central_moments(sample.size(), [&](std::size_t i) { return std::log(sample[i]); });
        out.geometric_mean = std::exp(logs.mean);
    } else {
        out.geometric_mean = c.mean;
    }
    out.arithmetic_mean = c.mean;
    out.std_dev = std::sqrt(c.m2);
    return out;
}

TrendTest trend_test(std::span<const double> y) {
    if (y.size() < 3) throw InvalidInput("trend test needs at least 3 points");
    const auto n = static_cast<double>(y.size());
    const double t_mean = 0.5 * (n - 1.0);
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dt = static_cast<double>(i) - t_mean;
        sxx += dt * dt;
        sxy += dt * (y[i] - y_mean);
    }
    TrendTest out;
    out.slope = sxy / sxx;
    const double intercept = y_mean - out.slope * t_mean;
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - (intercept + out.slope * static_cast<double>(i));
        sse += e * e;
    }
    out.std_error = std::sqrt(sse / (n - 2.0) / sxx);
    return out;
}

StationarityReport stationarity(const MomentsOverTime& moments, std::size_t burn_in_period) {
    if (burn_in_period >= moments.periods.size()) throw InvalidInput("burn-in covers the whole series");
    std::vector<double> means;
    std::vector<double> variances;
    for (std::size_t n = burn_in_period; n < moments.periods.size(); ++n) {
        means.push_back(moments.periods[n].mean);
        variances.push_back(moments.periods[n].variance);
    }
    return {trend_test(means), trend_test(variances)};
}

}  // namespace ratiomarket
