#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <ratiomarket/statistics.hpp>

using namespace ratiomarket;

namespace {

Ensemble lognormal_ensemble(std::size_t traj, std::size_t periods, double mu, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(mu, sigma);
    std::vector<std::vector<double>> rows(traj, std::vector<double>(periods));
    for (auto& row : rows)
        for (auto& v : row) v = std::exp(z(rng));
    return Ensemble::from_rows(rows);
}

struct Brute {
    double mean, var, skew, kurt;
};

// Textbook moments with long double accumulation.
Brute brute_moments(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += v;
    const long double m = s / x.size();
    long double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const long double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= x.size();
    m3 /= x.size();
    m4 /= x.size();
    return {static_cast<double>(m), static_cast<double>(m2), static_cast<double>(m3 / std::pow(m2, 1.5L)),
            static_cast<double>(m4 / (m2 * m2))};
}

}  // namespace

TEST(Moments, MatchBruteForcePerPeriod) {
    const auto e = lognormal_ensemble(300, 20, 0.01, 0.2, 1);
    const auto mo = moments_over_time(e);
    ASSERT_EQ(mo.periods.size(), 20u);
    for (std::size_t n = 0; n < 20; ++n) {
        std::vector<double> col;
        for (std::size_t i = 0; i < e.trajectories(); ++i) col.push_back(e.at(i, n));
        const Brute b = brute_moments(col);
        const auto& p = mo.periods[n];
        EXPECT_NEAR(p.mean, b.mean, 1e-12);
        EXPECT_NEAR(p.variance, b.var, 1e-12 * b.var);
        EXPECT_NEAR(*p.skewness, b.skew, 1e-10);
        EXPECT_NEAR(*p.kurtosis, b.kurt, 1e-10);
    }
}

TEST(Moments, ConstantPerTrajectoryGivesFlatMoments) {
    std::vector<std::vector<double>> rows;
    std::vector<double> levels{0.9, 1.0, 1.05, 1.3, 0.97, 1.11};
    for (double c : levels) rows.emplace_back(15, c);
    const auto mo = moments_over_time(Ensemble::from_rows(rows));
    const Brute b = brute_moments(levels);
    for (const auto& p : mo.periods) {
        EXPECT_NEAR(p.mean, b.mean, 1e-14);
        EXPECT_NEAR(p.variance, b.var, 1e-14);
        EXPECT_NEAR(*p.skewness, b.skew, 1e-12);
        EXPECT_NEAR(*p.kurtosis, b.kurt, 1e-12);
    }
}

TEST(Moments, ConstantColumnIsDegenerate) {
    std::vector<std::vector<double>> rows(8, std::vector<double>(5, 1.001));
    const auto mo = moments_over_time(Ensemble::from_rows(rows));
    for (const auto& p : mo.periods) {
        EXPECT_EQ(p.mean, 1.001);
        EXPECT_EQ(p.variance, 0.0);
        EXPECT_FALSE(p.skewness.has_value());
        EXPECT_FALSE(p.kurtosis.has_value());
    }
    EXPECT_THROW((void)moments_over_time(Ensemble::from_rows({{1.0}, {1.0}, {1.0}})), InvalidInput);
}

TEST(Acf, LagZeroIsOneAndWhiteNoiseIsSmall) {
    const std::size_t mc = 4000;
    const auto e = lognormal_ensemble(mc, 60, 0.0, 0.1, 2);
    const auto acf = ensemble_acf(e, 5, 50);
    ASSERT_EQ(acf.correlation.size(), 51u);
    EXPECT_NEAR(*acf.correlation[0], 1.0, 1e-12);
    for (std::size_t lag = 1; lag <= 50; ++lag) {
        EXPECT_LT(std::abs(*acf.correlation[lag]), 3.0 / std::sqrt(static_cast<double>(mc))) << "lag " << lag;
    }
}

TEST(Acf, MatchesPearsonOracleAndIsScaleInvariant) {
    const auto e = lognormal_ensemble(200, 10, 0.0, 0.3, 3);
    const auto acf = ensemble_acf(e, 2, 4);
    for (std::size_t lag = 0; lag <= 4; ++lag) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < e.trajectories(); ++i) {
            x.push_back(std::log(e.at(i, 2)));
            y.push_back(std::log(e.at(i, 2 + lag)));
        }
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        EXPECT_NEAR(*acf.correlation[lag], sxy / std::sqrt(sxx * syy), 1e-12);
    }

    // A common multiplicative factor shifts log R and leaves correlations alone.
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < e.trajectories(); ++i) {
        const auto t = e.trajectory(i);
        std::vector<double> row(t.begin(), t.end());
        for (auto& v : row) v *= 1.7;
        rows.push_back(row);
    }
    const auto scaled = ensemble_acf(Ensemble::from_rows(rows), 2, 4);
    for (std::size_t lag = 0; lag <= 4; ++lag) EXPECT_NEAR(*scaled.correlation[lag], *acf.correlation[lag], 1e-10);
}

TEST(Acf, DegenerateAndRangeErrors) {
    std::vector<std::vector<double>> rows(5, std::vector<double>(6, 1.0));
    const auto acf = ensemble_acf(Ensemble::from_rows(rows), 0, 3);
    for (const auto& c : acf.correlation) EXPECT_FALSE(c.has_value());
    EXPECT_THROW((void)ensemble_acf(Ensemble::from_rows(rows), 3, 3), InvalidInput);
}

TEST(Lognormal, HandExample) {
    const auto p = lognormal_match(2.0, 1.0);
    EXPECT_NEAR(p.sigma * p.sigma, std::log(1.25), 1e-15);
    EXPECT_NEAR(p.sigma * p.sigma, 0.22314, 1e-5);
    EXPECT_NEAR(p.mu, 0.58157, 1e-5);
    EXPECT_NEAR(p.mean(), 2.0, 1e-13);
    EXPECT_NEAR(p.variance(), 1.0, 1e-13);
}

TEST(Lognormal, RoundTrip) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> mu(-1.0, 1.0), sig(0.001, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const LognormalParams p{mu(rng), sig(rng)};
        const auto q = lognormal_match(p.mean(), p.variance());
        EXPECT_NEAR(q.mu, p.mu, 1e-10);
        EXPECT_NEAR(q.sigma, p.sigma, 1e-10);
    }
}

TEST(Lognormal, SmallVarianceLimitAndErrors) {
    const auto p = lognormal_match(1.0, 1e-20);
    EXPECT_NEAR(p.mu, 0.0, 1e-15);
    EXPECT_NEAR(p.sigma, 1e-10, 1e-16);
    EXPECT_THROW((void)lognormal_match(1.0, 0.0), InvalidInput);
    EXPECT_THROW((void)lognormal_match(-1.0, 1.0), InvalidInput);
}

TEST(Lognormal, CdfAgreesWithPdfIntegral) {
    const LognormalParams p{0.1, 0.4};
    // Trapezoid integral of the pdf from a point far in the left tail.
    double acc = 0.0;
    const double lo = 1e-3, hi = 2.0;
    const int steps = 200000;
    const double h = (hi - lo) / steps;
    for (int i = 0; i < steps; ++i) acc += 0.5 * h * (p.pdf(lo + i * h) + p.pdf(lo + (i + 1) * h));
    EXPECT_NEAR(acc, p.cdf(hi) - p.cdf(lo), 1e-8);
}

TEST(Ks, UniformGridAgainstUniformCdf) {
    const std::size_t n = 1000;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = (static_cast<double>(i) + 0.5) / n;
    const double d = ks_distance(std::span<const double>(grid), [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_NEAR(d, 0.5 / n, 1e-15);
    // Against a distribution living elsewhere the distance is 1.
    const double far = ks_distance(std::span<const double>(grid), [](double) { return 0.0; });
    EXPECT_DOUBLE_EQ(far, 1.0);
}

TEST(Ks, LognormalSampleConverges) {
    const auto e = lognormal_ensemble(1000, 1000, 0.002, 0.05, 5);
    const auto h = pooled_histogram(e, 0);
    ASSERT_TRUE(h.ks_distance.has_value());
    EXPECT_LT(*h.ks_distance, 0.01);
    EXPECT_GE(*h.ks_distance, 0.0);
    EXPECT_NEAR(*h.excess_kurtosis_log, 0.0, 0.05);
}

TEST(Histogram, CountsAndDensity) {
    const auto e = lognormal_ensemble(50, 40, 0.0, 0.2, 6);
    const auto h = pooled_histogram(e, 10, 17);
    ASSERT_EQ(h.counts.size(), 17u);
    ASSERT_EQ(h.edges.size(), 18u);
    EXPECT_EQ(h.sample_size, 50u * 30u);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), h.sample_size);
    double mass = 0.0;
    for (std::size_t j = 0; j < 17; ++j) mass += h.empirical_density[j] * (h.edges[j + 1] - h.edges[j]);
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(h.edges.begin(), h.edges.end()));
    EXPECT_GT(h.fit->sigma, 0.0);
}

TEST(Histogram, InvariantToTrajectoryOrder) {
    const auto e = lognormal_ensemble(40, 30, 0.0, 0.2, 7);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = e.trajectories(); i-- > 0;) {
        const auto t = e.trajectory(i);
        rows.emplace_back(t.begin(), t.end());
    }
    const auto a = pooled_histogram(e, 5);
    const auto b = pooled_histogram(Ensemble::from_rows(rows), 5);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.edges, b.edges);
    EXPECT_NEAR(*a.ks_distance, *b.ks_distance, 1e-15);
}

TEST(Histogram, RejectsTooFewBinsAndEmptySample) {
    const auto e = lognormal_ensemble(4, 10, 0.0, 0.1, 8);
    EXPECT_THROW((void)pooled_histogram(e, 0, 1), InvalidInput);
    EXPECT_THROW((void)pooled_histogram(e, 10), InvalidInput);
}

TEST(Histogram, ConstantSampleHasNoFit) {
    std::vector<std::vector<double>> rows(6, std::vector<double>(10, 1.001));
    const auto h = pooled_histogram(Ensemble::from_rows(rows), 2);
    EXPECT_FALSE(h.fit.has_value());
    EXPECT_FALSE(h.ks_distance.has_value());
    EXPECT_EQ(h.sample_variance, 0.0);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 48u);
}

TEST(FreedmanDiaconis, HandExample) {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i) / 999.0;
    // IQR 0.5, width 2 * 0.5 / 10 = 0.1, so ten bins over the unit range.
    EXPECT_EQ(freedman_diaconis_bins(x), 10u);
    EXPECT_EQ(freedman_diaconis_bins(std::vector<double>{1.0, 1.0, 1.0}), 2u);
}

TEST(MeanSummary, ConstantSampleIsExact) {
    std::vector<std::vector<double>> rows(7, std::vector<double>(300, 1.001));
    const auto s = mean_return_summary(Ensemble::from_rows(rows), 100);
    EXPECT_EQ(s.geometric_mean, 1.001);
    EXPECT_EQ(s.arithmetic_mean, 1.001);
    EXPECT_EQ(s.std_dev, 0.0);
    EXPECT_EQ(s.sample_size, 1400u);
}

TEST(MeanSummary, GeometricBelowArithmetic) {
    const auto e = lognormal_ensemble(100, 50, 0.01, 0.1, 9);
    const auto s = mean_return_summary(e, 10);
    double logs = 0.0;
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t n = 10; n < 50; ++n) logs += std::log(e.at(i, n));
    EXPECT_NEAR(s.geometric_mean, std::exp(logs / 4000.0), 1e-13);
    EXPECT_LT(s.geometric_mean, s.arithmetic_mean);
}

TEST(Trend, RecoversSlopeAndFlatness) {
    std::vector<double> line(100);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] = 3.0 + 0.25 * static_cast<double>(i);
    const auto t = trend_test(line);
    EXPECT_NEAR(t.slope, 0.25, 1e-13);
    EXPECT_FALSE(t.flat());

    std::vector<double> flat(100, 2.0);
    EXPECT_TRUE(trend_test(flat).flat());

    std::mt19937_64 rng(10);
    std::normal_distribution<double> z(0.0, 1.0);
    int flagged = 0;
    for (int rep = 0; rep < 400; ++rep) {
        std::vector<double> noise(200);
        for (auto& v : noise) v = z(rng);
        flagged += trend_test(noise).flat() ? 0 : 1;
    }
    // |t| > 2 happens about 4.6% of the time under the null.
    EXPECT_NEAR(flagged / 400.0, 0.046, 0.035);
    EXPECT_THROW((void)trend_test(std::vector<double>{1.0, 2.0}), InvalidInput);
}
