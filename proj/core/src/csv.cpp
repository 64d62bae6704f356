#include "ratiomarket/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace ratiomarket::csv {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string("nan"); }

void write_moments(std::ostream& os, const MomentsOverTime& moments, std::size_t periods_per_year) {
    os << kMomentsHeader << '\n';
    for (std::size_t n = 0; n < moments.periods.size(); ++n) {
        const auto& p = moments.periods[n];
        const double t = static_cast<double>(n + 1) / static_cast<double>(periods_per_year);
        os << n + 1 << ',' << number(t) << ',' << number(p.mean) << ',' << number(p.variance) << ','
           << number(p.skewness) << ',' << number(p.kurtosis) << '\n';
    }
}

void write_acf(std::ostream& os, const AcfResult& acf) {
    os << kAcfHeader << '\n';
    for (std::size_t lag = 0; lag < acf.correlation.size(); ++lag) {
        os << lag << ',' << number(acf.correlation[lag]) << '\n';
    }
}

void write_histogram(std::ostream& os, const HistogramWithFit& hist) {
    os << kHistogramHeader << '\n';
    for (std::size_t j = 0; j < hist.counts.size(); ++j) {
        os << number(hist.edges[j]) << ',' << number(hist.edges[j + 1]) << ',' << hist.counts[j] << ','
           << number(hist.empirical_density[j]) << ',' << number(hist.lognormal_density[j]) << '\n';
    }
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << r.scheme << ',' << number(r.m_or_mean_m) << ',' << number(r.means.geometric_mean) << ','
           << number(r.means.arithmetic_mean) << ',' << number(r.means.std_dev) << ',' << number(r.predicted_rs)
           << ',' << number(r.ks_distance) << ',' << number(r.excess_kurtosis_log_returns) << '\n';
    }
}

void write_two_agent(std::ostream& os, const TwoAgentPath& path, double rate_stock_value) {
    os << kTwoAgentHeader << '\n';
    for (std::size_t n = 0; n < path.prices.size(); ++n) {
        os << n + 1 << ',' << number(path.prices[n]) << ',' << number(path.returns[n]) << ','
           << number(rate_stock_value) << '\n';
    }
}

void write_scan(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << kScanHeader << '\n';
    for (const auto& r : rows) {
        auto line = [&](const char* kind, const ScanPoint& p, double a) {
            os << number(r.alpha) << ',' << number(r.beta) << ',' << kind << ',' << number(p[0]) << ','
               << number(p[1]) << ',' << number(p[2]) << ',' << number(p[3]) << ',' << number(a) << ','
               << number(a * a) << '\n';
        };
        line("min", r.result.argmin, r.result.min_a);
        line("max", r.result.argmax, r.result.max_a);
    }
}

void write_scan_summary(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << kScanSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << number(r.alpha) << ',' << number(r.beta) << ',' << number(r.alpha * r.beta) << ',' << r.spec.k_points
           << ',' << r.spec.s_points << ',' << number(r.result.min_a) << ',' << number(r.result.max_a) << ','
           << number(r.result.min_two_period()) << ',' << number(r.result.max_two_period()) << '\n';
    }
}

void write_returns(std::ostream& os, const Ensemble& ensemble) {
    os << kReturnsHeader << '\n';
    for (std::size_t i = 0; i < ensemble.trajectories(); ++i) {
        const auto row = ensemble.trajectory(i);
        for (std::size_t n = 0; n < row.size(); ++n) {
            os << i << ',' << n + 1 << ',' << number(row[n]) << '\n';
        }
    }
}

}  // namespace ratiomarket::csv
