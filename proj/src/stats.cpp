#include "sphcorr/stats.hpp"

#include <algorithm>
#include <cmath>

namespace sphcorr {

namespace {

// Continued-fraction evaluation of the regularized incomplete beta function.
double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        stat = std::max(stat, std::abs(f - static_cast<double>(i) / n));
        stat = std::max(stat, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return stat;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double stat = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        stat = std::max(stat, std::abs(static_cast<double>(i) / na -
                                       static_cast<double>(j) / nb));
    }
    return stat;
}

namespace {
double ks_coefficient(double alpha) {
    if (alpha <= 0.01) return 1.62762;
    if (alpha <= 0.05) return 1.35810;
    return 1.22385;  // alpha = 0.10
}
}  // namespace

double ks_critical(std::size_t n, double alpha) {
    return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return ks_coefficient(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw TooFewSamples("quantile: empty sample");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double jointly_uniform_corr_cdf(double rho, int D) {
    if (rho <= -1.0) return 0.0;
    if (rho >= 1.0) return 1.0;
    return reg_inc_beta(D / 2.0, D / 2.0, 0.5 * (rho + 1.0));
}

double octant_chi_square(const std::vector<Eigen::Vector3d>& points) {
    double counts[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (const auto& p : points) {
        const int idx = (p(0) > 0 ? 1 : 0) | (p(1) > 0 ? 2 : 0) | (p(2) > 0 ? 4 : 0);
        counts[idx] += 1.0;
    }
    const double expected = static_cast<double>(points.size()) / 8.0;
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    return stat;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace sphcorr
