#include "sphcorr/summary.hpp"

#include <algorithm>
#include <cmath>

#include "sphcorr/stats.hpp"

namespace sphcorr {

namespace {

// Correlation between channels i > j from ragged rows, using only the
// overlapping prefix.
double rho_entry(const CorrCholesky& L, int i, int j) {
    const int k = std::min(i, j) + 1;
    return L.row(i).head(k).dot(L.row(j).head(k));
}

struct Accumulator {
    std::vector<std::vector<std::vector<double>>> values;  // [n][entry][sample]

    Accumulator(int N, int entries, int n_samples) {
        values.assign(N, std::vector<std::vector<double>>(entries));
        for (auto& row : values)
            for (auto& cell : row) cell.reserve(n_samples);
    }

    CurveSummary summarize() const {
        const int N = static_cast<int>(values.size());
        const int E = static_cast<int>(values[0].size());
        CurveSummary cs;
        cs.mean.resize(N, E);
        cs.lo.resize(N, E);
        cs.hi.resize(N, E);
        for (int n = 0; n < N; ++n) {
            for (int e = 0; e < E; ++e) {
                std::vector<double> v = values[n][e];
                std::sort(v.begin(), v.end());
                double s = 0.0;
                for (double x : v) s += x;
                cs.mean(n, e) = s / static_cast<double>(v.size());
                cs.lo(n, e) = quantile_sorted(v, 0.025);
                cs.hi(n, e) = quantile_sorted(v, 0.975);
            }
        }
        return cs;
    }
};

double coverage(const CurveSummary& cs, const Eigen::MatrixXd& truth) {
    long covered = 0, total = 0;
    for (int n = 0; n < cs.mean.rows(); ++n)
        for (int e = 0; e < cs.mean.cols(); ++e) {
            ++total;
            if (truth(n, e) >= cs.lo(n, e) && truth(n, e) <= cs.hi(n, e)) ++covered;
        }
    return static_cast<double>(covered) / static_cast<double>(total);
}

double mise(const CurveSummary& cs, const Eigen::MatrixXd& truth) {
    return (cs.mean - truth).squaredNorm() /
           static_cast<double>(cs.mean.rows());
}

}  // namespace

PosteriorSummary summarize_posterior(const DynamicSamples& samples,
                                     const PeriodicTruth* truth) {
    const std::size_t S = samples.mu.size();
    if (S < 100) throw TooFewSamples("summarize_posterior: need at least 100 samples");
    const int N = static_cast<int>(samples.mu[0].rows());
    const int D = static_cast<int>(samples.mu[0].cols());
    const int w = samples.band_w > 0 ? samples.band_w : D;

    PosteriorSummary out;
    out.times = samples.times;
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < i; ++j)
            if (i - j < w) out.rho_pairs.emplace_back(i, j);
        for (int j = 0; j <= i; ++j)
            if (i - j < w) out.sigma_pairs.emplace_back(i, j);
    }

    Accumulator acc_mu(N, D, static_cast<int>(S));
    Accumulator acc_sd(N, D, static_cast<int>(S));
    Accumulator acc_rho(N, static_cast<int>(out.rho_pairs.size()), static_cast<int>(S));
    Accumulator acc_sigma(N, static_cast<int>(out.sigma_pairs.size()),
                          static_cast<int>(S));

    for (std::size_t s = 0; s < S; ++s) {
        const Eigen::MatrixXd sd = samples.tau[s].array().exp();
        for (int n = 0; n < N; ++n) {
            for (int k = 0; k < D; ++k) {
                acc_mu.values[n][k].push_back(samples.mu[s](n, k));
                acc_sd.values[n][k].push_back(sd(n, k));
            }
            for (std::size_t e = 0; e < out.rho_pairs.size(); ++e) {
                const auto [i, j] = out.rho_pairs[e];
                acc_rho.values[n][e].push_back(rho_entry(samples.L[s][n], i, j));
            }
            for (std::size_t e = 0; e < out.sigma_pairs.size(); ++e) {
                const auto [i, j] = out.sigma_pairs[e];
                const double r = (i == j) ? 1.0 : rho_entry(samples.L[s][n], i, j);
                acc_sigma.values[n][e].push_back(r * sd(n, i) * sd(n, j));
            }
        }
    }

    out.mu = acc_mu.summarize();
    out.sd = acc_sd.summarize();
    out.rho = acc_rho.summarize();
    out.sigma = acc_sigma.summarize();

    if (truth) {
        Eigen::MatrixXd rho_truth(N, out.rho_pairs.size());
        Eigen::MatrixXd sigma_truth(N, out.sigma_pairs.size());
        for (int n = 0; n < N; ++n) {
            for (std::size_t e = 0; e < out.rho_pairs.size(); ++e) {
                const auto [i, j] = out.rho_pairs[e];
                rho_truth(n, e) = truth->corr[n](i, j);
            }
            for (std::size_t e = 0; e < out.sigma_pairs.size(); ++e) {
                const auto [i, j] = out.sigma_pairs[e];
                sigma_truth(n, e) = truth->sigma[n](i, j);
            }
        }
        out.coverage_mu = coverage(out.mu, truth->mu);
        out.coverage_sd = coverage(out.sd, truth->sd);
        out.coverage_rho = coverage(out.rho, rho_truth);
        out.coverage_sigma = coverage(out.sigma, sigma_truth);
        out.mise_mu = mise(out.mu, truth->mu);
        out.mise_sigma = mise(out.sigma, sigma_truth);

        const std::vector<Eigen::MatrixXd> phat = mean_correlation_curve(samples);
        out.two_norm_error.resize(N);
        for (int n = 0; n < N; ++n) {
            const Eigen::MatrixXd diff = phat[n] - truth->corr[n];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
            out.two_norm_error(n) =
                es.eigenvalues().array().abs().maxCoeff();
        }
    }
    return out;
}

Eigen::VectorXd frobenius_distance_curve(const std::vector<Eigen::MatrixXd>& a,
                                         const std::vector<Eigen::MatrixXd>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("frobenius_distance_curve: length mismatch");
    Eigen::VectorXd out(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) out(n) = (a[n] - b[n]).norm();
    return out;
}

std::vector<Eigen::MatrixXd> mean_correlation_curve(const DynamicSamples& samples) {
    const std::size_t S = samples.L.size();
    const int N = static_cast<int>(samples.L[0].size());
    const int D = samples.L[0][0].dim();
    std::vector<Eigen::MatrixXd> mean(N, Eigen::MatrixXd::Zero(D, D));
    for (std::size_t s = 0; s < S; ++s)
        for (int n = 0; n < N; ++n) mean[n] += rows_to_corr(samples.L[s][n]);
    for (int n = 0; n < N; ++n) mean[n] /= static_cast<double>(S);
    return mean;
}

}  // namespace sphcorr
