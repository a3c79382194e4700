#include "sphcorr/periodic.hpp"

#include <cmath>

#include "sphcorr/errors.hpp"

namespace sphcorr {

namespace {

Eigen::VectorXd linspace(double t0, double t1, int N) {
    Eigen::VectorXd t(N);
    for (int n = 0; n < N; ++n)
        t(n) = t0 + (t1 - t0) * static_cast<double>(n) / static_cast<double>(N - 1);
    return t;
}

double sign_pow(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

PeriodicTruth finish_truth(Eigen::VectorXd times, Eigen::MatrixXd mu,
                           std::vector<Eigen::MatrixXd> sigma) {
    PeriodicTruth truth;
    truth.times = std::move(times);
    truth.mu = std::move(mu);
    truth.sigma = std::move(sigma);
    const int N = static_cast<int>(truth.sigma.size());
    const int D = static_cast<int>(truth.sigma[0].rows());
    truth.sd.resize(N, D);
    truth.corr.reserve(N);
    for (int n = 0; n < N; ++n) {
        const Eigen::VectorXd sd = truth.sigma[n].diagonal().array().sqrt();
        truth.sd.row(n) = sd.transpose();
        Eigen::VectorXd inv = sd.array().inverse();
        truth.corr.push_back(inv.asDiagonal() * truth.sigma[n] * inv.asDiagonal());
    }
    return truth;
}

TrialTensor draw_trials(const PeriodicTruth& truth, int M, Rng& rng) {
    const int N = static_cast<int>(truth.sigma.size());
    const int D = static_cast<int>(truth.sigma[0].rows());
    std::vector<Eigen::MatrixXd> chols;
    chols.reserve(N);
    for (int n = 0; n < N; ++n) {
        Eigen::LLT<Eigen::MatrixXd> llt(truth.sigma[n]);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("generate_periodic: truth covariance not factorizable");
        chols.emplace_back(llt.matrixL());
    }
    TrialTensor data;
    data.times = truth.times;
    data.trials.reserve(M);
    for (int m = 0; m < M; ++m) {
        Eigen::MatrixXd y(N, D);
        for (int n = 0; n < N; ++n)
            y.row(n) = (truth.mu.row(n).transpose() + chols[n] * rng.normal_vector(D))
                           .transpose();
        data.trials.push_back(std::move(y));
    }
    return data;
}

}  // namespace

std::pair<TrialTensor, PeriodicTruth> generate_periodic(int D, int M, int N, double t0,
                                                        double t1, Rng& rng) {
    if (D < 1 || M < 1 || N < 2) throw InvalidConfig("generate_periodic: bad shape");
    const Eigen::VectorXd times = linspace(t0, t1, N);

    Eigen::MatrixXd mu(N, D);
    std::vector<Eigen::MatrixXd> sigma;
    sigma.reserve(N);
    Eigen::MatrixXd S(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) S(i, j) = 1.0 / (std::abs(i - j) + 1.0);

    for (int n = 0; n < N; ++n) {
        const double t = times(n);
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(D, D);
        for (int i = 1; i <= D; ++i) {
            mu(n, i - 1) = std::sin(i * t * M_PI / D);
            for (int j = 1; j <= i; ++j)
                L(i - 1, j - 1) = sign_pow(i) * std::sin(i * t * M_PI / D) * sign_pow(j) *
                                  std::cos(j * t * M_PI / D);
        }
        Eigen::MatrixXd cov = (L * L.transpose()).cwiseProduct(S);
        cov += 1e-8 * Eigen::MatrixXd::Identity(D, D);
        sigma.push_back(std::move(cov));
    }

    PeriodicTruth truth = finish_truth(times, std::move(mu), std::move(sigma));
    TrialTensor data = draw_trials(truth, M, rng);
    return {std::move(data), std::move(truth)};
}

std::pair<TrialTensor, PeriodicTruth> generate_periodic_sparse(int D, int M, int N, double t0,
                                                               double t1, Rng& rng) {
    if (D < 4 || M < 1 || N < 2) throw InvalidConfig("generate_periodic_sparse: bad shape");
    const Eigen::VectorXd times = linspace(t0, t1, N);

    // Only correlation pairs (1,2) and (D-1,D) are informative; the sine
    // amplitude cancels under row normalization, so rows 2 and D carry the
    // normalized cosine direction.
    auto row_direction = [D](int i, double t) {  // i is 1-based
        Eigen::VectorXd c(i);
        for (int j = 1; j <= i; ++j)
            c(j - 1) = sign_pow(i + j) * std::cos(j * t * M_PI / D);
        return Eigen::VectorXd(c / c.norm());
    };

    std::vector<Eigen::MatrixXd> sigma;
    sigma.reserve(N);
    for (int n = 0; n < N; ++n) {
        const double t = times(n);
        const Eigen::VectorXd r2 = row_direction(2, t);
        const Eigen::VectorXd rD = row_direction(D, t);
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(D, D);
        P(0, 1) = P(1, 0) = 0.5 * r2(0);
        P(D - 2, D - 1) = P(D - 1, D - 2) = 0.5 * rD(D - 2);
        sigma.push_back(std::move(P));
    }

    PeriodicTruth truth =
        finish_truth(times, Eigen::MatrixXd::Zero(N, D), std::move(sigma));
    TrialTensor data = draw_trials(truth, M, rng);
    return {std::move(data), std::move(truth)};
}

}  // namespace sphcorr
