#include "sphcorr/gp.hpp"

#include <cmath>

namespace sphcorr {

void KernelParams::validate() const {
    if (!(gamma > 0.0)) throw InvalidConfig("KernelParams: gamma must be positive");
    if (!(rho > 0.0)) throw InvalidConfig("KernelParams: rho must be positive");
    if (!(s > 0.0 && s <= 2.0)) throw InvalidConfig("KernelParams: s must lie in (0, 2]");
    if (nugget < 0.0) throw InvalidConfig("KernelParams: nugget must be non-negative");
}

TimeGrid::TimeGrid(Eigen::VectorXd pts) : points(std::move(pts)) {
    if (points.size() < 2) throw InvalidConfig("TimeGrid: need at least two points");
    for (int i = 1; i < points.size(); ++i)
        if (!(points(i) > points(i - 1)))
            throw InvalidConfig("TimeGrid: points must be strictly increasing");
}

TimeGrid TimeGrid::rescaled(const Eigen::VectorXd& raw) {
    const int n = static_cast<int>(raw.size());
    if (n < 2) throw InvalidConfig("TimeGrid: need at least two points");
    const double lo = raw.minCoeff(), hi = raw.maxCoeff();
    if (!(hi > lo)) throw InvalidConfig("TimeGrid: degenerate time range");
    const double target_lo = 1.0 / n;
    Eigen::VectorXd scaled =
        ((raw.array() - lo) / (hi - lo)) * (1.0 - target_lo) + target_lo;
    return TimeGrid(scaled);
}

void HyperPrior::validate() const {
    if (!(a > 0.0 && b > 0.0 && V > 0.0))
        throw InvalidConfig("HyperPrior: a, b, V must be positive");
}

namespace {

Eigen::MatrixXd base_gram(const Eigen::VectorXd& t, double s, double rho) {
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (int j = 0; j < i; ++j) {
            const double d = std::abs(t(i) - t(j));
            const double v = std::exp(-0.5 * std::pow(d, s) / std::pow(rho, s));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

}  // namespace

Eigen::MatrixXd build_gram(const TimeGrid& grid, const KernelParams& kp) {
    kp.validate();
    Eigen::MatrixXd K = kp.gamma * base_gram(grid.points, kp.s, kp.rho);
    double jitter = kp.nugget;
    for (;;) {
        Eigen::MatrixXd Kj = K + jitter * Eigen::MatrixXd::Identity(K.rows(), K.cols());
        Eigen::LLT<Eigen::MatrixXd> llt(Kj);
        if (llt.info() == Eigen::Success) return Kj;
        jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
        if (jitter > 1e-1)
            throw NotPositiveDefinite("build_gram: Gram matrix not PD after jitter escalation");
    }
}

double vgp_logpdf(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& K) {
    if (Z.rows() != K.rows()) throw DimensionMismatch("vgp_logpdf: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("vgp_logpdf: K is not positive definite");
    const double logdet =
        2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    const double quad = (Z.array() * llt.solve(Z).array()).sum();
    return -0.5 * Z.cols() * logdet - 0.5 * quad;
}

double uvgp_logpdf(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean_row,
                   const Eigen::MatrixXd& K) {
    if (rows.cols() != mean_row.size() || rows.rows() != K.rows())
        throw DimensionMismatch("uvgp_logpdf: dimension mismatch");
    for (int n = 0; n < rows.rows(); ++n)
        if (std::abs(rows.row(n).norm() - 1.0) > 1e-9)
            throw RowNotUnitNorm("uvgp_logpdf: row " + std::to_string(n + 1) +
                                 " is not unit norm");
    Eigen::MatrixXd centered = rows.rowwise() - mean_row.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("uvgp_logpdf: K is not positive definite");
    return -0.5 * (centered.array() * llt.solve(centered).array()).sum();
}

std::pair<double, double> hyper_logpdfs(double gamma, double eta, const HyperPrior& hp) {
    hp.validate();
    if (!(gamma > 0.0)) throw NonPositiveGamma("hyper_logpdfs: gamma must be positive");
    const double lg = -(hp.a + 1.0) * std::log(gamma) - hp.b / gamma;
    const double diff = eta - hp.m;
    const double le = -0.5 * diff * diff / hp.V;
    return {lg, le};
}

GramCache::GramCache(TimeGrid grid, double s, double nugget)
    : grid_(std::move(grid)), s_(s), nugget_(nugget) {}

void GramCache::ensure(double eta) {
    if (cached_eta_ && *cached_eta_ == eta) return;
    KernelParams kp;
    kp.gamma = 1.0;
    kp.rho = std::exp(eta);
    kp.s = s_;
    kp.nugget = nugget_;
    k0_ = build_gram(grid_, kp);
    llt_.compute(k0_);
    if (llt_.info() != Eigen::Success)
        throw NotPositiveDefinite("GramCache: factorization failed");
    logdet_ = 2.0 * Eigen::MatrixXd(llt_.matrixL()).diagonal().array().log().sum();
    cached_eta_ = eta;
}

const Eigen::LLT<Eigen::MatrixXd>& GramCache::factor(double eta) {
    ensure(eta);
    return llt_;
}

const Eigen::MatrixXd& GramCache::gram(double eta) {
    ensure(eta);
    return k0_;
}

double GramCache::logdet_k0(double eta) {
    ensure(eta);
    return logdet_;
}

double GramCache::quad_form(double eta, const Eigen::MatrixXd& Z) {
    ensure(eta);
    return (Z.array() * llt_.solve(Z).array()).sum();
}

}  // namespace sphcorr
