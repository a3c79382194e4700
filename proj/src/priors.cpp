#include "sphcorr/priors.hpp"

#include <cmath>
#include <string>

namespace sphcorr {

SqDirichletParams::SqDirichletParams(Eigen::VectorXd a) : alpha(std::move(a)) {
    if (alpha.size() < 1) throw DimensionMismatch("SqDirichletParams: empty alpha");
    if ((alpha.array() <= 0.0).any())
        throw NonPositiveAlpha("SqDirichletParams: all concentrations must be positive");
}

double sqdir_logpdf(const Eigen::VectorXd& l, const SqDirichletParams& p) {
    if (l.size() != p.alpha.size())
        throw DimensionMismatch("sqdir_logpdf: dimension mismatch");
    double acc = 0.0;
    for (int k = 0; k < l.size(); ++k) {
        const double e = 2.0 * p.alpha(k) - 1.0;
        if (e == 0.0) continue;
        if (l(k) == 0.0) throw LogOfZero("sqdir_logpdf: coordinate exactly zero");
        acc += e * std::log(std::abs(l(k)));
    }
    return acc;
}

Eigen::VectorXd sqdir_grad(const Eigen::VectorXd& l, const SqDirichletParams& p) {
    if (l.size() != p.alpha.size()) throw DimensionMismatch("sqdir_grad: dimension mismatch");
    Eigen::VectorXd g(l.size());
    for (int k = 0; k < l.size(); ++k) {
        if (l(k) == 0.0) throw DivByZero("sqdir_grad: coordinate exactly zero");
        g(k) = (2.0 * p.alpha(k) - 1.0) / l(k);
    }
    return g;
}

SpherePoint sqdir_sample(const SqDirichletParams& p, Rng& rng) {
    Eigen::VectorXd x = rng.dirichlet(p.alpha);
    Eigen::VectorXd l(x.size());
    for (int k = 0; k < x.size(); ++k) {
        const double root = std::sqrt(x(k));
        l(k) = rng.rademacher() ? root : -root;
    }
    l /= l.norm();
    return SpherePoint(std::move(l), 1.0);
}

std::vector<SqDirichletParams> jointly_uniform_alpha(int D) {
    if (D < 2) throw InvalidConfig("jointly_uniform_alpha: need D >= 2");
    std::vector<SqDirichletParams> out;
    out.reserve(D - 1);
    for (int i = 2; i <= D; ++i) {
        Eigen::VectorXd a = Eigen::VectorXd::Constant(i, 0.5);
        a(i - 1) = (D - i) / 2.0 + 1.0;
        out.emplace_back(std::move(a));
    }
    return out;
}

Eigen::VectorXd marginally_uniform_alpha_row(int D, int i) {
    if (D < 2 || i < 2 || i > D)
        throw InvalidConfig("marginally_uniform_alpha_row: need 2 <= i <= D");
    const double tail = ((i - 2) * static_cast<double>(D) - 1.0) / 2.0;
    if (tail <= 0.0)
        throw NonPositiveAlpha("marginally_uniform_alpha_row: alpha_" + std::to_string(i) +
                               std::to_string(i) + " = " + std::to_string(tail) +
                               " is not positive");
    Eigen::VectorXd a = Eigen::VectorXd::Constant(i, 0.5);
    a(i - 1) = tail;
    return a;
}

std::vector<SqDirichletParams> marginally_uniform_alpha(int D) {
    if (D < 2) throw InvalidConfig("marginally_uniform_alpha: need D >= 2");
    std::vector<SqDirichletParams> out;
    out.reserve(D - 1);
    for (int i = 2; i <= D; ++i) out.emplace_back(marginally_uniform_alpha_row(D, i));
    return out;
}

VmfParams::VmfParams(double k, Eigen::VectorXd direction) : kappa(k), mu(std::move(direction)) {
    if (kappa < 0.0) throw InvalidConfig("VmfParams: kappa must be non-negative");
    if (std::abs(mu.norm() - 1.0) > 1e-9)
        throw InvalidConfig("VmfParams: mean direction must be a unit vector");
}

double vmf_logpdf(const Eigen::VectorXd& l, const VmfParams& p) {
    if (l.size() != p.mu.size()) throw DimensionMismatch("vmf_logpdf: dimension mismatch");
    return p.kappa * p.mu.dot(l);
}

Eigen::VectorXd vmf_grad(const Eigen::VectorXd& l, const VmfParams& p) {
    if (l.size() != p.mu.size()) throw DimensionMismatch("vmf_grad: dimension mismatch");
    return p.kappa * p.mu;
}

double bingham_logpdf(const Eigen::VectorXd& l, const BinghamParams& p) {
    const double last = l(l.size() - 1);
    return p.zeta * last * last;
}

Eigen::VectorXd bingham_grad(const Eigen::VectorXd& l, const BinghamParams& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(l.size());
    g(l.size() - 1) = 2.0 * p.zeta * l(l.size() - 1);
    return g;
}

double uvgauss_logpdf(const Eigen::VectorXd& l, const UnitVecGaussParams& p) {
    if (l.size() != p.mean.size() || p.cov.rows() != l.size() || p.cov.cols() != l.size())
        throw DimensionMismatch("uvgauss_logpdf: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(p.cov);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("uvgauss_logpdf: covariance is not positive definite");
    Eigen::VectorXd centered = l - p.mean;
    return -0.5 * centered.dot(llt.solve(centered));
}

}  // namespace sphcorr
