#include "oracles.hpp"

#include <cmath>

#include "sphcorr/errors.hpp"

namespace sphcorr::oracles {

Eigen::MatrixXd onion_uniform_corr(int D, Rng& rng) {
    if (D < 2) throw InvalidConfig("onion_uniform_corr: need D >= 2");
    double beta = 1.0 + (D - 2.0) / 2.0;
    Eigen::MatrixXd R(1, 1);
    R(0, 0) = 1.0;
    {
        const double u = rng.beta(beta, beta);
        const double r12 = 2.0 * u - 1.0;
        R.resize(2, 2);
        R << 1.0, r12, r12, 1.0;
    }
    for (int k = 2; k < D; ++k) {
        beta -= 0.5;
        const double y = rng.beta(k / 2.0, beta);
        const Eigen::VectorXd u = rng.unit_sphere(k);
        const Eigen::VectorXd wvec = std::sqrt(y) * u;
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        const Eigen::VectorXd q = Eigen::MatrixXd(llt.matrixL()) * wvec;
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k + 1, k + 1);
        next.topLeftCorner(k, k) = R;
        next.block(0, k, k, 1) = q;
        next.block(k, 0, 1, k) = q.transpose();
        next(k, k) = 1.0;
        R = std::move(next);
    }
    return R;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    for (int k = 0; k < x.size(); ++k) {
        Eigen::VectorXd hi = x, lo = x;
        hi(k) += step;
        lo(k) -= step;
        g(k) = (f(hi) - f(lo)) / (2.0 * step);
    }
    return g;
}

namespace {

Eigen::VectorXd embed(const Eigen::VectorXd& free, int pole_idx, double pole_sign) {
    const int d = static_cast<int>(free.size()) + 1;
    Eigen::VectorXd l(d);
    int k = 0;
    for (int i = 0; i < d; ++i)
        if (i != pole_idx) l(i) = free(k++);
    const double rest = 1.0 - free.squaredNorm();
    l(pole_idx) = pole_sign * std::sqrt(std::max(rest, 0.0));
    return l;
}

}  // namespace

Eigen::VectorXd fd_gradient_chart(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& l, int pole_idx, double step) {
    const int d = static_cast<int>(l.size());
    Eigen::VectorXd free(d - 1);
    int k = 0;
    for (int i = 0; i < d; ++i)
        if (i != pole_idx) free(k++) = l(i);
    const double pole_sign = l(pole_idx) >= 0.0 ? 1.0 : -1.0;
    return fd_gradient(
        [&](const Eigen::VectorXd& x) { return f(embed(x, pole_idx, pole_sign)); }, free,
        step);
}

Eigen::VectorXd chart_gradient(const Eigen::VectorXd& ambient_grad,
                               const Eigen::VectorXd& l, int pole_idx) {
    const int d = static_cast<int>(l.size());
    Eigen::VectorXd g(d - 1);
    int k = 0;
    for (int i = 0; i < d; ++i)
        if (i != pole_idx)
            g(k++) = ambient_grad(i) - ambient_grad(pole_idx) * l(i) / l(pole_idx);
    return g;
}

double rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-8);
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

std::vector<Eigen::VectorXd> metropolis_sphere_chain(
    const std::function<double(const Eigen::VectorXd&)>& logpdf, int dim, int iters,
    Rng& rng) {
    std::vector<Eigen::VectorXd> chain;
    chain.reserve(iters);
    Eigen::VectorXd x = rng.unit_sphere(dim);
    double lx = logpdf(x);
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd y = rng.unit_sphere(dim);
        const double ly = logpdf(y);
        if (std::log(rng.uniform()) < ly - lx) {
            x = y;
            lx = ly;
        }
        chain.push_back(x);
    }
    return chain;
}

Eigen::VectorXd random_sphere_point(int dim, Rng& rng, double floor) {
    const double scaled = floor / std::sqrt(static_cast<double>(dim));
    for (;;) {
        Eigen::VectorXd x = rng.unit_sphere(dim);
        if (x.cwiseAbs().minCoeff() >= scaled) return x;
    }
}

}  // namespace sphcorr::oracles
