#pragma once

#include <map>
#include <optional>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"

namespace sphcorr {

// Exponential kernel C(t, t') = gamma * exp(-0.5 |t - t'|^s / rho^s).
struct KernelParams {
    double gamma = 1.0;
    double rho = 1.0;
    double s = 2.0;
    double nugget = 1e-5;

    void validate() const;
};

// Strictly increasing time points; `rescaled` maps an arbitrary grid
// affinely onto [1/N, 1] so uniform grids become n/N (time in (0, 1]).
struct TimeGrid {
    Eigen::VectorXd points;

    explicit TimeGrid(Eigen::VectorXd pts);
    static TimeGrid rescaled(const Eigen::VectorXd& raw);

    int size() const { return static_cast<int>(points.size()); }
};

// Inverse-Gamma(a, b) on gamma, Normal(m, V) on eta = log rho.
struct HyperPrior {
    double a = 1.0;
    double b = 0.1;
    double m = 0.0;
    double V = 1.0;

    void validate() const;
};

// Gram matrix with the configured nugget on the diagonal.  If the Cholesky
// fails the nugget escalates by factors of 10 up to 0.1 before giving up.
Eigen::MatrixXd build_gram(const TimeGrid& grid, const KernelParams& kp);

// log N x D matrix-normal density with row covariance K and unit column
// covariance, additive constants dropped: -(D/2) log|K| - tr(Z^T K^-1 Z)/2.
double vgp_logpdf(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& K);

// Same quadratic form for unit-norm rows about the constant mean row, the
// norm-conditioning terms being constant when every row norm is 1.
double uvgp_logpdf(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean_row,
                   const Eigen::MatrixXd& K);

// (inverse-Gamma log-density of gamma, normal log-density of eta), constants dropped.
std::pair<double, double> hyper_logpdfs(double gamma, double eta, const HyperPrior& hp);

// Per-sweep cache of the unit-scale Gram factor K0(eta).  K(gamma, eta) =
// gamma * K0(eta), so gamma moves rescale and only eta moves refactorize.
class GramCache {
  public:
    GramCache(TimeGrid grid, double s, double nugget);

    const Eigen::LLT<Eigen::MatrixXd>& factor(double eta);
    const Eigen::MatrixXd& gram(double eta);
    double logdet_k0(double eta);

    // tr(Z^T K0(eta)^-1 Z)
    double quad_form(double eta, const Eigen::MatrixXd& Z);

    const TimeGrid& grid() const { return grid_; }

  private:
    void ensure(double eta);

    TimeGrid grid_;
    double s_;
    double nugget_;
    std::optional<double> cached_eta_;
    Eigen::MatrixXd k0_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double logdet_ = 0.0;
};

}  // namespace sphcorr
