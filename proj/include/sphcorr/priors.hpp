#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"
#include "sphcorr/geometry.hpp"
#include "sphcorr/rng.hpp"

namespace sphcorr {

// Log-densities below are unnormalized: MCMC only ever needs ratios, and the
// normalizers (multivariate gamma, Bessel, hypergeometric) never enter.

struct SqDirichletParams {
    Eigen::VectorXd alpha;

    explicit SqDirichletParams(Eigen::VectorXd a);
};

// sum_k (2 alpha_k - 1) log|l_k|
double sqdir_logpdf(const Eigen::VectorXd& l, const SqDirichletParams& p);

// (2 alpha_k - 1) / l_k per coordinate, in the ambient space.
Eigen::VectorXd sqdir_grad(const Eigen::VectorXd& l, const SqDirichletParams& p);

// l_k = s_k sqrt(x_k), x ~ Dirichlet(alpha), s_k independent uniform signs.
SpherePoint sqdir_sample(const SqDirichletParams& p, Rng& rng);

// Concentration vectors that make P = L L^T jointly uniform, rows i = 2..D.
std::vector<SqDirichletParams> jointly_uniform_alpha(int D);

// Row-i concentration of the marginally uniform construction; throws
// NonPositiveAlpha where the formula leaves the Dirichlet domain (always at
// i = 2), which is surfaced rather than patched.
Eigen::VectorXd marginally_uniform_alpha_row(int D, int i);
std::vector<SqDirichletParams> marginally_uniform_alpha(int D);

struct VmfParams {
    double kappa;
    Eigen::VectorXd mu;

    VmfParams(double k, Eigen::VectorXd direction);
};

double vmf_logpdf(const Eigen::VectorXd& l, const VmfParams& p);
Eigen::VectorXd vmf_grad(const Eigen::VectorXd& l, const VmfParams& p);

// Polar form A = zeta * diag(n_i): density depends on the last coordinate only.
struct BinghamParams {
    double zeta = 0.0;
};

double bingham_logpdf(const Eigen::VectorXd& l, const BinghamParams& p);
Eigen::VectorXd bingham_grad(const Eigen::VectorXd& l, const BinghamParams& p);

struct UnitVecGaussParams {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

double uvgauss_logpdf(const Eigen::VectorXd& l, const UnitVecGaussParams& p);

}  // namespace sphcorr
