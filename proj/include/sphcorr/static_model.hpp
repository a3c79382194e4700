#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/geometry.hpp"
#include "sphcorr/priors.hpp"
#include "sphcorr/rng.hpp"
#include "sphcorr/samplers.hpp"

namespace sphcorr {

enum class StaticPriorKind { IwConditional, SqDirichlet, Vmf, Bingham };

struct StaticPriorSpec {
    StaticPriorKind kind = StaticPriorKind::IwConditional;
    std::vector<Eigen::VectorXd> alpha;  // SqDirichlet rows i = 2..D
    double kappa = 10.0;                 // Vmf
    double zeta = 10.0;                  // Bingham
    double tau_sd = 0.1;                 // log-sd prior scale for non-conjugate priors
};

struct StaticNiwModel {
    Eigen::MatrixXd psi;
    double nu = 0.0;
    Eigen::VectorXd mu0;
    Eigen::MatrixXd data;  // N x D
    StaticPriorSpec prior;

    int dim() const { return static_cast<int>(psi.rows()); }
    int n_obs() const { return static_cast<int>(data.rows()); }
};

// Log-likelihood of the whitened data and its gradients; tau = log sigma.
// y*_n = (y_n - mu0) o exp(-tau).
std::pair<double, Eigen::VectorXd> static_loglik_grad_tau(const Eigen::VectorXd& tau,
                                                          const Eigen::MatrixXd& P,
                                                          const Eigen::MatrixXd& data,
                                                          const Eigen::VectorXd& mu0);

// Gradient with respect to the lower correlation factor, ambient (the
// tangent projection is the sampler's job).
std::pair<double, std::vector<Eigen::VectorXd>> static_loglik_grad_L(
    const CorrCholesky& L, const Eigen::VectorXd& tau, const Eigen::MatrixXd& data,
    const Eigen::VectorXd& mu0);

// Same likelihood in the reversed (upper) factor parameterization.
std::pair<double, Eigen::MatrixXd> static_loglik_grad_U(const Eigen::MatrixXd& Ustar,
                                                        const Eigen::VectorXd& tau,
                                                        const Eigen::MatrixXd& data,
                                                        const Eigen::VectorXd& mu0);

// Conditional log-priors of the inverse-Wishart joint law of (sigma, U*),
// after the tau = log sigma change of variables, with their gradients.
struct IwConditionals {
    double logp_tau = 0.0;
    double logp_u = 0.0;
    Eigen::VectorXd grad_tau;
    Eigen::MatrixXd grad_u;
};

IwConditionals iw_conditional_logpriors(const Eigen::VectorXd& tau,
                                        const Eigen::MatrixXd& Ustar,
                                        const Eigen::MatrixXd& psi, double nu);

// One exact draw from the inverse-Wishart posterior via the Bartlett
// decomposition of the Wishart-distributed precision.
Eigen::MatrixXd iw_direct_posterior(const Eigen::MatrixXd& data, const Eigen::MatrixXd& psi,
                                    double nu, const Eigen::VectorXd& mu0, Rng& rng);

struct StaticChainConfig {
    long iters = 110000;
    long burnin = 11000;  // also the dual-averaging adaptation length
    int thin = 10;
    double a0 = 0.7;
    double h0 = 0.1;
    double tau_h0 = 0.1;
    int tau_leapfrogs = 5;
    StopRule stop_rule = StopRule::TwoOrthants;
    int t_max = 100;
    std::uint64_t seed = 1;
    int diverge_window = 1000;
    double diverge_floor = 0.01;
};

struct StaticChainResult {
    std::vector<Eigen::MatrixXd> sigma;  // retained covariance draws
    std::vector<Eigen::MatrixXd> corr;   // retained correlation draws
    double accept_factor = 0.0;
    double accept_tau = 0.0;
    double h_factor = 0.0;
    double h_tau = 0.0;
    long nonfinite_rejects = 0;
};

// Metropolis-within-Gibbs over (tau, factor): plain HMC for tau, joint
// spherical HMC for the factor rows, both step sizes dual-averaged during
// burn-in.
StaticChainResult run_static_chain(const StaticNiwModel& model, const StaticChainConfig& cfg);

// The conjugate test problem: mu0 = 0, Sigma0 = (I + 11^T)/11.
Eigen::MatrixXd conjugate_testdata(int D, int N, Rng& rng);

struct ValidateIwReport {
    Eigen::MatrixXd ks;  // D x D symmetric table of two-sample KS statistics
    double max_ks = 0.0;
    StaticChainResult chain;
    std::vector<Eigen::MatrixXd> direct;  // Bartlett oracle draws
};

ValidateIwReport validate_iw(const StaticNiwModel& model, const StaticChainConfig& cfg,
                             std::uint64_t oracle_seed);

}  // namespace sphcorr
