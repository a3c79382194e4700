#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"
#include "sphcorr/geometry.hpp"
#include "sphcorr/gp.hpp"
#include "sphcorr/rng.hpp"

namespace sphcorr {

enum class StopRule { TwoOrthants, Stochastic, FixedT };

struct SphHmcConfig {
    double h = 0.1;
    int t_max = 100;
    StopRule stop_rule = StopRule::TwoOrthants;
    int fixed_t = 10;  // used by StopRule::FixedT only
};

// Target over a product of spheres: eval returns the potential
// U~(q) = -log f(q) + sum of per-sphere chart corrections, together with the
// ambient gradient per row.  A non-finite value or gradient makes the
// sampler reject the move.
struct SphereProductEval {
    double u_tilde = 0.0;
    std::vector<Eigen::VectorXd> grads;
};

struct TargetOnSphereProduct {
    std::function<SphereProductEval(const std::vector<Eigen::VectorXd>&)> eval;
};

// One geometric-integrator step on a single sphere: half kick, exact
// geodesic rotation, half kick.
std::pair<SpherePoint, TangentVector> sphhmc_leapfrog(
    const SpherePoint& q, const TangentVector& v, double h,
    const std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>& target);

// Recorded trajectory point for the reformulated acceptance test.
struct TrajectoryPoint {
    Eigen::VectorXd q, v, g;
    double u_tilde = 0.0;
};

// Energy difference along a stored trajectory, written in terms of the
// potential gradients only (the kinetic terms telescope away).
double sphhmc_accept_delta(const std::vector<TrajectoryPoint>& traj, double h, double r = 1.0);

bool stop_two_orthants(const SpherePoint& q0, const SpherePoint& qt);
bool stop_stochastic(const SpherePoint& q0, const SpherePoint& qt, Rng& rng);

struct DualAvgState {
    double mu = 0.0;        // log(10 h0)
    double h_bar = 1.0;
    double a_bar = 0.0;
    int n = 0;
    double gamma = 0.05;
    int n0 = 10;
    double kappa = 0.75;
    double a0 = 0.7;

    static DualAvgState init(double h0, double a0 = 0.7);
    double frozen_h() const { return h_bar; }
};

// One dual-averaging update; returns the step size for the next iteration.
double dual_averaging_update(DualAvgState& state, double observed_accept);

struct DeltaStepResult {
    std::vector<SpherePoint> rows;
    bool accepted = false;
    int steps = 0;
    double delta_e = 0.0;
    double accept_prob = 0.0;
    bool nonfinite = false;   // gradient or potential went non-finite; move rejected
    double max_norm_dev = 0.0;  // renormalization audit
};

// Joint update of every row with a shared trajectory and a single
// accept/reject on the summed energy difference.
DeltaStepResult delta_sphhmc_step(const std::vector<SpherePoint>& rows,
                                  const TargetOnSphereProduct& target,
                                  const SphHmcConfig& cfg, Rng& rng);

// Elliptical slice sampling for a centered matrix-normal prior with row
// covariance K (columns independent).  prior_chol is the lower Cholesky
// factor of K.
Eigen::MatrixXd ess_step(const Eigen::MatrixXd& current, const Eigen::MatrixXd& prior_chol,
                         const std::function<double(const Eigen::MatrixXd&)>& loglik,
                         Rng& rng);

// Univariate slice sampler with stepping out and shrinkage.
double slice_step_1d(double current, const std::function<double(double)>& logpost, Rng& rng,
                     double width = 1.0, int max_stepout = 50);

enum class GibbsBlock { Mu, Tau, Ell };

// Conjugate inverse-Gamma draw for a GP scale given the unit-scale residual
// quadratic form Q = tr(.^T K0^-1 .).  The Ell block counts D(D+1)/2 - 1
// free components per time point.
double gibbs_gamma(double Q, int N, int D, GibbsBlock which, const HyperPrior& hp, Rng& rng);
double gibbs_gamma_ncomp(double Q, int N, double ncomp, const HyperPrior& hp, Rng& rng);

// Conjugate Gaussian draw of the mean grid.  Y holds M trials (each N x D),
// sigma_n the per-time-point covariances; the vec-permutation is applied by
// index bookkeeping, with no ND x ND commutation matrix ever formed.
Eigen::MatrixXd gibbs_mu(const std::vector<Eigen::MatrixXd>& Y,
                         const std::vector<Eigen::MatrixXd>& sigma_n,
                         const Eigen::MatrixXd& K_mu, Rng& rng);

// Plain HMC on an unconstrained vector; target returns (log-density, gradient).
std::pair<Eigen::VectorXd, bool> hmc_step_euclidean(
    const Eigen::VectorXd& q,
    const std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>& target,
    double h, int T, Rng& rng, double* accept_prob = nullptr);

}  // namespace sphcorr
