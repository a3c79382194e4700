#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/rng.hpp"
#include "sphcorr/trial_data.hpp"

namespace sphcorr {

struct PeriodicTruth {
    Eigen::VectorXd times;
    Eigen::MatrixXd mu;  // N x D
    Eigen::MatrixXd sd;  // N x D
    std::vector<Eigen::MatrixXd> sigma;
    std::vector<Eigen::MatrixXd> corr;
};

// Periodic test process: mu_i(t) = sin(i t pi / D), Cholesky-style loading
// L_ij(t) = (-1)^i sin(i t pi / D) (-1)^j cos(j t pi / D), damping
// S_ij = (|i - j| + 1)^-1, Sigma(t) = L L^T o S.  Sigma(t) is rank-deficient
// at isolated t, so 1e-8 I is added before factorization; the recorded truth
// is the regularized matrix actually generating the data.
std::pair<TrialTensor, PeriodicTruth> generate_periodic(int D, int M, int N, double t0,
                                                        double t1, Rng& rng);

// High-dimensional variant for the banded scalability study: identity rows
// except rows 2 and D, unit variances, so the truth is a correlation matrix
// with exactly two nonzero off-diagonal curves, rho_{1,2} and rho_{D-1,D}.
std::pair<TrialTensor, PeriodicTruth> generate_periodic_sparse(int D, int M, int N, double t0,
                                                               double t1, Rng& rng);

}  // namespace sphcorr
