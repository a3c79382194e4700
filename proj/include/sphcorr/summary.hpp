#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/dynamic_model.hpp"
#include "sphcorr/periodic.hpp"

namespace sphcorr {

// Pointwise posterior mean and 95% band for one process family; column j of
// each grid is entry j of the family (channel, or pair index for rho).
struct CurveSummary {
    Eigen::MatrixXd mean, lo, hi;  // N x n_entries
};

struct PosteriorSummary {
    Eigen::VectorXd times;
    CurveSummary mu, sd, rho, sigma;
    std::vector<std::pair<int, int>> rho_pairs;    // (i, j), i > j, within band
    std::vector<std::pair<int, int>> sigma_pairs;  // (i, j), i >= j, within band

    // Truth-dependent fields (set when a truth record is supplied).
    double coverage_mu = 0.0;
    double coverage_sd = 0.0;
    double coverage_sigma = 0.0;
    double coverage_rho = 0.0;
    Eigen::VectorXd two_norm_error;  // ||Phat(t) - P(t)||_2 per grid point
    double mise_mu = 0.0;            // grid-averaged squared error of the mean curve
    double mise_sigma = 0.0;
};

// Requires at least 100 retained samples.
PosteriorSummary summarize_posterior(const DynamicSamples& samples,
                                     const PeriodicTruth* truth = nullptr);

// ||A(t) - B(t)||_F between two estimated correlation processes.
Eigen::VectorXd frobenius_distance_curve(const std::vector<Eigen::MatrixXd>& a,
                                         const std::vector<Eigen::MatrixXd>& b);

// Posterior-mean correlation matrices per grid point.
std::vector<Eigen::MatrixXd> mean_correlation_curve(const DynamicSamples& samples);

}  // namespace sphcorr
