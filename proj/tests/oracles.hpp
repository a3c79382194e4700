#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/rng.hpp"

namespace sphcorr::oracles {

// Onion-method draw of a jointly uniform correlation matrix.
Eigen::MatrixXd onion_uniform_corr(int D, Rng& rng);

// Central finite differences of a scalar function of a vector.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step = 1e-6);

// Finite differences of a function on the sphere, taken in the chart of the
// free coordinates (all but pole_idx); the dependent coordinate keeps the
// sign of l(pole_idx).
Eigen::VectorXd fd_gradient_chart(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& l, int pole_idx,
                                  double step = 1e-6);

// Maps an ambient gradient to the same chart for comparison.
Eigen::VectorXd chart_gradient(const Eigen::VectorXd& ambient_grad,
                               const Eigen::VectorXd& l, int pole_idx);

double rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want);

// Independence Metropolis with uniform-on-sphere proposals targeting an
// unnormalized log-density on S^{d-1}; returns the chain of states.
std::vector<Eigen::VectorXd> metropolis_sphere_chain(
    const std::function<double(const Eigen::VectorXd&)>& logpdf, int dim, int iters,
    Rng& rng);

// Random correlation Cholesky rows with all coordinates bounded away from
// zero, handy for gradient checks near generic points.
Eigen::VectorXd random_sphere_point(int dim, Rng& rng, double floor = 0.15);

}  // namespace sphcorr::oracles
