#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"

namespace sphcorr {

// sup_x |F_n(x) - F(x)| against a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic critical values; alpha in {0.05, 0.01}.
double ks_critical(std::size_t n, double alpha);
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);
double quantile_sorted(const std::vector<double>& sorted, double p);

double normal_cdf(double x);

// CDF of the marginal correlation under a jointly uniform correlation
// matrix: density proportional to (1 - rho^2)^((D-2)/2) on (-1, 1).
double jointly_uniform_corr_cdf(double rho, int D);

// Pearson chi-square statistic for uniformity of sign octants of points on
// S^2; 7 degrees of freedom, 1% critical value 18.4753.
double octant_chi_square(const std::vector<Eigen::Vector3d>& points);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

}  // namespace sphcorr
