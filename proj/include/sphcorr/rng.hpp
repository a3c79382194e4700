#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace sphcorr {

// One Rng per chain. Helper draws construct their std distribution on the
// fly so the only persistent state is the engine itself; a chain replays
// bit-identically from its seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::mt19937_64& engine() { return gen_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = normal();
        return z;
    }

    Eigen::MatrixXd normal_matrix(int rows, int cols) {
        Eigen::MatrixXd z(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) z(i, j) = normal();
        return z;
    }

    double gamma(double shape, double scale) {
        double x = 0.0;
        // gamma(shape<1) can underflow to exactly 0 for tiny shapes; redraw.
        do {
            x = std::gamma_distribution<double>(shape, scale)(gen_);
        } while (x <= 0.0);
        return x;
    }

    double inv_gamma(double shape, double rate) { return 1.0 / gamma(shape, 1.0 / rate); }

    double chi_squared(double df) { return gamma(0.5 * df, 2.0); }

    double chi(double df) { return std::sqrt(chi_squared(df)); }

    double beta(double a, double b) {
        double x = gamma(a, 1.0);
        double y = gamma(b, 1.0);
        return x / (x + y);
    }

    Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha) {
        Eigen::VectorXd g(alpha.size());
        for (int i = 0; i < alpha.size(); ++i) g(i) = gamma(alpha(i), 1.0);
        return g / g.sum();
    }

    // Uniform on the unit sphere in R^n.
    Eigen::VectorXd unit_sphere(int n) {
        Eigen::VectorXd z;
        double nrm = 0.0;
        do {
            z = normal_vector(n);
            nrm = z.norm();
        } while (nrm == 0.0);
        return z / nrm;
    }

    bool rademacher() { return uniform() < 0.5; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace sphcorr
