#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"

namespace sphcorr {

// A point on the sphere S^{d-1}(r) embedded in R^d.
struct SpherePoint {
    Eigen::VectorXd coords;
    double radius = 1.0;

    SpherePoint() = default;
    SpherePoint(Eigen::VectorXd c, double r);

    int dim() const { return static_cast<int>(coords.size()); }
};

// A vector in the tangent space at `base`: <base.coords, vec> = 0.
struct TangentVector {
    SpherePoint base;
    Eigen::VectorXd vec;

    TangentVector() = default;
    TangentVector(SpherePoint b, Eigen::VectorXd v);
};

// (I - r^-2 q q^T) g: ambient-to-tangent projection at q.
TangentVector project_tangent(const SpherePoint& q, const Eigen::VectorXd& g);

// Exact geodesic flow for time h: rotates (q, v) along the great circle
// spanned by q and v.  v = 0 returns the inputs unchanged.
std::pair<SpherePoint, TangentVector> geodesic_rotate(const SpherePoint& q,
                                                      const TangentVector& v, double h);

// Cholesky factor of a correlation matrix, stored as ragged unit-norm rows;
// row i (0-based) has length i+1 and its trailing entry is the diagonal.
class CorrCholesky {
  public:
    CorrCholesky() = default;
    explicit CorrCholesky(std::vector<Eigen::VectorXd> rows);

    static CorrCholesky identity(int dim);

    int dim() const { return static_cast<int>(rows_.size()); }
    const Eigen::VectorXd& row(int i) const { return rows_[i]; }
    Eigen::VectorXd& row(int i) { return rows_[i]; }
    double diagonal(int i) const { return rows_[i](i); }

    Eigen::MatrixXd to_dense() const;  // D x D lower triangular

    // Unit rows, non-degenerate diagonal, unit-diagonal induced P.
    void validate(double tol = 1e-9, double diag_floor = 1e-12) const;

  private:
    std::vector<Eigen::VectorXd> rows_;
};

// Covariance factor under the separation strategy: Sigma = diag(scale) P diag(scale).
struct CovCholesky {
    Eigen::VectorXd scale;
    CorrCholesky factor;

    Eigen::MatrixXd to_cov() const;
};

// P = L L^T from ragged rows.
Eigen::MatrixXd rows_to_corr(const CorrCholesky& L);

// Cholesky of a unit-diagonal SPD matrix, positive-diagonal convention.
CorrCholesky corr_to_rows(const Eigen::MatrixXd& P);

// Upper-triangular U with Sigma = U U^T, computed by index reversal
// (E Sigma E = L L^T, U = E L E) without materializing the exchange matrix.
Eigen::MatrixXd reversed_cholesky(const Eigen::MatrixXd& sigma);

// log |d vech(Sigma) / d vech(U^T)| = D log 2 + sum_i i log|u_ii|  (i = 1..D)
double logdet_jacobian_sigma_to_u(const Eigen::MatrixXd& U);

// log |d vech(L) / d vech(P)| = -D log 2 + sum_i (i - (D+1)) log|l_ii|
double logdet_jacobian_l_to_p(const CorrCholesky& L);

// Row-major half-vectorization of a lower-triangular matrix.
Eigen::VectorXd vech_rowmajor(const Eigen::MatrixXd& lower);

}  // namespace sphcorr
