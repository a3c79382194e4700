#include "sphcorr/geometry.hpp"

#include <cmath>

namespace sphcorr {

SpherePoint::SpherePoint(Eigen::VectorXd c, double r) : coords(std::move(c)), radius(r) {
    if (coords.size() < 1) throw DimensionMismatch("SpherePoint: dimension must be >= 1");
    if (!(radius > 0.0)) throw Error("SpherePoint: radius must be positive");
    const double nrm = coords.norm();
    if (std::abs(nrm - radius) > 1e-9 * radius)
        throw Error("SpherePoint: coordinates are not on the sphere (|norm - r| = " +
                    std::to_string(std::abs(nrm - radius)) + ")");
}

TangentVector::TangentVector(SpherePoint b, Eigen::VectorXd v)
    : base(std::move(b)), vec(std::move(v)) {
    if (vec.size() != base.coords.size())
        throw DimensionMismatch("TangentVector: vector dimension does not match base point");
    const double ip = std::abs(base.coords.dot(vec));
    if (ip > 1e-9 * base.radius * vec.norm() + 1e-15)
        throw Error("TangentVector: not orthogonal to base point");
}

TangentVector project_tangent(const SpherePoint& q, const Eigen::VectorXd& g) {
    if (g.size() != q.coords.size())
        throw DimensionMismatch("project_tangent: gradient dimension mismatch");
    const double scale = q.coords.dot(g) / (q.radius * q.radius);
    return TangentVector(q, g - scale * q.coords);
}

std::pair<SpherePoint, TangentVector> geodesic_rotate(const SpherePoint& q,
                                                      const TangentVector& v, double h) {
    const double speed = v.vec.norm();
    if (speed == 0.0) return {q, v};
    const double r = q.radius;
    const double angle = speed * h / r;
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::VectorXd qn = q.coords * c + (r / speed) * v.vec * s;
    Eigen::VectorXd vn = v.vec * c - (speed / r) * q.coords * s;
    // The closed form is exact; renormalize to stop round-off drift from
    // accumulating over long trajectories.
    qn *= r / qn.norm();
    vn -= qn * (qn.dot(vn) / (r * r));
    SpherePoint qp(std::move(qn), r);
    return {qp, TangentVector(qp, std::move(vn))};
}

CorrCholesky::CorrCholesky(std::vector<Eigen::VectorXd> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].size() != static_cast<Eigen::Index>(i + 1))
            throw DimensionMismatch("CorrCholesky: row " + std::to_string(i + 1) +
                                    " has wrong length");
}

CorrCholesky CorrCholesky::identity(int dim) {
    std::vector<Eigen::VectorXd> rows(dim);
    for (int i = 0; i < dim; ++i) {
        rows[i] = Eigen::VectorXd::Zero(i + 1);
        rows[i](i) = 1.0;
    }
    return CorrCholesky(std::move(rows));
}

Eigen::MatrixXd CorrCholesky::to_dense() const {
    const int d = dim();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) L.row(i).head(i + 1) = rows_[i].transpose();
    return L;
}

void CorrCholesky::validate(double tol, double diag_floor) const {
    for (int i = 0; i < dim(); ++i) {
        if (std::abs(rows_[i].norm() - 1.0) > tol)
            throw RowNotUnitNorm("CorrCholesky: row " + std::to_string(i + 1) +
                                 " is not unit norm");
        if (std::abs(rows_[i](i)) <= diag_floor)
            throw ZeroDiagonal("CorrCholesky: diagonal entry " + std::to_string(i + 1) +
                               " is on the excluded equator");
    }
}

Eigen::MatrixXd CovCholesky::to_cov() const {
    Eigen::MatrixXd P = rows_to_corr(factor);
    return scale.asDiagonal() * P * scale.asDiagonal();
}

Eigen::MatrixXd rows_to_corr(const CorrCholesky& L) {
    const int d = L.dim();
    Eigen::MatrixXd P(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            const int k = std::min(i, j) + 1;
            const double v = L.row(i).head(k).dot(L.row(j).head(k));
            P(i, j) = v;
            P(j, i) = v;
        }
    }
    return P;
}

CorrCholesky corr_to_rows(const Eigen::MatrixXd& P) {
    const int d = static_cast<int>(P.rows());
    if (P.cols() != d) throw DimensionMismatch("corr_to_rows: matrix is not square");
    for (int i = 0; i < d; ++i)
        if (std::abs(P(i, i) - 1.0) > 1e-8)
            throw NotUnitDiagonal("corr_to_rows: diagonal entry " + std::to_string(i + 1) +
                                  " is not 1");
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("corr_to_rows: Cholesky factorization failed");
    Eigen::MatrixXd L = llt.matrixL();
    std::vector<Eigen::VectorXd> rows(d);
    for (int i = 0; i < d; ++i) rows[i] = L.row(i).head(i + 1).transpose();
    return CorrCholesky(std::move(rows));
}

Eigen::MatrixXd reversed_cholesky(const Eigen::MatrixXd& sigma) {
    const int d = static_cast<int>(sigma.rows());
    if (sigma.cols() != d) throw DimensionMismatch("reversed_cholesky: matrix is not square");
    Eigen::MatrixXd flipped(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) flipped(i, j) = sigma(d - 1 - i, d - 1 - j);
    Eigen::LLT<Eigen::MatrixXd> llt(flipped);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("reversed_cholesky: matrix is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) U(i, j) = L(d - 1 - i, d - 1 - j);
    return U;
}

double logdet_jacobian_sigma_to_u(const Eigen::MatrixXd& U) {
    const int d = static_cast<int>(U.rows());
    double acc = d * std::log(2.0);
    for (int i = 0; i < d; ++i) {
        const double u = U(i, i);
        if (u == 0.0) throw ZeroDiagonal("logdet_jacobian_sigma_to_u: zero diagonal entry");
        acc += (i + 1) * std::log(std::abs(u));
    }
    return acc;
}

double logdet_jacobian_l_to_p(const CorrCholesky& L) {
    const int d = L.dim();
    double acc = -d * std::log(2.0);
    for (int i = 0; i < d; ++i) {
        const double l = L.diagonal(i);
        if (l == 0.0) throw ZeroDiagonal("logdet_jacobian_l_to_p: zero diagonal entry");
        acc += ((i + 1) - (d + 1)) * std::log(std::abs(l));
    }
    return acc;
}

Eigen::VectorXd vech_rowmajor(const Eigen::MatrixXd& lower) {
    const int d = static_cast<int>(lower.rows());
    Eigen::VectorXd out(d * (d + 1) / 2);
    int k = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) out(k++) = lower(i, j);
    return out;
}

}  // namespace sphcorr
