#include "sphcorr/samplers.hpp"

#include <cmath>

namespace sphcorr {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Squared projected gradient norm |g|^2_{P(q)} = g^T (I - qq^T/r^2) g.
double projected_sq_norm(const Eigen::VectorXd& q, const Eigen::VectorXd& g, double r) {
    const double qg = q.dot(g) / r;
    return g.squaredNorm() - qg * qg;
}

void half_kick(const Eigen::VectorXd& q, Eigen::VectorXd& v, const Eigen::VectorXd& g,
               double h, double r) {
    const double scale = q.dot(g) / (r * r);
    v -= 0.5 * h * (g - scale * q);
}

void rotate_inplace(Eigen::VectorXd& q, Eigen::VectorXd& v, double h, double r) {
    const double speed = v.norm();
    if (speed == 0.0) return;
    const double angle = speed * h / r;
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::VectorXd qn = q * c + (r / speed) * v * s;
    Eigen::VectorXd vn = v * c - (speed / r) * q * s;
    qn *= r / qn.norm();
    vn -= qn * (qn.dot(vn) / (r * r));
    q = std::move(qn);
    v = std::move(vn);
}

}  // namespace

std::pair<SpherePoint, TangentVector> sphhmc_leapfrog(
    const SpherePoint& q, const TangentVector& v, double h,
    const std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>& target) {
    const double r = q.radius;
    Eigen::VectorXd qq = q.coords;
    Eigen::VectorXd vv = v.vec;
    Eigen::VectorXd g = target(qq).second;
    if (!all_finite(g)) throw NonFiniteGradient("sphhmc_leapfrog: non-finite gradient");
    half_kick(qq, vv, g, h, r);
    rotate_inplace(qq, vv, h, r);
    g = target(qq).second;
    if (!all_finite(g)) throw NonFiniteGradient("sphhmc_leapfrog: non-finite gradient");
    half_kick(qq, vv, g, h, r);
    SpherePoint qn(std::move(qq), r);
    return {qn, TangentVector(qn, std::move(vv))};
}

double sphhmc_accept_delta(const std::vector<TrajectoryPoint>& traj, double h, double r) {
    const std::size_t T = traj.size() - 1;
    const TrajectoryPoint& a = traj.front();
    const TrajectoryPoint& b = traj.back();
    double delta = b.u_tilde - a.u_tilde;
    delta -= h * h / 8.0 *
             (projected_sq_norm(b.q, b.g, r) - projected_sq_norm(a.q, a.g, r));
    delta -= 0.5 * h * (a.v.dot(a.g) + b.v.dot(b.g));
    for (std::size_t tau = 1; tau < T; ++tau)
        delta -= h * traj[tau].v.dot(traj[tau].g);
    return delta;
}

bool stop_two_orthants(const SpherePoint& q0, const SpherePoint& qt) {
    return q0.coords.dot(qt.coords) < 0.0;
}

bool stop_stochastic(const SpherePoint& q0, const SpherePoint& qt, Rng& rng) {
    const double r2 = q0.radius * q0.radius;
    const double p = 0.5 * (q0.coords.dot(qt.coords) / r2 + 1.0);
    return rng.uniform() >= p;
}

DualAvgState DualAvgState::init(double h0, double a0) {
    DualAvgState st;
    st.mu = std::log(10.0 * h0);
    st.h_bar = 1.0;
    st.a_bar = 0.0;
    st.n = 0;
    st.a0 = a0;
    return st;
}

double dual_averaging_update(DualAvgState& state, double observed_accept) {
    state.n += 1;
    const double n = static_cast<double>(state.n);
    const double w = 1.0 / (n + state.n0);
    state.a_bar = (1.0 - w) * state.a_bar + w * (state.a0 - observed_accept);
    const double log_h = state.mu - std::sqrt(n) / state.gamma * state.a_bar;
    const double mix = std::pow(n, -state.kappa);
    state.h_bar = std::exp(mix * log_h + (1.0 - mix) * std::log(state.h_bar));
    return std::exp(log_h);
}

DeltaStepResult delta_sphhmc_step(const std::vector<SpherePoint>& rows,
                                  const TargetOnSphereProduct& target,
                                  const SphHmcConfig& cfg, Rng& rng) {
    const std::size_t n_rows = rows.size();
    DeltaStepResult out;
    out.rows = rows;

    std::vector<Eigen::VectorXd> q(n_rows), v(n_rows), q0(n_rows);
    std::vector<double> radius(n_rows);
    double product_r2 = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        q[i] = rows[i].coords;
        q0[i] = rows[i].coords;
        radius[i] = rows[i].radius;
        product_r2 += radius[i] * radius[i];
        Eigen::VectorXd z = rng.normal_vector(rows[i].dim());
        const double scale = q[i].dot(z) / (radius[i] * radius[i]);
        v[i] = z - scale * q[i];
    }

    SphereProductEval ev = target.eval(q);
    auto eval_bad = [&](const SphereProductEval& e) {
        if (!std::isfinite(e.u_tilde)) return true;
        for (const auto& g : e.grads)
            if (!all_finite(g)) return true;
        return false;
    };
    if (eval_bad(ev)) {
        out.nonfinite = true;
        return out;
    }

    const double u0 = ev.u_tilde;
    double grad_norm0 = 0.0, ends_sum = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        grad_norm0 += projected_sq_norm(q[i], ev.grads[i], radius[i]);
        ends_sum += v[i].dot(ev.grads[i]);
    }

    const double h = cfg.h;
    double mid_sum = 0.0;
    int steps = 0;
    bool stopped = false;
    while (!stopped) {
        for (std::size_t i = 0; i < n_rows; ++i) {
            half_kick(q[i], v[i], ev.grads[i], h, radius[i]);
            rotate_inplace(q[i], v[i], h, radius[i]);
        }
        ev = target.eval(q);
        if (eval_bad(ev)) {
            out.nonfinite = true;
            return out;
        }
        for (std::size_t i = 0; i < n_rows; ++i) {
            half_kick(q[i], v[i], ev.grads[i], h, radius[i]);
            const double dev = std::abs(q[i].norm() - radius[i]);
            if (dev > out.max_norm_dev) out.max_norm_dev = dev;
        }
        ++steps;

        switch (cfg.stop_rule) {
            case StopRule::FixedT:
                stopped = steps >= cfg.fixed_t;
                break;
            case StopRule::TwoOrthants: {
                double dot = 0.0;
                for (std::size_t i = 0; i < n_rows; ++i) dot += q0[i].dot(q[i]);
                stopped = dot < 0.0;
                break;
            }
            case StopRule::Stochastic: {
                double dot = 0.0;
                for (std::size_t i = 0; i < n_rows; ++i) dot += q0[i].dot(q[i]);
                const double p = 0.5 * (dot / product_r2 + 1.0);
                stopped = rng.uniform() >= p;
                break;
            }
        }
        if (steps >= cfg.t_max) stopped = true;

        if (!stopped)
            for (std::size_t i = 0; i < n_rows; ++i) mid_sum += v[i].dot(ev.grads[i]);
    }

    double grad_norm_t = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        grad_norm_t += projected_sq_norm(q[i], ev.grads[i], radius[i]);
        ends_sum += v[i].dot(ev.grads[i]);
    }
    double delta = (ev.u_tilde - u0) - h * h / 8.0 * (grad_norm_t - grad_norm0) -
                   0.5 * h * ends_sum - h * mid_sum;

    out.steps = steps;
    out.delta_e = delta;
    out.accept_prob = std::isfinite(delta) ? std::min(1.0, std::exp(-delta)) : 0.0;
    if (!std::isfinite(delta)) {
        out.nonfinite = true;
        return out;
    }
    if (std::log(rng.uniform()) < -delta) {
        out.accepted = true;
        for (std::size_t i = 0; i < n_rows; ++i)
            out.rows[i] = SpherePoint(std::move(q[i]), radius[i]);
    }
    return out;
}

Eigen::MatrixXd ess_step(const Eigen::MatrixXd& current, const Eigen::MatrixXd& prior_chol,
                         const std::function<double(const Eigen::MatrixXd&)>& loglik,
                         Rng& rng) {
    const Eigen::MatrixXd nu =
        prior_chol * rng.normal_matrix(current.rows(), current.cols());
    const double log_y = loglik(current) + std::log(rng.uniform());
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double lo = theta - 2.0 * M_PI, hi = theta;
    for (;;) {
        Eigen::MatrixXd proposal = current * std::cos(theta) + nu * std::sin(theta);
        if (loglik(proposal) > log_y) return proposal;
        if (theta < 0.0)
            lo = theta;
        else
            hi = theta;
        theta = rng.uniform(lo, hi);
    }
}

double slice_step_1d(double current, const std::function<double(double)>& logpost, Rng& rng,
                     double width, int max_stepout) {
    const double f0 = logpost(current);
    if (!std::isfinite(f0)) throw Error("slice_step_1d: log-posterior not finite at start");
    const double log_y = f0 + std::log(rng.uniform());
    double lo = current - width * rng.uniform();
    double hi = lo + width;
    int expansions = 0;
    while (logpost(lo) > log_y) {
        lo -= width;
        if (++expansions > max_stepout)
            throw MaxStepoutExceeded("slice_step_1d: stepping out exceeded limit");
    }
    while (logpost(hi) > log_y) {
        hi += width;
        if (++expansions > max_stepout)
            throw MaxStepoutExceeded("slice_step_1d: stepping out exceeded limit");
    }
    for (;;) {
        const double x = rng.uniform(lo, hi);
        if (logpost(x) > log_y) return x;
        if (x < current)
            lo = x;
        else
            hi = x;
    }
}

double gibbs_gamma_ncomp(double Q, int N, double ncomp, const HyperPrior& hp, Rng& rng) {
    if (Q < 0.0) throw InvalidConfig("gibbs_gamma: negative quadratic form");
    const double shape = hp.a + 0.5 * static_cast<double>(N) * ncomp;
    const double rate = hp.b + 0.5 * Q;
    return rng.inv_gamma(shape, rate);
}

double gibbs_gamma(double Q, int N, int D, GibbsBlock which, const HyperPrior& hp, Rng& rng) {
    const double ncomp =
        which == GibbsBlock::Ell ? (D * (D + 1) / 2.0 - 1.0) : static_cast<double>(D);
    return gibbs_gamma_ncomp(Q, N, ncomp, hp, rng);
}

Eigen::MatrixXd gibbs_mu(const std::vector<Eigen::MatrixXd>& Y,
                         const std::vector<Eigen::MatrixXd>& sigma_n,
                         const Eigen::MatrixXd& K_mu, Rng& rng) {
    const int M = static_cast<int>(Y.size());
    if (M == 0) throw InvalidConfig("gibbs_mu: no trials");
    const int N = static_cast<int>(Y[0].rows());
    const int D = static_cast<int>(Y[0].cols());
    if (static_cast<int>(sigma_n.size()) != N || K_mu.rows() != N)
        throw DimensionMismatch("gibbs_mu: inconsistent shapes");

    Eigen::LLT<Eigen::MatrixXd> kmu_llt(K_mu);
    if (kmu_llt.info() != Eigen::Success)
        throw NotPositiveDefinite("gibbs_mu: K_mu is not positive definite");
    const Eigen::MatrixXd kmu_inv = kmu_llt.solve(Eigen::MatrixXd::Identity(N, N));

    std::vector<Eigen::LLT<Eigen::MatrixXd>> sig_llt;
    sig_llt.reserve(N);
    for (int n = 0; n < N; ++n) {
        sig_llt.emplace_back(sigma_n[n]);
        if (sig_llt.back().info() != Eigen::Success)
            throw NotPositiveDefinite("gibbs_mu: Sigma_n is not positive definite at n = " +
                                      std::to_string(n + 1));
    }

    // Precision in channel-major vec order (index k*N + n): the GP prior is
    // block diagonal over channels, the likelihood couples channels within a
    // time point.  This realizes the commutation-matrix conjugation by
    // direct index placement.
    const int nd = N * D;
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(nd, nd);
    for (int k = 0; k < D; ++k) lambda.block(k * N, k * N, N, N) = kmu_inv;
    const double m_count = static_cast<double>(M);
    for (int n = 0; n < N; ++n) {
        const Eigen::MatrixXd prec_n =
            sig_llt[n].solve(Eigen::MatrixXd::Identity(D, D));
        for (int k = 0; k < D; ++k)
            for (int kp = 0; kp < D; ++kp)
                lambda(k * N + n, kp * N + n) += m_count * prec_n(k, kp);
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nd);
    for (int n = 0; n < N; ++n) {
        Eigen::VectorXd ysum = Eigen::VectorXd::Zero(D);
        for (int m = 0; m < M; ++m) ysum += Y[m].row(n).transpose();
        const Eigen::VectorXd s = sig_llt[n].solve(ysum);
        for (int k = 0; k < D; ++k) rhs(k * N + n) = s(k);
    }

    Eigen::LLT<Eigen::MatrixXd> lam_llt(lambda);
    if (lam_llt.info() != Eigen::Success)
        throw NotPositiveDefinite("gibbs_mu: posterior precision is not positive definite");
    const Eigen::VectorXd mean = lam_llt.solve(rhs);
    const Eigen::VectorXd z = rng.normal_vector(nd);
    const Eigen::VectorXd draw =
        mean + lam_llt.matrixU().solve(z);  // cov = (R R^T)^-1

    Eigen::MatrixXd mu(N, D);
    for (int k = 0; k < D; ++k) mu.col(k) = draw.segment(k * N, N);
    return mu;
}

std::pair<Eigen::VectorXd, bool> hmc_step_euclidean(
    const Eigen::VectorXd& q,
    const std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>& target,
    double h, int T, Rng& rng, double* accept_prob) {
    Eigen::VectorXd x = q;
    Eigen::VectorXd p = rng.normal_vector(static_cast<int>(q.size()));
    const Eigen::VectorXd p0 = p;

    auto [logp0, grad] = target(x);
    if (!std::isfinite(logp0) || !all_finite(grad)) {
        if (accept_prob) *accept_prob = 0.0;
        return {q, false};
    }

    double logp1 = logp0;
    p += 0.5 * h * grad;
    for (int t = 0; t < T; ++t) {
        x += h * p;
        auto eval = target(x);
        if (!std::isfinite(eval.first) || !all_finite(eval.second)) {
            if (accept_prob) *accept_prob = 0.0;
            return {q, false};
        }
        logp1 = eval.first;
        grad = eval.second;
        if (t + 1 < T) p += h * grad;
    }
    p += 0.5 * h * grad;

    const double delta_h =
        (-logp1 + 0.5 * p.squaredNorm()) - (-logp0 + 0.5 * p0.squaredNorm());
    const double a = std::isfinite(delta_h) ? std::min(1.0, std::exp(-delta_h)) : 0.0;
    if (accept_prob) *accept_prob = a;
    if (std::isfinite(delta_h) && std::log(rng.uniform()) < -delta_h) return {x, true};
    return {q, false};
}

}  // namespace sphcorr
