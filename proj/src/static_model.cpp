#include "sphcorr/static_model.hpp"

#include <cmath>
#include <limits>

#include "sphcorr/stats.hpp"

namespace sphcorr {

namespace {

constexpr double kDiagFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd whiten(const Eigen::MatrixXd& data, const Eigen::VectorXd& mu0,
                       const Eigen::VectorXd& tau) {
    const Eigen::ArrayXd inv_sd = (-tau.array()).exp();
    Eigen::MatrixXd ystar = data.rowwise() - mu0.transpose();
    ystar.array().rowwise() *= inv_sd.transpose();
    return ystar;
}

}  // namespace

std::pair<double, Eigen::VectorXd> static_loglik_grad_tau(const Eigen::VectorXd& tau,
                                                          const Eigen::MatrixXd& P,
                                                          const Eigen::MatrixXd& data,
                                                          const Eigen::VectorXd& mu0) {
    const int N = static_cast<int>(data.rows());
    const int D = static_cast<int>(data.cols());
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("static_loglik_grad_tau: P is not positive definite");
    const double logdet_p =
        2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();

    const Eigen::MatrixXd ystar = whiten(data, mu0, tau);
    const Eigen::MatrixXd solved = llt.solve(ystar.transpose());  // D x N
    const double quad = (ystar.transpose().array() * solved.array()).sum();
    const double ll = -N * tau.sum() - 0.5 * N * logdet_p - 0.5 * quad;

    Eigen::VectorXd grad = Eigen::VectorXd::Constant(D, -static_cast<double>(N));
    grad += (ystar.transpose().array() * solved.array()).rowwise().sum().matrix();
    return {ll, grad};
}

std::pair<double, std::vector<Eigen::VectorXd>> static_loglik_grad_L(
    const CorrCholesky& L, const Eigen::VectorXd& tau, const Eigen::MatrixXd& data,
    const Eigen::VectorXd& mu0) {
    const int N = static_cast<int>(data.rows());
    const int D = L.dim();
    for (int i = 0; i < D; ++i)
        if (L.diagonal(i) == 0.0)
            throw ZeroDiagonal("static_loglik_grad_L: zero diagonal entry");

    const Eigen::MatrixXd Ld = L.to_dense();
    const auto lower = Ld.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd ystar = whiten(data, mu0, tau);

    // z = L^-1 y*, u = L^-T z = P^-1 y*
    const Eigen::MatrixXd z = lower.solve(ystar.transpose());            // D x N
    const Eigen::MatrixXd u = lower.transpose().solve(z);                // D x N
    double logdiag = 0.0;
    for (int i = 0; i < D; ++i) logdiag += std::log(std::abs(Ld(i, i)));
    const double ll = -N * tau.sum() - N * logdiag - 0.5 * z.squaredNorm();

    // tril(P^-1 sum_n y* y*^T L^-T) = tril(u z^T) summed over observations.
    const Eigen::MatrixXd uz = u * z.transpose();  // D x D
    std::vector<Eigen::VectorXd> grad(D);
    for (int i = 0; i < D; ++i) {
        grad[i] = uz.row(i).head(i + 1).transpose();
        grad[i](i) -= N / Ld(i, i);
    }
    return {ll, grad};
}

std::pair<double, Eigen::MatrixXd> static_loglik_grad_U(const Eigen::MatrixXd& Ustar,
                                                        const Eigen::VectorXd& tau,
                                                        const Eigen::MatrixXd& data,
                                                        const Eigen::VectorXd& mu0) {
    const int N = static_cast<int>(data.rows());
    const int D = static_cast<int>(Ustar.rows());
    for (int i = 0; i < D; ++i)
        if (Ustar(i, i) == 0.0)
            throw ZeroDiagonal("static_loglik_grad_U: zero diagonal entry");

    const auto upper = Ustar.triangularView<Eigen::Upper>();
    const Eigen::MatrixXd ystar = whiten(data, mu0, tau);
    const Eigen::MatrixXd z = upper.solve(ystar.transpose());      // U^-1 y*
    const Eigen::MatrixXd u = upper.transpose().solve(z);          // P^-1 y*
    double logdiag = 0.0;
    for (int i = 0; i < D; ++i) logdiag += std::log(std::abs(Ustar(i, i)));
    const double ll = -N * tau.sum() - N * logdiag - 0.5 * z.squaredNorm();

    Eigen::MatrixXd grad = (u * z.transpose()).triangularView<Eigen::Upper>();
    for (int i = 0; i < D; ++i) grad(i, i) -= N / Ustar(i, i);
    return {ll, grad};
}

IwConditionals iw_conditional_logpriors(const Eigen::VectorXd& tau,
                                        const Eigen::MatrixXd& Ustar,
                                        const Eigen::MatrixXd& psi, double nu) {
    const int D = static_cast<int>(Ustar.rows());
    for (int i = 0; i < D; ++i)
        if (Ustar(i, i) == 0.0)
            throw ZeroDiagonal("iw_conditional_logpriors: zero diagonal entry");

    const Eigen::VectorXd inv_sd = (-tau.array()).exp().matrix();
    const auto upper = Ustar.triangularView<Eigen::Upper>();

    // B = P^-1 diag(e^-tau) Psi diag(e^-tau), shared by value and gradients.
    const Eigen::MatrixXd psi_scaled =
        inv_sd.asDiagonal() * psi * inv_sd.asDiagonal();
    const Eigen::MatrixXd B = upper.transpose().solve(
        Eigen::MatrixXd(upper.solve(psi_scaled)));  // P^-1 (Dinv Psi Dinv)
    const double quad = -0.5 * B.trace();

    IwConditionals out;
    out.logp_tau = quad;
    out.logp_u = quad;
    out.grad_tau = Eigen::VectorXd(D);
    for (int i = 0; i < D; ++i) {
        const double idx = static_cast<double>(i + 1);
        out.logp_tau += (idx - (nu + D)) * tau(i);
        out.logp_u += (idx - (nu + D + 1.0)) * std::log(std::abs(Ustar(i, i)));
    }

    // d/dtau of the exponent: diag(Psi Dinv P^-1) o e^-tau; note
    // tr(Psi Dinv P^-1 Dinv d tau) has P^-1 and Psi in either order by
    // symmetry of the trace, so reuse B^T = Dinv Psi Dinv P^-T = (Psi Dinv P^-1 Dinv)^T.
    for (int i = 0; i < D; ++i)
        out.grad_tau(i) = static_cast<double>(i + 1) - (nu + D) + B(i, i);

    // triu(P^-1 Dinv Psi Dinv U^-T) = triu(B U^-T) with B U^-T = (U^-1 B^T)^T
    out.grad_u = Eigen::MatrixXd(upper.solve(Eigen::MatrixXd(B.transpose())))
                     .transpose()
                     .triangularView<Eigen::Upper>();
    for (int i = 0; i < D; ++i)
        out.grad_u(i, i) += (static_cast<double>(i + 1) - (nu + D + 1.0)) / Ustar(i, i);
    return out;
}

Eigen::MatrixXd iw_direct_posterior(const Eigen::MatrixXd& data, const Eigen::MatrixXd& psi,
                                    double nu, const Eigen::VectorXd& mu0, Rng& rng) {
    const int D = static_cast<int>(psi.rows());
    const int N = static_cast<int>(data.rows());
    Eigen::MatrixXd scale = psi;
    for (int n = 0; n < N; ++n) {
        const Eigen::VectorXd r = data.row(n).transpose() - mu0;
        scale += r * r.transpose();
    }
    const double df = nu + N;

    Eigen::LLT<Eigen::MatrixXd> scale_llt(scale);
    if (scale_llt.info() != Eigen::Success)
        throw NotPositiveDefinite("iw_direct_posterior: posterior scale is not PD");
    const Eigen::MatrixXd scale_inv =
        scale_llt.solve(Eigen::MatrixXd::Identity(D, D));
    Eigen::LLT<Eigen::MatrixXd> c_llt(scale_inv);
    if (c_llt.info() != Eigen::Success)
        throw NotPositiveDefinite("iw_direct_posterior: inverse scale is not PD");
    const Eigen::MatrixXd C = c_llt.matrixL();

    Eigen::MatrixXd tstar = Eigen::MatrixXd::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        tstar(i, i) = rng.chi(df - i);
        for (int j = 0; j < i; ++j) tstar(i, j) = rng.normal();
    }
    const Eigen::MatrixXd T = C * tstar;  // Sigma^-1 = T T^T
    const Eigen::MatrixXd tinv =
        T.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(D, D));
    return tinv.transpose() * tinv;
}

Eigen::MatrixXd conjugate_testdata(int D, int N, Rng& rng) {
    Eigen::MatrixXd sigma0 =
        (Eigen::MatrixXd::Identity(D, D) + Eigen::MatrixXd::Ones(D, D)) / 11.0;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma0);
    Eigen::MatrixXd chol = llt.matrixL();
    Eigen::MatrixXd data(N, D);
    for (int n = 0; n < N; ++n) data.row(n) = (chol * rng.normal_vector(D)).transpose();
    return data;
}

namespace {

// --- reversed-factor (U*) state for the inverse-Wishart conditional prior ---

struct UstarState {
    int D;
    std::vector<SpherePoint> rows;  // rows 1..D-1 (1-based), each on S^{D-i}

    static UstarState identity(int D) {
        UstarState st;
        st.D = D;
        for (int i = 0; i < D - 1; ++i) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(D - i);
            c(0) = 1.0;  // diagonal entry leads the stored block
            st.rows.emplace_back(std::move(c), 1.0);
        }
        return st;
    }

    Eigen::MatrixXd to_matrix() const {
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(D, D);
        for (int i = 0; i < D - 1; ++i)
            U.row(i).segment(i, D - i) = rows[i].coords.transpose();
        U(D - 1, D - 1) = 1.0;
        return U;
    }
};

Eigen::MatrixXd rows_to_ustar(int D, const std::vector<Eigen::VectorXd>& rows) {
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(D, D);
    for (int i = 0; i < D - 1; ++i) U.row(i).segment(i, D - i) = rows[i].transpose();
    U(D - 1, D - 1) = 1.0;
    return U;
}

SphereProductEval bad_eval(std::size_t n_rows) {
    SphereProductEval ev;
    ev.u_tilde = kInf;
    ev.grads.assign(n_rows, Eigen::VectorXd());
    return ev;
}

// --- lower-factor state for squared-Dirichlet / vMF / Bingham priors ---

struct LowerState {
    int D;
    std::vector<SpherePoint> rows;  // rows 2..D (1-based), pole = trailing coord

    static LowerState identity(int D) {
        LowerState st;
        st.D = D;
        for (int i = 1; i < D; ++i) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(i + 1);
            c(i) = 1.0;
            st.rows.emplace_back(std::move(c), 1.0);
        }
        return st;
    }

    CorrCholesky to_chol() const {
        std::vector<Eigen::VectorXd> all(D);
        all[0] = Eigen::VectorXd::Ones(1);
        for (int i = 1; i < D; ++i) all[i] = rows[i - 1].coords;
        return CorrCholesky(std::move(all));
    }
};

double prior_logpdf_row(const StaticPriorSpec& spec, int row_index,
                        const Eigen::VectorXd& l) {
    switch (spec.kind) {
        case StaticPriorKind::SqDirichlet:
            return sqdir_logpdf(l, SqDirichletParams(spec.alpha[row_index]));
        case StaticPriorKind::Vmf: {
            Eigen::VectorXd pole = Eigen::VectorXd::Zero(l.size());
            pole(l.size() - 1) = 1.0;
            return vmf_logpdf(l, VmfParams(spec.kappa, std::move(pole)));
        }
        case StaticPriorKind::Bingham:
            return bingham_logpdf(l, BinghamParams{spec.zeta});
        default:
            throw InvalidConfig("prior_logpdf_row: not a row prior");
    }
}

Eigen::VectorXd prior_grad_row(const StaticPriorSpec& spec, int row_index,
                               const Eigen::VectorXd& l) {
    switch (spec.kind) {
        case StaticPriorKind::SqDirichlet:
            return sqdir_grad(l, SqDirichletParams(spec.alpha[row_index]));
        case StaticPriorKind::Vmf: {
            Eigen::VectorXd pole = Eigen::VectorXd::Zero(l.size());
            pole(l.size() - 1) = 1.0;
            return vmf_grad(l, VmfParams(spec.kappa, std::move(pole)));
        }
        case StaticPriorKind::Bingham:
            return bingham_grad(l, BinghamParams{spec.zeta});
        default:
            throw InvalidConfig("prior_grad_row: not a row prior");
    }
}

}  // namespace

StaticChainResult run_static_chain(const StaticNiwModel& model, const StaticChainConfig& cfg) {
    const int D = model.dim();
    const int N = model.n_obs();
    if (cfg.iters <= cfg.burnin || cfg.burnin < 0 || cfg.thin < 1)
        throw InvalidConfig("run_static_chain: need iters > burnin >= 0 and thin >= 1");
    Rng rng(cfg.seed);

    const bool use_ustar = model.prior.kind == StaticPriorKind::IwConditional;
    UstarState ustate = UstarState::identity(D);
    LowerState lstate = LowerState::identity(D);
    Eigen::VectorXd tau = Eigen::VectorXd::Zero(D);

    // Targets close over tau (updated in place between Gibbs stages).
    TargetOnSphereProduct factor_target;
    if (use_ustar) {
        factor_target.eval = [&](const std::vector<Eigen::VectorXd>& rows) {
            for (const auto& r : rows)
                if (std::abs(r(0)) <= kDiagFloor) return bad_eval(rows.size());
            const Eigen::MatrixXd U = rows_to_ustar(D, rows);
            const auto [ll, ll_grad] = static_loglik_grad_U(U, tau, model.data, model.mu0);
            const IwConditionals pri =
                iw_conditional_logpriors(tau, U, model.psi, model.nu);
            SphereProductEval ev;
            ev.u_tilde = -(ll + pri.logp_u);
            ev.grads.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const int ii = static_cast<int>(i);
                Eigen::VectorXd g =
                    -(ll_grad.row(ii).segment(ii, D - ii) +
                      pri.grad_u.row(ii).segment(ii, D - ii))
                         .transpose();
                g(0) += 1.0 / rows[i](0);  // chart correction log|u_ii|
                ev.u_tilde += std::log(std::abs(rows[i](0)));
                ev.grads[i] = std::move(g);
            }
            return ev;
        };
    } else {
        factor_target.eval = [&](const std::vector<Eigen::VectorXd>& rows) {
            for (const auto& r : rows)
                if (std::abs(r(r.size() - 1)) <= kDiagFloor) return bad_eval(rows.size());
            std::vector<Eigen::VectorXd> all(D);
            all[0] = Eigen::VectorXd::Ones(1);
            for (int i = 1; i < D; ++i) all[i] = rows[i - 1];
            const CorrCholesky L(std::move(all));
            const auto [ll, ll_grad] = static_loglik_grad_L(L, tau, model.data, model.mu0);
            SphereProductEval ev;
            ev.u_tilde = -ll;
            ev.grads.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const int row_index = static_cast<int>(i) + 1;  // 0-based row in L
                ev.u_tilde -= prior_logpdf_row(model.prior, static_cast<int>(i), rows[i]);
                ev.u_tilde += std::log(std::abs(rows[i](row_index)));
                Eigen::VectorXd g = -ll_grad[row_index] -
                                    prior_grad_row(model.prior, static_cast<int>(i), rows[i]);
                g(row_index) += 1.0 / rows[i](row_index);
                ev.grads[i] = std::move(g);
            }
            return ev;
        };
    }

    auto tau_target = [&](const Eigen::VectorXd& t)
        -> std::pair<double, Eigen::VectorXd> {
        if (use_ustar) {
            const Eigen::MatrixXd U = ustate.to_matrix();
            const Eigen::MatrixXd P = U * U.transpose();
            auto [ll, g] = static_loglik_grad_tau(t, P, model.data, model.mu0);
            const IwConditionals pri = iw_conditional_logpriors(t, U, model.psi, model.nu);
            return {ll + pri.logp_tau, g + pri.grad_tau};
        }
        const Eigen::MatrixXd P = rows_to_corr(lstate.to_chol());
        auto [ll, g] = static_loglik_grad_tau(t, P, model.data, model.mu0);
        const double sd2 = model.prior.tau_sd * model.prior.tau_sd;
        return {ll - 0.5 * t.squaredNorm() / sd2, g - t / sd2};
    };

    SphHmcConfig sph_cfg;
    sph_cfg.h = cfg.h0;
    sph_cfg.t_max = cfg.t_max;
    sph_cfg.stop_rule = cfg.stop_rule;
    DualAvgState da_sph = DualAvgState::init(cfg.h0, cfg.a0);
    DualAvgState da_tau = DualAvgState::init(cfg.tau_h0, cfg.a0);
    double tau_h = cfg.tau_h0;

    StaticChainResult out;
    long accept_sph = 0, accept_tau = 0;
    long window_accepts = 0, window_count = 0;

    for (long it = 0; it < cfg.iters; ++it) {
        double tau_prob = 0.0;
        auto [tau_new, tau_acc] =
            hmc_step_euclidean(tau, tau_target, tau_h, cfg.tau_leapfrogs, rng, &tau_prob);
        tau = tau_new;
        if (tau_acc) ++accept_tau;

        std::vector<SpherePoint>& rows = use_ustar ? ustate.rows : lstate.rows;
        DeltaStepResult step = delta_sphhmc_step(rows, factor_target, sph_cfg, rng);
        if (step.nonfinite) ++out.nonfinite_rejects;
        if (step.accepted) {
            rows = step.rows;
            ++accept_sph;
            ++window_accepts;
        }
        ++window_count;

        if (it < cfg.burnin) {
            sph_cfg.h = dual_averaging_update(da_sph, step.accept_prob);
            tau_h = dual_averaging_update(da_tau, tau_prob);
            if (it + 1 == cfg.burnin) {
                sph_cfg.h = da_sph.frozen_h();
                tau_h = da_tau.frozen_h();
            }
        } else if (window_count >= cfg.diverge_window) {
            if (static_cast<double>(window_accepts) / window_count < cfg.diverge_floor)
                throw ChainDiverged("run_static_chain: acceptance below " +
                                    std::to_string(cfg.diverge_floor));
            window_accepts = 0;
            window_count = 0;
        }

        if (it >= cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
            Eigen::MatrixXd P;
            if (use_ustar) {
                const Eigen::MatrixXd U = ustate.to_matrix();
                P = U * U.transpose();
            } else {
                P = rows_to_corr(lstate.to_chol());
            }
            const Eigen::VectorXd sd = tau.array().exp().matrix();
            out.corr.push_back(P);
            out.sigma.push_back(sd.asDiagonal() * P * sd.asDiagonal());
        }
    }

    const double total = static_cast<double>(cfg.iters);
    out.accept_factor = accept_sph / total;
    out.accept_tau = accept_tau / total;
    out.h_factor = sph_cfg.h;
    out.h_tau = tau_h;
    return out;
}

ValidateIwReport validate_iw(const StaticNiwModel& model, const StaticChainConfig& cfg,
                             std::uint64_t oracle_seed) {
    ValidateIwReport report;
    report.chain = run_static_chain(model, cfg);

    Rng oracle_rng(oracle_seed);
    report.direct.reserve(report.chain.sigma.size());
    for (std::size_t k = 0; k < report.chain.sigma.size(); ++k)
        report.direct.push_back(
            iw_direct_posterior(model.data, model.psi, model.nu, model.mu0, oracle_rng));

    const int D = model.dim();
    report.ks = Eigen::MatrixXd::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j <= i; ++j) {
            std::vector<double> a, b;
            a.reserve(report.chain.sigma.size());
            b.reserve(report.direct.size());
            for (const auto& s : report.chain.sigma) a.push_back(s(i, j));
            for (const auto& s : report.direct) b.push_back(s(i, j));
            const double stat = ks_statistic_two_sample(std::move(a), std::move(b));
            report.ks(i, j) = stat;
            report.ks(j, i) = stat;
            report.max_ks = std::max(report.max_ks, stat);
        }
    }
    return report;
}

}  // namespace sphcorr
