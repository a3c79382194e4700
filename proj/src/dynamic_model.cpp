#include "sphcorr/dynamic_model.hpp"

#include <cmath>
#include <limits>

namespace sphcorr {

namespace {

constexpr double kDiagFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

int window_start(int i, int w) { return std::max(0, i - w + 1); }
int window_len(int i, int w) { return i + 1 - window_start(i, w); }

// Band solves against one time point's factor; rows come from a provider so
// the same code serves CorrCholesky storage and the sampler's flat windows.
// provider(i) for i >= 1 returns the band window of row i; row 0 is the
// fixed scalar 1.
template <typename Provider>
void band_forward_solve(int D, int w, const Provider& row, Eigen::VectorXd& z) {
    for (int i = 1; i < D; ++i) {
        const int j0 = window_start(i, w);
        const auto& win = row(i);
        double s = z(i);
        for (int j = j0; j < i; ++j) s -= win(j - j0) * z(j);
        z(i) = s / win(i - j0);
    }
}

template <typename Provider>
void band_backward_solve(int D, int w, const Provider& row, Eigen::VectorXd& x) {
    for (int i = D - 1; i >= 0; --i) {
        const int k_hi = std::min(D - 1, i + w - 1);
        double s = x(i);
        for (int k = i + 1; k <= k_hi; ++k) {
            const auto& win = row(k);
            s -= win(i - window_start(k, w)) * x(k);
        }
        x(i) = (i == 0) ? s : s / row(i)(i - window_start(i, w));
    }
}

// Log-likelihood over all time points and trials, with optional band-window
// gradients accumulated as [n][k] for sampled rows k = i - 1.
template <typename Provider>
double band_loglik(const Provider& row_at, const Eigen::MatrixXd& mu,
                   const Eigen::MatrixXd& tau, const TrialTensor& data, int w,
                   std::vector<std::vector<Eigen::VectorXd>>* grads) {
    const int M = data.n_trials();
    const int N = data.n_points();
    const int D = data.n_channels();
    double total = 0.0;

    for (int n = 0; n < N; ++n) {
        auto row = [&](int i) -> const Eigen::VectorXd& { return row_at(n, i); };
        const Eigen::ArrayXd inv_sd = (-tau.row(n).transpose().array()).exp();

        double logdiag = 0.0;
        for (int i = 1; i < D; ++i)
            logdiag += std::log(std::abs(row(i)(i - window_start(i, w))));
        total -= M * tau.row(n).sum() + M * logdiag;

        for (int m = 0; m < M; ++m) {
            Eigen::VectorXd z =
                ((data.trials[m].row(n) - mu.row(n)).transpose().array() * inv_sd)
                    .matrix();
            band_forward_solve(D, w, row, z);
            total -= 0.5 * z.squaredNorm();
            if (grads) {
                Eigen::VectorXd u = z;
                band_backward_solve(D, w, row, u);
                auto& gn = (*grads)[n];
                for (int i = 1; i < D; ++i) {
                    const int j0 = window_start(i, w);
                    for (int j = j0; j <= i; ++j) gn[i - 1](j - j0) += u(i) * z(j);
                }
            }
        }
        if (grads)
            for (int i = 1; i < D; ++i) {
                const int j0 = window_start(i, w);
                (*grads)[n][i - 1](i - j0) -= M / row(i)(i - j0);
            }
    }
    return total;
}

}  // namespace

void DynamicCorrModel::validate() const {
    data.validate();
    hp_mu.validate();
    hp_sigma.validate();
    hp_ell.validate();
    if (!(s > 0.0 && s <= 2.0)) throw InvalidConfig("DynamicCorrModel: s must lie in (0, 2]");
    if (band_w < 1 || band_w > n_channels())
        throw InvalidConfig("DynamicCorrModel: band width must lie in [1, D]");
    if (!sample_variance && n_trials() < 2)
        throw InvalidConfig("DynamicCorrModel: plug-in variances need at least two trials");
}

DynamicCorrModel make_dynamic_model(TrialTensor data, const HyperPrior& hp_mu,
                                    const HyperPrior& hp_sigma, const HyperPrior& hp_ell,
                                    double s, double nugget, int band_w, bool sample_mean,
                                    bool sample_variance) {
    data.validate();
    TimeGrid grid = TimeGrid::rescaled(data.times);
    DynamicCorrModel model{std::move(data), std::move(grid), hp_mu,  hp_sigma,
                           hp_ell,          s,               nugget, band_w,
                           sample_mean,     sample_variance};
    model.validate();
    return model;
}

void ChainState::validate() const {
    for (const auto& ln : L) ln.validate();
    for (double g : gammas)
        if (!(g > 0.0)) throw NonPositiveGamma("ChainState: non-positive gamma");
}

double ell_component_count(int D, int w) {
    double count = 0.0;
    for (int i = 2; i <= D; ++i) count += std::min(i, w);
    return count;
}

DynamicLoglik dynamic_loglik_grad_L(const std::vector<CorrCholesky>& L,
                                    const Eigen::MatrixXd& mu, const Eigen::MatrixXd& tau,
                                    const TrialTensor& data, int w) {
    const int N = data.n_points();
    const int D = data.n_channels();
    DynamicLoglik out;
    std::vector<std::vector<Eigen::VectorXd>> window_grads(N);
    for (int n = 0; n < N; ++n) {
        window_grads[n].resize(D - 1);
        for (int i = 1; i < D; ++i)
            window_grads[n][i - 1] = Eigen::VectorXd::Zero(window_len(i, w));
    }

    // Windows view directly into the ragged rows; copies are per-row tails.
    std::vector<std::vector<Eigen::VectorXd>> windows(N);
    for (int n = 0; n < N; ++n) {
        windows[n].resize(D);
        windows[n][0] = Eigen::VectorXd::Ones(1);
        for (int i = 1; i < D; ++i)
            windows[n][i] = L[n].row(i).segment(window_start(i, w), window_len(i, w));
    }
    auto row_at = [&](int n, int i) -> const Eigen::VectorXd& { return windows[n][i]; };

    out.value = band_loglik(row_at, mu, tau, data, w, &window_grads);

    out.grads.resize(N);
    for (int n = 0; n < N; ++n) {
        out.grads[n].resize(D);
        for (int i = 0; i < D; ++i) out.grads[n][i] = Eigen::VectorXd::Zero(i + 1);
        for (int i = 1; i < D; ++i)
            out.grads[n][i].segment(window_start(i, w), window_len(i, w)) =
                window_grads[n][i - 1];
    }
    return out;
}

double dynamic_loglik(const std::vector<CorrCholesky>& L, const Eigen::MatrixXd& mu,
                      const Eigen::MatrixXd& tau, const TrialTensor& data, int w) {
    const int N = data.n_points();
    const int D = data.n_channels();
    std::vector<std::vector<Eigen::VectorXd>> windows(N);
    for (int n = 0; n < N; ++n) {
        windows[n].resize(D);
        windows[n][0] = Eigen::VectorXd::Ones(1);
        for (int i = 1; i < D; ++i)
            windows[n][i] = L[n].row(i).segment(window_start(i, w), window_len(i, w));
    }
    auto row_at = [&](int n, int i) -> const Eigen::VectorXd& { return windows[n][i]; };
    return band_loglik(row_at, mu, tau, data, w, nullptr);
}

MwgContext::MwgContext(const DynamicCorrModel& model, const MwgConfig& config)
    : cache_mu(model.grid, model.s, model.nugget),
      cache_sigma(model.grid, model.s, model.nugget),
      cache_ell(model.grid, model.s, model.nugget),
      cfg(config),
      dual_avg(DualAvgState::init(config.h0, config.a0)) {
    sph.h = config.h0;
    sph.t_max = config.t_max;
    sph.stop_rule = config.stop_rule;
}

ChainState initial_state(const DynamicCorrModel& model) {
    const int N = model.n_points();
    const int D = model.n_channels();
    const int M = model.n_trials();
    ChainState st;
    st.mu = Eigen::MatrixXd::Zero(N, D);
    st.tau = Eigen::MatrixXd::Zero(N, D);
    if (!model.sample_mean || !model.sample_variance) {
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(N, D);
        for (const auto& y : model.data.trials) mean += y;
        mean /= static_cast<double>(M);
        if (!model.sample_mean) st.mu = mean;
        if (!model.sample_variance) {
            Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(N, D);
            for (const auto& y : model.data.trials) {
                const Eigen::MatrixXd c = y - mean;
                ss += c.cwiseProduct(c);
            }
            st.tau = (ss / static_cast<double>(M - 1)).array().sqrt().log();
        }
    }
    st.L.assign(N, CorrCholesky::identity(D));
    st.gammas = {1.0, 1.0, 1.0};
    st.etas = {model.hp_mu.m, model.hp_sigma.m, model.hp_ell.m};
    return st;
}

namespace {

// N x len residual blocks of the Cholesky row processes about their polar
// mean, one block per sampled row index.
std::vector<Eigen::MatrixXd> ell_centered_blocks(const std::vector<CorrCholesky>& L, int w) {
    const int N = static_cast<int>(L.size());
    const int D = L[0].dim();
    std::vector<Eigen::MatrixXd> blocks(D - 1);
    for (int i = 1; i < D; ++i) {
        const int j0 = window_start(i, w), len = window_len(i, w);
        Eigen::MatrixXd b(N, len);
        for (int n = 0; n < N; ++n)
            b.row(n) = L[n].row(i).segment(j0, len).transpose();
        b.col(len - 1).array() -= 1.0;  // polar mean n_i
        blocks[i - 1] = std::move(b);
    }
    return blocks;
}

double eta_logpost(GramCache& cache, double eta, double gamma, double ncomp, double quad,
                   const HyperPrior& hp) {
    const double diff = eta - hp.m;
    return -0.5 * ncomp * cache.logdet_k0(eta) - 0.5 * quad / gamma -
           0.5 * diff * diff / hp.V;
}

}  // namespace

void mwg_sweep(ChainState& state, const DynamicCorrModel& model, MwgContext& ctx, Rng& rng) {
    const int N = model.n_points();
    const int D = model.n_channels();
    const int w = model.band_w;
    const double ncomp_ell = ell_component_count(D, w);
    const double ncomp_grid = static_cast<double>(D);

    // (gamma): conjugate inverse-Gamma draws given the unit-scale residuals.
    if (model.sample_mean) {
        const double q = ctx.cache_mu.quad_form(state.etas[0], state.mu);
        state.gammas[0] = gibbs_gamma(q, N, D, GibbsBlock::Mu, model.hp_mu, rng);
    }
    if (model.sample_variance) {
        const double q = ctx.cache_sigma.quad_form(state.etas[1], state.tau);
        state.gammas[1] = gibbs_gamma(q, N, D, GibbsBlock::Tau, model.hp_sigma, rng);
    }
    std::vector<Eigen::MatrixXd> ell_blocks = ell_centered_blocks(state.L, w);
    {
        double q = 0.0;
        for (const auto& b : ell_blocks) q += ctx.cache_ell.quad_form(state.etas[2], b);
        state.gammas[2] = gibbs_gamma_ncomp(q, N, ncomp_ell, model.hp_ell, rng);
    }

    // (eta): univariate slice moves on the log length-scales.
    if (model.sample_mean) {
        state.etas[0] = slice_step_1d(
            state.etas[0],
            [&](double eta) {
                return eta_logpost(ctx.cache_mu, eta, state.gammas[0], ncomp_grid,
                                   ctx.cache_mu.quad_form(eta, state.mu), model.hp_mu);
            },
            rng, ctx.cfg.slice_width, ctx.cfg.slice_max_stepout);
    }
    if (model.sample_variance) {
        state.etas[1] = slice_step_1d(
            state.etas[1],
            [&](double eta) {
                return eta_logpost(ctx.cache_sigma, eta, state.gammas[1], ncomp_grid,
                                   ctx.cache_sigma.quad_form(eta, state.tau),
                                   model.hp_sigma);
            },
            rng, ctx.cfg.slice_width, ctx.cfg.slice_max_stepout);
    }
    state.etas[2] = slice_step_1d(
        state.etas[2],
        [&](double eta) {
            double q = 0.0;
            for (const auto& b : ell_blocks) q += ctx.cache_ell.quad_form(eta, b);
            return eta_logpost(ctx.cache_ell, eta, state.gammas[2], ncomp_ell, q,
                               model.hp_ell);
        },
        rng, ctx.cfg.slice_width, ctx.cfg.slice_max_stepout);

    // (mu): conjugate Gaussian update of the mean grid.
    if (model.sample_mean) {
        std::vector<Eigen::MatrixXd> sigma_n;
        sigma_n.reserve(N);
        for (int n = 0; n < N; ++n) {
            const Eigen::VectorXd sd = state.tau.row(n).transpose().array().exp();
            const Eigen::MatrixXd P = rows_to_corr(state.L[n]);
            sigma_n.push_back(sd.asDiagonal() * P * sd.asDiagonal());
        }
        const Eigen::MatrixXd K_mu =
            state.gammas[0] * ctx.cache_mu.gram(state.etas[0]);
        state.mu = gibbs_mu(model.data.trials, sigma_n, K_mu, rng);
    }

    // (tau): elliptical slice move on the log-sd grid.
    if (model.sample_variance) {
        const Eigen::MatrixXd prior_chol =
            std::sqrt(state.gammas[1]) *
            Eigen::MatrixXd(ctx.cache_sigma.factor(state.etas[1]).matrixL());
        state.tau = ess_step(
            state.tau, prior_chol,
            [&](const Eigen::MatrixXd& tau) {
                return dynamic_loglik(state.L, state.mu, tau, model.data, w);
            },
            rng);
    }

    // (L): joint spherical HMC over every row of every time point.
    const int rows_per_t = D - 1;
    std::vector<SpherePoint> flat;
    flat.reserve(static_cast<std::size_t>(N) * rows_per_t);
    for (int n = 0; n < N; ++n)
        for (int i = 1; i < D; ++i)
            flat.emplace_back(
                Eigen::VectorXd(state.L[n].row(i).segment(window_start(i, w),
                                                          window_len(i, w))),
                1.0);

    const double gamma_ell = state.gammas[2];
    const double eta_ell = state.etas[2];
    TargetOnSphereProduct target;
    target.eval = [&](const std::vector<Eigen::VectorXd>& rows) {
        SphereProductEval ev;
        ev.grads.assign(rows.size(), Eigen::VectorXd());
        for (const auto& r : rows)
            if (!(std::abs(r(r.size() - 1)) > kDiagFloor)) {
                ev.u_tilde = kInf;
                return ev;
            }

        auto row_at = [&](int n, int i) -> const Eigen::VectorXd& {
            static const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
            return i == 0 ? one : rows[n * rows_per_t + (i - 1)];
        };
        std::vector<std::vector<Eigen::VectorXd>> lik_grads(N);
        for (int n = 0; n < N; ++n) {
            lik_grads[n].resize(rows_per_t);
            for (int i = 1; i < D; ++i)
                lik_grads[n][i - 1] = Eigen::VectorXd::Zero(window_len(i, w));
        }
        const double ll =
            band_loglik(row_at, state.mu, state.tau, model.data, w, &lik_grads);

        double u = -ll;
        const auto& llt = ctx.cache_ell.factor(eta_ell);
        for (int i = 1; i < D; ++i) {
            const int len = window_len(i, w);
            Eigen::MatrixXd block(N, len);
            for (int n = 0; n < N; ++n)
                block.row(n) = rows[n * rows_per_t + (i - 1)].transpose();
            block.col(len - 1).array() -= 1.0;
            const Eigen::MatrixXd solved = llt.solve(block);
            u += 0.5 * (block.array() * solved.array()).sum() / gamma_ell;
            for (int n = 0; n < N; ++n) {
                Eigen::VectorXd g = -lik_grads[n][i - 1];
                g += solved.row(n).transpose() / gamma_ell;
                const double diag = rows[n * rows_per_t + (i - 1)](len - 1);
                g(len - 1) += 1.0 / diag;  // chart correction log|l_ii|
                u += std::log(std::abs(diag));
                ev.grads[n * rows_per_t + (i - 1)] = std::move(g);
            }
        }
        ev.u_tilde = u;
        return ev;
    };

    DeltaStepResult res = delta_sphhmc_step(flat, target, ctx.sph, rng);
    ctx.last_accept_prob = res.accept_prob;
    if (res.nonfinite) ++ctx.nonfinite_rejects;
    if (res.max_norm_dev > ctx.max_norm_dev) ctx.max_norm_dev = res.max_norm_dev;
    if (res.accepted) {
        ++ctx.ell_accepts;
        for (int n = 0; n < N; ++n)
            for (int i = 1; i < D; ++i)
                state.L[n].row(i).segment(window_start(i, w), window_len(i, w)) =
                    res.rows[n * rows_per_t + (i - 1)].coords;
    }

    if (ctx.adapting)
        ctx.sph.h = dual_averaging_update(ctx.dual_avg, res.accept_prob);
    ++ctx.sweeps;
}

DynamicSamples run_dynamic_chain(const DynamicCorrModel& model,
                                 const DynamicChainConfig& cfg) {
    if (cfg.iters <= cfg.burnin || cfg.burnin < 0 || cfg.thin < 1)
        throw InvalidConfig("run_dynamic_chain: need iters > burnin >= 0 and thin >= 1");
    model.validate();
    Rng rng(cfg.seed);
    MwgContext ctx(model, cfg.mwg);
    ChainState state = initial_state(model);

    DynamicSamples out;
    out.times = model.data.times;
    out.band_w = model.band_w;
    out.h_trace.reserve(cfg.iters);
    out.accept_trace.reserve(cfg.iters);

    for (long it = 0; it < cfg.iters; ++it) {
        ctx.adapting = it < cfg.burnin;
        mwg_sweep(state, model, ctx, rng);
        if (it + 1 == cfg.burnin) ctx.sph.h = ctx.dual_avg.frozen_h();
        out.h_trace.push_back(ctx.sph.h);
        out.accept_trace.push_back(ctx.last_accept_prob);
        if (it >= cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
            state.validate();
            out.mu.push_back(state.mu);
            out.tau.push_back(state.tau);
            out.L.push_back(state.L);
            out.gammas.push_back(state.gammas);
            out.etas.push_back(state.etas);
        }
    }
    out.accept_rate = static_cast<double>(ctx.ell_accepts) / static_cast<double>(cfg.iters);
    out.nonfinite_rejects = ctx.nonfinite_rejects;
    out.max_norm_dev = ctx.max_norm_dev;
    return out;
}

}  // namespace sphcorr
