#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/geometry.hpp"
#include "sphcorr/gp.hpp"
#include "sphcorr/rng.hpp"
#include "sphcorr/samplers.hpp"
#include "sphcorr/trial_data.hpp"

namespace sphcorr {

struct DynamicCorrModel {
    TrialTensor data;
    TimeGrid grid;  // rescaled into (0, 1]
    HyperPrior hp_mu, hp_sigma, hp_ell;
    double s = 2.0;
    double nugget = 1e-5;
    int band_w = 0;  // w = D means full
    bool sample_mean = true;
    bool sample_variance = true;

    int n_trials() const { return data.n_trials(); }
    int n_points() const { return data.n_points(); }
    int n_channels() const { return data.n_channels(); }
    void validate() const;
};

DynamicCorrModel make_dynamic_model(TrialTensor data, const HyperPrior& hp_mu,
                                    const HyperPrior& hp_sigma, const HyperPrior& hp_ell,
                                    double s, double nugget, int band_w, bool sample_mean,
                                    bool sample_variance);

// One MCMC iterate: grids for the mean, log-sd and Cholesky processes plus
// the GP hyperparameters, ordered (mu, sigma, ell).
struct ChainState {
    Eigen::MatrixXd mu, tau;        // N x D
    std::vector<CorrCholesky> L;    // per time point
    std::array<double, 3> gammas{1.0, 1.0, 1.0};
    std::array<double, 3> etas{0.0, 0.0, 0.0};

    void validate() const;
};

// Number of GP-modeled Cholesky components per time point under a w-band
// structure; equals D(D+1)/2 - 1 at full width.
double ell_component_count(int D, int w);

// Data log-likelihood and its per-time-point lower-triangular gradients with
// respect to the Cholesky rows; entries outside the band are held at zero.
struct DynamicLoglik {
    double value = 0.0;
    std::vector<std::vector<Eigen::VectorXd>> grads;  // [n][i], row i has length i+1
};

DynamicLoglik dynamic_loglik_grad_L(const std::vector<CorrCholesky>& L,
                                    const Eigen::MatrixXd& mu, const Eigen::MatrixXd& tau,
                                    const TrialTensor& data, int w);

double dynamic_loglik(const std::vector<CorrCholesky>& L, const Eigen::MatrixXd& mu,
                      const Eigen::MatrixXd& tau, const TrialTensor& data, int w);

struct MwgConfig {
    double a0 = 0.7;
    double h0 = 0.1;
    StopRule stop_rule = StopRule::TwoOrthants;
    int t_max = 100;
    double slice_width = 1.0;
    int slice_max_stepout = 50;
};

// Per-chain working set: Gram caches, the adaptive step state and counters.
struct MwgContext {
    MwgContext(const DynamicCorrModel& model, const MwgConfig& cfg);

    GramCache cache_mu, cache_sigma, cache_ell;
    MwgConfig cfg;
    SphHmcConfig sph;
    DualAvgState dual_avg;
    bool adapting = true;

    long sweeps = 0;
    long ell_accepts = 0;
    long nonfinite_rejects = 0;
    double last_accept_prob = 0.0;
    double max_norm_dev = 0.0;
};

// One full sweep in fixed scan order gamma -> eta -> mu -> tau -> L.
void mwg_sweep(ChainState& state, const DynamicCorrModel& model, MwgContext& ctx, Rng& rng);

ChainState initial_state(const DynamicCorrModel& model);

struct DynamicChainConfig {
    long iters = 3000;
    long burnin = 1000;  // adaptation window for the step size
    int thin = 10;
    MwgConfig mwg;
    std::uint64_t seed = 1;
};

struct DynamicSamples {
    Eigen::VectorXd times;  // raw data times
    int band_w = 0;
    std::vector<Eigen::MatrixXd> mu, tau;
    std::vector<std::vector<CorrCholesky>> L;
    std::vector<std::array<double, 3>> gammas, etas;
    std::vector<double> h_trace, accept_trace;
    double accept_rate = 0.0;
    long nonfinite_rejects = 0;
    double max_norm_dev = 0.0;
};

DynamicSamples run_dynamic_chain(const DynamicCorrModel& model, const DynamicChainConfig& cfg);

}  // namespace sphcorr
