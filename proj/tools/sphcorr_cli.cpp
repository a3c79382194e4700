// Command-line front end: data generation, chain execution, summaries.
//
// Subcommands: gen-periodic, validate-iw, fit-static, fit-dynamic, summarize.
// A --config JSON file supplies defaults; command-line flags override it.
// Exit codes: 0 success, 2 validation failure, 3 input error, 4 chain
// divergence.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphcorr/csv_io.hpp"
#include "sphcorr/dynamic_model.hpp"
#include "sphcorr/periodic.hpp"
#include "sphcorr/static_model.hpp"
#include "sphcorr/summary.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sphcorr;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    // gen-periodic
    int dim = 2;
    int trials = 10;
    int npoints = 20;
    double t0 = 0.0;
    double t1 = 2.0;
    bool sparse = false;

    // chains
    long iters = 3000;
    long burnin = -1;  // default: command-specific fraction
    int thin = 10;
    int chains = 1;
    double a0 = 0.7;
    double h0 = 0.1;
    int t_max = 100;
    std::string stop_rule = "two-orthants";

    // static / validate
    std::string data_path;
    std::string prior = "iw";
    double nu = 0.0;  // 0 -> D
    double kappa = 10.0;
    double zeta = 10.0;
    double alpha = 1.0;
    double alpha0 = 1.0;
    double tau_sd = 0.1;
    double ks_threshold = 0.05;
    int n_data = 20;

    // dynamic
    int band = 0;  // 0 -> D (full)
    bool fix_mean = false;
    bool fix_variance = false;
    std::vector<double> hyp_a{1.0, 1.0, 1.0};
    std::vector<double> hyp_b{0.1, 1e-3, 0.2};
    std::vector<double> hyp_m{0.0, 0.0, 0.0};
    std::vector<double> hyp_v{1.0, 0.5, 1.0};
    double smoothness = 2.0;
    double nugget = 1e-5;

    // summarize
    std::string archive;
    std::string truth_dir;
    std::string compare;
};

StopRule parse_stop_rule(const std::string& s) {
    if (s == "two-orthants") return StopRule::TwoOrthants;
    if (s == "stochastic") return StopRule::Stochastic;
    if (s == "fixed") return StopRule::FixedT;
    throw InvalidConfig("unknown stop rule: " + s);
}

// JSON keys mirror the long option names; flags given on the command line
// win because CLI11 only assigns bound variables when the flag is present.
void apply_config_file(Options& o) {
    if (o.config_path.empty()) return;
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot open config: " + o.config_path);
    json j;
    in >> j;
    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("out", o.out_dir);
    get("seed", o.seed);
    get("dim", o.dim);
    get("trials", o.trials);
    get("npoints", o.npoints);
    get("t0", o.t0);
    get("t1", o.t1);
    get("sparse", o.sparse);
    get("iters", o.iters);
    get("burnin", o.burnin);
    get("thin", o.thin);
    get("chains", o.chains);
    get("a0", o.a0);
    get("h0", o.h0);
    get("t-max", o.t_max);
    get("stop-rule", o.stop_rule);
    get("data", o.data_path);
    get("prior", o.prior);
    get("nu", o.nu);
    get("kappa", o.kappa);
    get("zeta", o.zeta);
    get("alpha", o.alpha);
    get("alpha0", o.alpha0);
    get("tau-sd", o.tau_sd);
    get("ks-threshold", o.ks_threshold);
    get("ndata", o.n_data);
    get("band", o.band);
    get("fix-mean", o.fix_mean);
    get("fix-variance", o.fix_variance);
    get("a", o.hyp_a);
    get("b", o.hyp_b);
    get("m", o.hyp_m);
    get("V", o.hyp_v);
    get("s", o.smoothness);
    get("nugget", o.nugget);
    get("archive", o.archive);
    get("truth", o.truth_dir);
    get("compare", o.compare);
}

json config_echo(const Options& o, const std::string& command) {
    json j;
    j["command"] = command;
    j["seed"] = o.seed;
    j["out"] = o.out_dir;
    if (command == "gen-periodic") {
        j["dim"] = o.dim;
        j["trials"] = o.trials;
        j["npoints"] = o.npoints;
        j["t0"] = o.t0;
        j["t1"] = o.t1;
        j["sparse"] = o.sparse;
    } else if (command == "summarize") {
        j["archive"] = o.archive;
        j["truth"] = o.truth_dir;
        j["compare"] = o.compare;
    } else {
        j["iters"] = o.iters;
        j["burnin"] = o.burnin;
        j["thin"] = o.thin;
        j["a0"] = o.a0;
        j["h0"] = o.h0;
        j["t-max"] = o.t_max;
        j["stop-rule"] = o.stop_rule;
        if (command == "fit-dynamic") {
            j["data"] = o.data_path;
            j["chains"] = o.chains;
            j["band"] = o.band;
            j["fix-mean"] = o.fix_mean;
            j["fix-variance"] = o.fix_variance;
            j["a"] = o.hyp_a;
            j["b"] = o.hyp_b;
            j["m"] = o.hyp_m;
            j["V"] = o.hyp_v;
            j["s"] = o.smoothness;
            j["nugget"] = o.nugget;
        } else {
            j["prior"] = o.prior;
            j["nu"] = o.nu;
            j["kappa"] = o.kappa;
            j["zeta"] = o.zeta;
            j["alpha"] = o.alpha;
            j["alpha0"] = o.alpha0;
            j["tau-sd"] = o.tau_sd;
            if (command == "validate-iw") {
                j["dim"] = o.dim;
                j["ndata"] = o.n_data;
                j["ks-threshold"] = o.ks_threshold;
            } else {
                j["data"] = o.data_path;
            }
        }
    }
    return j;
}

void write_manifest(const fs::path& dir, json manifest) {
    manifest["files"] = json::object();
    for (const auto& [name, rows] : csv_row_counts(dir)) manifest["files"][name] = rows;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

StaticPriorSpec build_prior_spec(const Options& o, int D) {
    StaticPriorSpec spec;
    if (o.prior == "iw") {
        spec.kind = StaticPriorKind::IwConditional;
    } else if (o.prior == "sqdir") {
        spec.kind = StaticPriorKind::SqDirichlet;
        for (int i = 2; i <= D; ++i) {
            Eigen::VectorXd a = Eigen::VectorXd::Constant(i, o.alpha);
            a(i - 1) = o.alpha0;
            spec.alpha.push_back(std::move(a));
        }
    } else if (o.prior == "vmf") {
        spec.kind = StaticPriorKind::Vmf;
        spec.kappa = o.kappa;
    } else if (o.prior == "bingham") {
        spec.kind = StaticPriorKind::Bingham;
        spec.zeta = o.zeta;
    } else {
        throw InvalidConfig("unknown prior: " + o.prior);
    }
    spec.tau_sd = o.tau_sd;
    return spec;
}

StaticChainConfig build_static_config(const Options& o) {
    StaticChainConfig cfg;
    cfg.iters = o.iters;
    cfg.burnin = o.burnin >= 0 ? o.burnin : o.iters / 10;
    cfg.thin = o.thin;
    cfg.a0 = o.a0;
    cfg.h0 = o.h0;
    cfg.stop_rule = parse_stop_rule(o.stop_rule);
    cfg.t_max = o.t_max;
    cfg.seed = o.seed + 1;
    return cfg;
}

int cmd_gen_periodic(const Options& o) {
    Rng rng(o.seed);
    auto [data, truth] = o.sparse
                             ? generate_periodic_sparse(o.dim, o.trials, o.npoints, o.t0,
                                                        o.t1, rng)
                             : generate_periodic(o.dim, o.trials, o.npoints, o.t0, o.t1,
                                                 rng);
    fs::create_directories(o.out_dir);
    write_trials_csv(fs::path(o.out_dir) / "data.csv", data);
    write_truth_csvs(o.out_dir, truth);
    json manifest = config_echo(o, "gen-periodic");
    manifest["shapes"] = {{"M", o.trials}, {"N", o.npoints}, {"D", o.dim}};
    write_manifest(o.out_dir, manifest);
    std::cout << "wrote " << o.trials * o.npoints * o.dim << " data rows to "
              << (fs::path(o.out_dir) / "data.csv").string() << '\n';
    return 0;
}

int cmd_validate_iw(const Options& o) {
    const int D = o.dim;
    const auto start = std::chrono::steady_clock::now();
    Rng data_rng(o.seed);
    StaticNiwModel model;
    model.psi = Eigen::MatrixXd::Identity(D, D);
    model.nu = o.nu > 0.0 ? o.nu : static_cast<double>(D);
    model.mu0 = Eigen::VectorXd::Zero(D);
    model.data = conjugate_testdata(D, o.n_data, data_rng);
    model.prior.kind = StaticPriorKind::IwConditional;

    const StaticChainConfig cfg = build_static_config(o);
    const ValidateIwReport report = validate_iw(model, cfg, o.seed + 2);

    fs::create_directories(o.out_dir);
    write_static_archive(fs::path(o.out_dir) / "chain", report.chain.sigma,
                         report.chain.corr);
    std::vector<Eigen::MatrixXd> direct_corr;
    direct_corr.reserve(report.direct.size());
    for (const auto& s : report.direct) {
        const Eigen::VectorXd inv_sd = s.diagonal().array().sqrt().inverse();
        direct_corr.push_back(inv_sd.asDiagonal() * s * inv_sd.asDiagonal());
    }
    write_static_archive(fs::path(o.out_dir) / "direct", report.direct, direct_corr);
    {
        std::ofstream out(fs::path(o.out_dir) / "ks_table.csv");
        out << "row,col,ks\n";
        for (int i = 0; i < D; ++i)
            for (int j = 0; j <= i; ++j)
                out << i + 1 << ',' << j + 1 << ',' << format_double(report.ks(i, j))
                    << '\n';
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = config_echo(o, "validate-iw");
    manifest["shapes"] = {{"N", o.n_data}, {"D", D}};
    manifest["retained"] = report.chain.sigma.size();
    manifest["accept_factor"] = report.chain.accept_factor;
    manifest["accept_tau"] = report.chain.accept_tau;
    manifest["step_size_factor"] = report.chain.h_factor;
    manifest["max_ks"] = report.max_ks;
    manifest["wall_time_s"] = secs;
    write_manifest(o.out_dir, manifest);

    std::cout << "retained " << report.chain.sigma.size() << " samples per method; max KS = "
              << report.max_ks << " (threshold " << o.ks_threshold << ")\n";
    return report.max_ks > o.ks_threshold ? 2 : 0;
}

int cmd_fit_static(const Options& o) {
    if (o.data_path.empty()) throw InvalidConfig("fit-static: --data is required");
    const auto start = std::chrono::steady_clock::now();
    TrialTensor t = read_trials_csv(o.data_path);
    if (t.n_trials() != 1)
        throw InvalidConfig("fit-static: expected a single-trial data file");
    const int D = t.n_channels();

    StaticNiwModel model;
    model.psi = Eigen::MatrixXd::Identity(D, D);
    model.nu = o.nu > 0.0 ? o.nu : static_cast<double>(D);
    model.mu0 = Eigen::VectorXd::Zero(D);
    model.data = t.trials[0];
    model.prior = build_prior_spec(o, D);

    const StaticChainConfig cfg = build_static_config(o);
    const StaticChainResult result = run_static_chain(model, cfg);

    fs::create_directories(o.out_dir);
    write_static_archive(o.out_dir, result.sigma, result.corr);
    write_static_summary_csvs(o.out_dir, result.sigma, result.corr);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = config_echo(o, "fit-static");
    manifest["shapes"] = {{"N", t.n_points()}, {"D", D}};
    manifest["retained"] = result.sigma.size();
    manifest["accept_factor"] = result.accept_factor;
    manifest["accept_tau"] = result.accept_tau;
    manifest["step_size_factor"] = result.h_factor;
    manifest["wall_time_s"] = secs;
    write_manifest(o.out_dir, manifest);
    std::cout << "retained " << result.sigma.size() << " samples; factor acceptance "
              << result.accept_factor << '\n';
    return 0;
}

DynamicSamples merge_chains(std::vector<DynamicSamples> per_chain) {
    DynamicSamples merged = std::move(per_chain[0]);
    for (std::size_t c = 1; c < per_chain.size(); ++c) {
        auto& s = per_chain[c];
        merged.mu.insert(merged.mu.end(), s.mu.begin(), s.mu.end());
        merged.tau.insert(merged.tau.end(), s.tau.begin(), s.tau.end());
        merged.L.insert(merged.L.end(), s.L.begin(), s.L.end());
        merged.gammas.insert(merged.gammas.end(), s.gammas.begin(), s.gammas.end());
        merged.etas.insert(merged.etas.end(), s.etas.begin(), s.etas.end());
    }
    return merged;
}

int cmd_fit_dynamic(const Options& o) {
    if (o.data_path.empty()) throw InvalidConfig("fit-dynamic: --data is required");
    if (o.hyp_a.size() != 3 || o.hyp_b.size() != 3 || o.hyp_m.size() != 3 ||
        o.hyp_v.size() != 3)
        throw InvalidConfig("fit-dynamic: hyperprior triples need exactly 3 values");
    const auto start = std::chrono::steady_clock::now();
    TrialTensor data = read_trials_csv(o.data_path);
    const int D = data.n_channels();

    const HyperPrior hp_mu{o.hyp_a[0], o.hyp_b[0], o.hyp_m[0], o.hyp_v[0]};
    const HyperPrior hp_sigma{o.hyp_a[1], o.hyp_b[1], o.hyp_m[1], o.hyp_v[1]};
    const HyperPrior hp_ell{o.hyp_a[2], o.hyp_b[2], o.hyp_m[2], o.hyp_v[2]};
    const int band = o.band > 0 ? o.band : D;
    const DynamicCorrModel model =
        make_dynamic_model(std::move(data), hp_mu, hp_sigma, hp_ell, o.smoothness,
                           o.nugget, band, !o.fix_mean, !o.fix_variance);

    DynamicChainConfig cfg;
    cfg.iters = o.iters;
    cfg.burnin = o.burnin >= 0 ? o.burnin : o.iters / 3;
    cfg.thin = o.thin;
    cfg.mwg.a0 = o.a0;
    cfg.mwg.h0 = o.h0;
    cfg.mwg.stop_rule = parse_stop_rule(o.stop_rule);
    cfg.mwg.t_max = o.t_max;

    std::vector<DynamicSamples> per_chain(o.chains);
    std::vector<std::thread> workers;
    workers.reserve(o.chains);
    for (int c = 0; c < o.chains; ++c)
        workers.emplace_back([&, c] {
            DynamicChainConfig chain_cfg = cfg;
            chain_cfg.seed = o.seed + static_cast<std::uint64_t>(c);
            per_chain[c] = run_dynamic_chain(model, chain_cfg);
        });
    for (auto& w : workers) w.join();

    fs::create_directories(o.out_dir);
    json manifest = config_echo(o, "fit-dynamic");
    manifest["shapes"] = {
        {"M", model.n_trials()}, {"N", model.n_points()}, {"D", D}};
    manifest["band"] = band;
    json chain_info = json::array();
    for (int c = 0; c < o.chains; ++c) {
        const fs::path chain_dir = fs::path(o.out_dir) / ("chain_" + std::to_string(c));
        write_dynamic_archive(chain_dir, per_chain[c]);
        chain_info.push_back({{"chain", c},
                              {"retained", per_chain[c].mu.size()},
                              {"accept_rate", per_chain[c].accept_rate},
                              {"nonfinite_rejects", per_chain[c].nonfinite_rejects},
                              {"max_norm_dev", per_chain[c].max_norm_dev}});
    }
    manifest["chains_info"] = chain_info;

    const DynamicSamples merged = merge_chains(std::move(per_chain));
    manifest["retained"] = merged.mu.size();
    PeriodicTruth truth;
    const bool have_truth = !o.truth_dir.empty();
    if (have_truth) truth = read_truth_csvs(o.truth_dir);
    const PosteriorSummary summary =
        summarize_posterior(merged, have_truth ? &truth : nullptr);
    write_summary_csvs(o.out_dir, summary, have_truth ? &truth : nullptr);
    if (have_truth) {
        manifest["coverage_mu"] = summary.coverage_mu;
        manifest["coverage_sigma"] = summary.coverage_sigma;
        manifest["coverage_rho"] = summary.coverage_rho;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["wall_time_s"] = secs;
    write_manifest(o.out_dir, manifest);
    std::cout << "retained " << merged.mu.size() << " samples across " << o.chains
              << " chain(s) in " << secs << " s\n";
    return 0;
}

int cmd_summarize(const Options& o) {
    if (o.archive.empty()) throw InvalidConfig("summarize: --archive is required");
    const fs::path archive(o.archive);
    fs::create_directories(o.out_dir);

    // A static archive has samples_sigma.csv at top level; a dynamic archive
    // has chain_* subdirectories.
    if (fs::exists(archive / "samples_sigma.csv")) {
        std::vector<Eigen::MatrixXd> sigma, corr;
        read_static_archive(archive, sigma, corr);
        if (sigma.size() < 100)
            throw TooFewSamples("summarize: need at least 100 samples");
        write_static_summary_csvs(o.out_dir, sigma, corr);
        std::cout << "summarized " << sigma.size() << " static samples\n";
        return 0;
    }

    std::vector<DynamicSamples> per_chain;
    for (int c = 0;; ++c) {
        const fs::path chain_dir = archive / ("chain_" + std::to_string(c));
        if (!fs::exists(chain_dir)) break;
        per_chain.push_back(read_dynamic_archive(chain_dir));
    }
    if (per_chain.empty()) throw IoError("summarize: no chain_* directories in archive");
    const DynamicSamples merged = merge_chains(std::move(per_chain));

    PeriodicTruth truth;
    const bool have_truth = !o.truth_dir.empty();
    if (have_truth) truth = read_truth_csvs(o.truth_dir);
    const PosteriorSummary summary =
        summarize_posterior(merged, have_truth ? &truth : nullptr);
    write_summary_csvs(o.out_dir, summary, have_truth ? &truth : nullptr);

    if (!o.compare.empty()) {
        std::vector<DynamicSamples> other_chains;
        for (int c = 0;; ++c) {
            const fs::path chain_dir = fs::path(o.compare) / ("chain_" + std::to_string(c));
            if (!fs::exists(chain_dir)) break;
            other_chains.push_back(read_dynamic_archive(chain_dir));
        }
        if (other_chains.empty())
            throw IoError("summarize: no chain_* directories in compare archive");
        const DynamicSamples other = merge_chains(std::move(other_chains));
        const Eigen::VectorXd dist = frobenius_distance_curve(
            mean_correlation_curve(merged), mean_correlation_curve(other));
        std::ofstream out(fs::path(o.out_dir) / "frobenius.csv");
        out << "time_index,time,distance\n";
        for (int n = 0; n < dist.size(); ++n)
            out << n + 1 << ',' << format_double(merged.times(n)) << ','
                << format_double(dist(n)) << '\n';
    }
    std::cout << "summarized " << merged.mu.size() << " samples\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian static and dynamic correlation inference on sphere products"};
    app.require_subcommand(1);
    Options o;

    // The config file is applied before parsing so explicit flags override it.
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") o.config_path = argv[i + 1];

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "JSON config file");
        cmd->add_option("--seed", o.seed, "RNG seed");
        cmd->add_option("--out", o.out_dir, "output directory");
    };
    auto add_chain = [&](CLI::App* cmd) {
        cmd->add_option("--iters", o.iters, "total MCMC iterations");
        cmd->add_option("--burnin", o.burnin, "burn-in iterations (default: fraction)");
        cmd->add_option("--thin", o.thin, "thinning stride");
        cmd->add_option("--a0", o.a0, "dual-averaging acceptance target");
        cmd->add_option("--h0", o.h0, "initial step size");
        cmd->add_option("--t-max", o.t_max, "leapfrog test threshold");
        cmd->add_option("--stop-rule", o.stop_rule,
                        "two-orthants | stochastic | fixed");
    };

    CLI::App* gen = app.add_subcommand("gen-periodic", "generate periodic-process data");
    add_common(gen);
    gen->add_option("--dim", o.dim, "channels D");
    gen->add_option("--trials", o.trials, "trials M");
    gen->add_option("--npoints", o.npoints, "time points N");
    gen->add_option("--t0", o.t0, "grid start");
    gen->add_option("--t1", o.t1, "grid end");
    gen->add_flag("--sparse", o.sparse, "two-pair sparse variant for band studies");

    CLI::App* val = app.add_subcommand("validate-iw",
                                       "conjugate check against direct sampling");
    add_common(val);
    add_chain(val);
    val->add_option("--dim", o.dim, "dimension D");
    val->add_option("--ndata", o.n_data, "observations N");
    val->add_option("--nu", o.nu, "degrees of freedom (default D)");
    val->add_option("--ks-threshold", o.ks_threshold, "failure threshold");

    CLI::App* fst = app.add_subcommand("fit-static", "fit the static model");
    add_common(fst);
    add_chain(fst);
    fst->add_option("--data", o.data_path, "single-trial data csv")->required();
    fst->add_option("--prior", o.prior, "iw | sqdir | vmf | bingham");
    fst->add_option("--nu", o.nu, "degrees of freedom (default D)");
    fst->add_option("--kappa", o.kappa, "vMF concentration");
    fst->add_option("--zeta", o.zeta, "Bingham concentration");
    fst->add_option("--alpha", o.alpha, "squared-Dirichlet off-pole concentration");
    fst->add_option("--alpha0", o.alpha0, "squared-Dirichlet polar concentration");
    fst->add_option("--tau-sd", o.tau_sd, "log-sd prior scale");

    CLI::App* fdy = app.add_subcommand("fit-dynamic", "fit the dynamic correlation model");
    add_common(fdy);
    add_chain(fdy);
    fdy->add_option("--data", o.data_path, "trial data csv")->required();
    fdy->add_option("--chains", o.chains, "number of chains");
    fdy->add_option("--band", o.band, "band width w (0 = full)");
    fdy->add_flag("--fix-mean", o.fix_mean, "plug in the empirical mean");
    fdy->add_flag("--fix-variance", o.fix_variance, "plug in the empirical variances");
    fdy->add_option("--a", o.hyp_a, "inverse-Gamma shapes (mu sigma L)")->expected(3);
    fdy->add_option("--b", o.hyp_b, "inverse-Gamma scales (mu sigma L)")->expected(3);
    fdy->add_option("--m", o.hyp_m, "log length-scale means (mu sigma L)")->expected(3);
    fdy->add_option("--V", o.hyp_v, "log length-scale variances (mu sigma L)")->expected(3);
    fdy->add_option("--s", o.smoothness, "kernel smoothness exponent");
    fdy->add_option("--nugget", o.nugget, "kernel nugget");
    fdy->add_option("--truth", o.truth_dir, "truth directory for coverage columns");

    CLI::App* sum = app.add_subcommand("summarize", "recompute summaries from an archive");
    add_common(sum);
    sum->add_option("--archive", o.archive, "archive directory")->required();
    sum->add_option("--truth", o.truth_dir, "truth directory for coverage columns");
    sum->add_option("--compare", o.compare,
                    "second archive for a correlation-distance curve");

    try {
        apply_config_file(o);
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen_periodic(o);
        if (val->parsed()) return cmd_validate_iw(o);
        if (fst->parsed()) return cmd_fit_static(o);
        if (fdy->parsed()) return cmd_fit_dynamic(o);
        if (sum->parsed()) return cmd_summarize(o);
        return 3;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    } catch (const ChainDiverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
