#include "sphcorr/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sphcorr/stats.hpp"

namespace sphcorr {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("parse_double: bad numeral '" + s + "'");
    return x;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

long parse_index(const std::string& s) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("bad integer field '" + s + "'");
    return v;
}

}  // namespace

void write_trials_csv(const fs::path& path, const TrialTensor& data) {
    std::ofstream out = open_out(path);
    out << "trial,time_index,time,channel,value\n";
    const int M = data.n_trials(), N = data.n_points(), D = data.n_channels();
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < D; ++k)
                out << m + 1 << ',' << n + 1 << ',' << format_double(data.times(n)) << ','
                    << k + 1 << ',' << format_double(data.trials[m](n, k)) << '\n';
}

TrialTensor read_trials_csv(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty data file: " + path.string());

    long max_m = 0, max_n = 0, max_d = 0;
    struct Row {
        long m, n, d;
        double t, v;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw RaggedData("data row with wrong field count");
        Row r{parse_index(f[0]), parse_index(f[1]), parse_index(f[3]),
              parse_double(f[2]), parse_double(f[4])};
        if (r.m < 1 || r.n < 1 || r.d < 1) throw RaggedData("indices must be 1-based");
        max_m = std::max(max_m, r.m);
        max_n = std::max(max_n, r.n);
        max_d = std::max(max_d, r.d);
        rows.push_back(r);
    }
    if (rows.empty()) throw RaggedData("no data rows in " + path.string());
    if (static_cast<long>(rows.size()) != max_m * max_n * max_d)
        throw RaggedData("incomplete tensor: expected " +
                         std::to_string(max_m * max_n * max_d) + " cells, found " +
                         std::to_string(rows.size()));

    TrialTensor data;
    data.times = Eigen::VectorXd::Constant(max_n, std::nan(""));
    data.trials.assign(max_m, Eigen::MatrixXd::Constant(max_n, max_d, std::nan("")));
    for (const Row& r : rows) {
        data.trials[r.m - 1](r.n - 1, r.d - 1) = r.v;
        data.times(r.n - 1) = r.t;
    }
    data.validate();  // any missing cell is still NaN and fails here
    return data;
}

void write_truth_csvs(const fs::path& dir, const PeriodicTruth& truth) {
    const int N = static_cast<int>(truth.times.size());
    const int D = static_cast<int>(truth.mu.cols());
    {
        std::ofstream out = open_out(dir / "truth_mu.csv");
        out << "time_index,time,channel,value\n";
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < D; ++k)
                out << n + 1 << ',' << format_double(truth.times(n)) << ',' << k + 1 << ','
                    << format_double(truth.mu(n, k)) << '\n';
    }
    {
        std::ofstream out = open_out(dir / "truth_sd.csv");
        out << "time_index,time,channel,value\n";
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < D; ++k)
                out << n + 1 << ',' << format_double(truth.times(n)) << ',' << k + 1 << ','
                    << format_double(truth.sd(n, k)) << '\n';
    }
    const auto write_mats = [&](const char* name, const std::vector<Eigen::MatrixXd>& ms) {
        std::ofstream out = open_out(dir / name);
        out << "time_index,time,row,col,value\n";
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < D; ++i)
                for (int j = 0; j <= i; ++j)
                    out << n + 1 << ',' << format_double(truth.times(n)) << ',' << i + 1
                        << ',' << j + 1 << ',' << format_double(ms[n](i, j)) << '\n';
    };
    write_mats("truth_sigma.csv", truth.sigma);
    write_mats("truth_corr.csv", truth.corr);
}

PeriodicTruth read_truth_csvs(const fs::path& dir) {
    PeriodicTruth truth;
    long N = 0, D = 0;
    {
        std::ifstream in = open_in(dir / "truth_mu.csv");
        std::string line;
        std::getline(in, line);
        struct Row {
            long n, k;
            double t, v;
        };
        std::vector<Row> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            rows.push_back({parse_index(f[0]), parse_index(f[2]), parse_double(f[1]),
                            parse_double(f[3])});
            N = std::max(N, rows.back().n);
            D = std::max(D, rows.back().k);
        }
        truth.times.resize(N);
        truth.mu.resize(N, D);
        for (const auto& r : rows) {
            truth.times(r.n - 1) = r.t;
            truth.mu(r.n - 1, r.k - 1) = r.v;
        }
    }
    {
        std::ifstream in = open_in(dir / "truth_sd.csv");
        std::string line;
        std::getline(in, line);
        truth.sd.resize(N, D);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            truth.sd(parse_index(f[0]) - 1, parse_index(f[2]) - 1) = parse_double(f[3]);
        }
    }
    const auto read_mats = [&](const char* name) {
        std::ifstream in = open_in(dir / name);
        std::string line;
        std::getline(in, line);
        std::vector<Eigen::MatrixXd> ms(N, Eigen::MatrixXd::Zero(D, D));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            const long n = parse_index(f[0]), i = parse_index(f[2]), j = parse_index(f[3]);
            const double v = parse_double(f[4]);
            ms[n - 1](i - 1, j - 1) = v;
            ms[n - 1](j - 1, i - 1) = v;
        }
        return ms;
    };
    truth.sigma = read_mats("truth_sigma.csv");
    truth.corr = read_mats("truth_corr.csv");
    return truth;
}

void write_dynamic_archive(const fs::path& dir, const DynamicSamples& samples) {
    fs::create_directories(dir);
    const int S = static_cast<int>(samples.mu.size());
    const int N = static_cast<int>(samples.mu[0].rows());
    const int D = static_cast<int>(samples.mu[0].cols());
    const int w = samples.band_w > 0 ? samples.band_w : D;

    {
        std::ofstream out = open_out(dir / "times.csv");
        out << "time_index,time\n";
        for (int n = 0; n < N; ++n)
            out << n + 1 << ',' << format_double(samples.times(n)) << '\n';
    }
    const auto write_grid = [&](const char* name, const std::vector<Eigen::MatrixXd>& g) {
        std::ofstream out = open_out(dir / name);
        out << "sample,time_index,channel,value\n";
        for (int s = 0; s < S; ++s)
            for (int n = 0; n < N; ++n)
                for (int k = 0; k < D; ++k)
                    out << s + 1 << ',' << n + 1 << ',' << k + 1 << ','
                        << format_double(g[s](n, k)) << '\n';
    };
    write_grid("samples_mu.csv", samples.mu);
    write_grid("samples_tau.csv", samples.tau);
    {
        std::ofstream out = open_out(dir / "samples_vechL.csv");
        out << "sample,time_index,row,col,value\n";
        for (int s = 0; s < S; ++s)
            for (int n = 0; n < N; ++n)
                for (int i = 0; i < D; ++i)
                    for (int j = std::max(0, i - w + 1); j <= i; ++j)
                        out << s + 1 << ',' << n + 1 << ',' << i + 1 << ',' << j + 1 << ','
                            << format_double(samples.L[s][n].row(i)(j)) << '\n';
    }
    {
        std::ofstream out = open_out(dir / "samples_hyper.csv");
        out << "sample,block,gamma,eta\n";
        const char* names[3] = {"mu", "sigma", "ell"};
        for (int s = 0; s < S; ++s)
            for (int b = 0; b < 3; ++b)
                out << s + 1 << ',' << names[b] << ','
                    << format_double(samples.gammas[s][b]) << ','
                    << format_double(samples.etas[s][b]) << '\n';
    }
    {
        std::ofstream out = open_out(dir / "traces.csv");
        out << "iter,step_size,accept_prob\n";
        for (std::size_t it = 0; it < samples.h_trace.size(); ++it)
            out << it + 1 << ',' << format_double(samples.h_trace[it]) << ','
                << format_double(samples.accept_trace[it]) << '\n';
    }
}

DynamicSamples read_dynamic_archive(const fs::path& dir) {
    DynamicSamples samples;
    long N = 0;
    {
        std::ifstream in = open_in(dir / "times.csv");
        std::string line;
        std::getline(in, line);
        std::vector<double> t;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            t.push_back(parse_double(f[1]));
        }
        N = static_cast<long>(t.size());
        samples.times = Eigen::Map<Eigen::VectorXd>(t.data(), N);
    }
    const auto read_grid = [&](const char* name, std::vector<Eigen::MatrixXd>& g) {
        std::ifstream in = open_in(dir / name);
        std::string line;
        std::getline(in, line);
        long S = 0, D = 0;
        struct Row {
            long s, n, k;
            double v;
        };
        std::vector<Row> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            rows.push_back({parse_index(f[0]), parse_index(f[1]), parse_index(f[2]),
                            parse_double(f[3])});
            S = std::max(S, rows.back().s);
            D = std::max(D, rows.back().k);
        }
        g.assign(S, Eigen::MatrixXd::Zero(N, D));
        for (const auto& r : rows) g[r.s - 1](r.n - 1, r.k - 1) = r.v;
    };
    read_grid("samples_mu.csv", samples.mu);
    read_grid("samples_tau.csv", samples.tau);

    {
        std::ifstream in = open_in(dir / "samples_vechL.csv");
        std::string line;
        std::getline(in, line);
        long S = 0, D = 0;
        struct Row {
            long s, n, i, j;
            double v;
        };
        std::vector<Row> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            rows.push_back({parse_index(f[0]), parse_index(f[1]), parse_index(f[2]),
                            parse_index(f[3]), parse_double(f[4])});
            S = std::max(S, rows.back().s);
            D = std::max(D, rows.back().i);
        }
        // Band width is recovered from the widest stored row offset; the
        // band always includes the diagonal, so the identity placeholders
        // below survive only in the out-of-band positions, where zero is
        // the correct value.
        long w = 1;
        for (const auto& r : rows) w = std::max(w, r.i - r.j + 1);
        samples.band_w = static_cast<int>(w);
        for (long s = 0; s < S; ++s)
            samples.L.emplace_back(N, CorrCholesky::identity(static_cast<int>(D)));
        for (const auto& r : rows)
            samples.L[r.s - 1][r.n - 1].row(static_cast<int>(r.i - 1))(r.j - 1) = r.v;
    }
    {
        std::ifstream in = open_in(dir / "samples_hyper.csv");
        std::string line;
        std::getline(in, line);
        std::map<long, std::array<double, 3>> gam, eta;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            const long s = parse_index(f[0]);
            const int b = f[1] == "mu" ? 0 : (f[1] == "sigma" ? 1 : 2);
            gam[s][b] = parse_double(f[2]);
            eta[s][b] = parse_double(f[3]);
        }
        for (auto& [s, g] : gam) {
            samples.gammas.push_back(g);
            samples.etas.push_back(eta[s]);
        }
    }
    return samples;
}

void write_static_archive(const fs::path& dir, const std::vector<Eigen::MatrixXd>& sigma,
                          const std::vector<Eigen::MatrixXd>& corr) {
    fs::create_directories(dir);
    const auto write_mats = [&](const char* name, const std::vector<Eigen::MatrixXd>& ms) {
        std::ofstream out = open_out(dir / name);
        out << "sample,row,col,value\n";
        for (std::size_t s = 0; s < ms.size(); ++s) {
            const int D = static_cast<int>(ms[s].rows());
            for (int i = 0; i < D; ++i)
                for (int j = 0; j <= i; ++j)
                    out << s + 1 << ',' << i + 1 << ',' << j + 1 << ','
                        << format_double(ms[s](i, j)) << '\n';
        }
    };
    write_mats("samples_sigma.csv", sigma);
    write_mats("samples_corr.csv", corr);
}

void read_static_archive(const fs::path& dir, std::vector<Eigen::MatrixXd>& sigma,
                         std::vector<Eigen::MatrixXd>& corr) {
    const auto read_mats = [&](const char* name, std::vector<Eigen::MatrixXd>& ms) {
        std::ifstream in = open_in(dir / name);
        std::string line;
        std::getline(in, line);
        long S = 0, D = 0;
        struct Row {
            long s, i, j;
            double v;
        };
        std::vector<Row> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            rows.push_back({parse_index(f[0]), parse_index(f[1]), parse_index(f[2]),
                            parse_double(f[3])});
            S = std::max(S, rows.back().s);
            D = std::max(D, rows.back().i);
        }
        ms.assign(S, Eigen::MatrixXd::Zero(D, D));
        for (const auto& r : rows) {
            ms[r.s - 1](r.i - 1, r.j - 1) = r.v;
            ms[r.s - 1](r.j - 1, r.i - 1) = r.v;
        }
    };
    read_mats("samples_sigma.csv", sigma);
    read_mats("samples_corr.csv", corr);
}

void write_summary_csvs(const fs::path& dir, const PosteriorSummary& summary,
                        const PeriodicTruth* truth) {
    fs::create_directories(dir);
    const int N = static_cast<int>(summary.times.size());
    const auto channel_file = [&](const char* name, const CurveSummary& cs,
                                  const Eigen::MatrixXd* truth_grid) {
        std::ofstream out = open_out(dir / name);
        out << "time_index,time,channel,mean,lo,hi";
        if (truth_grid) out << ",truth,covered";
        out << '\n';
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < cs.mean.cols(); ++k) {
                out << n + 1 << ',' << format_double(summary.times(n)) << ',' << k + 1
                    << ',' << format_double(cs.mean(n, k)) << ','
                    << format_double(cs.lo(n, k)) << ',' << format_double(cs.hi(n, k));
                if (truth_grid) {
                    const double t = (*truth_grid)(n, k);
                    out << ',' << format_double(t) << ','
                        << ((t >= cs.lo(n, k) && t <= cs.hi(n, k)) ? 1 : 0);
                }
                out << '\n';
            }
    };
    channel_file("summary_mu.csv", summary.mu, truth ? &truth->mu : nullptr);
    channel_file("summary_sd.csv", summary.sd, truth ? &truth->sd : nullptr);

    {
        std::ofstream out = open_out(dir / "summary_corr.csv");
        out << "time_index,time,row,col,mean,lo,hi";
        if (truth) out << ",truth,covered";
        out << '\n';
        for (int n = 0; n < N; ++n)
            for (std::size_t e = 0; e < summary.rho_pairs.size(); ++e) {
                const auto [i, j] = summary.rho_pairs[e];
                out << n + 1 << ',' << format_double(summary.times(n)) << ',' << i + 1
                    << ',' << j + 1 << ',' << format_double(summary.rho.mean(n, e)) << ','
                    << format_double(summary.rho.lo(n, e)) << ','
                    << format_double(summary.rho.hi(n, e));
                if (truth) {
                    const double t = truth->corr[n](i, j);
                    out << ',' << format_double(t) << ','
                        << ((t >= summary.rho.lo(n, e) && t <= summary.rho.hi(n, e)) ? 1
                                                                                     : 0);
                }
                out << '\n';
            }
    }
    if (truth && summary.two_norm_error.size() == static_cast<Eigen::Index>(N)) {
        std::ofstream out = open_out(dir / "two_norm_error.csv");
        out << "time_index,time,error\n";
        for (int n = 0; n < N; ++n)
            out << n + 1 << ',' << format_double(summary.times(n)) << ','
                << format_double(summary.two_norm_error(n)) << '\n';
    }
}

void write_static_summary_csvs(const fs::path& dir,
                               const std::vector<Eigen::MatrixXd>& sigma,
                               const std::vector<Eigen::MatrixXd>& corr) {
    fs::create_directories(dir);
    const auto summarize = [&](const char* name, const std::vector<Eigen::MatrixXd>& ms) {
        const int D = static_cast<int>(ms[0].rows());
        std::ofstream out = open_out(dir / name);
        out << "row,col,mean,lo,hi\n";
        for (int i = 0; i < D; ++i)
            for (int j = 0; j <= i; ++j) {
                std::vector<double> v;
                v.reserve(ms.size());
                for (const auto& m : ms) v.push_back(m(i, j));
                std::sort(v.begin(), v.end());
                double s = 0.0;
                for (double x : v) s += x;
                out << i + 1 << ',' << j + 1 << ','
                    << format_double(s / static_cast<double>(v.size())) << ','
                    << format_double(quantile_sorted(v, 0.025)) << ','
                    << format_double(quantile_sorted(v, 0.975)) << '\n';
            }
    };
    summarize("summary_sigma.csv", sigma);
    summarize("summary_corr.csv", corr);
}

long count_data_rows(const fs::path& file) {
    std::ifstream in = open_in(file);
    std::string line;
    long rows = -1;  // header excluded
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    return rows;
}

std::map<std::string, long> csv_row_counts(const fs::path& dir) {
    std::map<std::string, long> counts;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv")
            counts[entry.path().filename().string()] = count_data_rows(entry.path());
    return counts;
}

}  // namespace sphcorr
