#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphcorr/dynamic_model.hpp"
#include "sphcorr/periodic.hpp"
#include "sphcorr/summary.hpp"
#include "sphcorr/trial_data.hpp"

namespace sphcorr {

// Doubles are written with std::to_chars (shortest round-trip form) and read
// with std::from_chars, so a write/read cycle is bitwise exact and output is
// locale-independent.
std::string format_double(double x);
double parse_double(const std::string& s);

// Long-form trial data: trial,time_index,time,channel,value (1-based indices).
void write_trials_csv(const std::filesystem::path& path, const TrialTensor& data);
TrialTensor read_trials_csv(const std::filesystem::path& path);

void write_truth_csvs(const std::filesystem::path& dir, const PeriodicTruth& truth);
PeriodicTruth read_truth_csvs(const std::filesystem::path& dir);

// Per-chain sample archive for the dynamic model.
void write_dynamic_archive(const std::filesystem::path& dir, const DynamicSamples& samples);
DynamicSamples read_dynamic_archive(const std::filesystem::path& dir);

// Static-model archive: per-sample covariance and correlation entries.
void write_static_archive(const std::filesystem::path& dir,
                          const std::vector<Eigen::MatrixXd>& sigma,
                          const std::vector<Eigen::MatrixXd>& corr);
void read_static_archive(const std::filesystem::path& dir,
                         std::vector<Eigen::MatrixXd>& sigma,
                         std::vector<Eigen::MatrixXd>& corr);

void write_summary_csvs(const std::filesystem::path& dir, const PosteriorSummary& summary,
                        const PeriodicTruth* truth = nullptr);

void write_static_summary_csvs(const std::filesystem::path& dir,
                               const std::vector<Eigen::MatrixXd>& sigma,
                               const std::vector<Eigen::MatrixXd>& corr);

// Row counts of every csv written under an archive directory, for the manifest.
std::map<std::string, long> csv_row_counts(const std::filesystem::path& dir);

long count_data_rows(const std::filesystem::path& file);

}  // namespace sphcorr
