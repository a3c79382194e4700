#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sphcorr/errors.hpp"

namespace sphcorr {

// M trials of an N x D multivariate series observed on a common grid.
struct TrialTensor {
    std::vector<Eigen::MatrixXd> trials;  // each N x D
    Eigen::VectorXd times;                // raw times, length N

    int n_trials() const { return static_cast<int>(trials.size()); }
    int n_points() const { return trials.empty() ? 0 : static_cast<int>(trials[0].rows()); }
    int n_channels() const { return trials.empty() ? 0 : static_cast<int>(trials[0].cols()); }

    void validate() const {
        if (trials.empty()) throw RaggedData("TrialTensor: no trials");
        const auto rows = trials[0].rows();
        const auto cols = trials[0].cols();
        if (times.size() != rows)
            throw RaggedData("TrialTensor: time axis does not match data");
        for (const auto& t : trials) {
            if (t.rows() != rows || t.cols() != cols)
                throw RaggedData("TrialTensor: inconsistent trial shapes");
            if (!t.allFinite()) throw RaggedData("TrialTensor: non-finite values");
        }
    }
};

}  // namespace sphcorr
