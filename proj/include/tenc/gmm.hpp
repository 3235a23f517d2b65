#pragma once

#include "tenc/descriptors.hpp"
#include "tenc/rng.hpp"
#include "tenc/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenc {

/// K-component Gaussian mixture with diagonal covariances. Immutable after
/// training; all members are plain data.
struct GmmModel {
    Vector weights;    // K, positive, sums to 1
    Matrix means;      // K x D, one row per component
    Matrix variances;  // K x D, per-dimension diagonal entries, floored

    std::size_t component_count() const { return static_cast<std::size_t>(weights.size()); }
    std::size_t dimension() const { return static_cast<std::size_t>(means.cols()); }
};

struct EmConfig {
    int max_iters = 100;
    double rel_tol = 1e-5;            // stop on relative log-likelihood improvement below this
    double variance_floor_scale = 1e-4;  // floor = scale * global per-dimension variance
    std::uint64_t seed = 1;
    std::size_t seeding_subsample = 10000;  // k-means++ runs on at most this many rows
};

struct GmmTrainResult {
    GmmModel model;
    std::vector<double> log_likelihood;  // one entry per EM iteration
    std::vector<std::string> warnings;
};

/// Fits a diagonal-covariance GMM by EM: k-means++ seeding on a fixed-seed
/// subsample, then iterate until the relative log-likelihood improvement
/// drops below rel_tol or max_iters is hit. The log-likelihood is
/// non-decreasing across iterations (up to rounding slack) except right
/// after a degenerate component is re-seeded or the variance floor binds;
/// both events are recorded as warnings.
GmmTrainResult train_gmm(const Matrix& data, std::size_t k, const EmConfig& config = {});

/// Per-component posterior of one descriptor. The default drops the mixture
/// weights from numerator and denominator; weighted=true uses the
/// conventional weighted form. Log-sum-exp stabilized; the output sums to 1.
Vector soft_assign(const GmmModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& descriptor,
                   bool weighted = false);

/// Total log-likelihood of the rows of data under the model.
double gmm_log_likelihood(const GmmModel& model, const Matrix& data);

/// Draws n descriptors from the mixture; used by generators and tests.
Matrix gmm_sample(const GmmModel& model, std::size_t n, Rng& rng);

}  // namespace tenc
