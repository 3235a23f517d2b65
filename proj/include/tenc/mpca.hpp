#pragma once

#include "tenc/tensor.hpp"
#include "tenc/tensor_ops.hpp"

#include <vector>

namespace tenc {

/// Per-mode orthonormal factor matrices plus the training mean. Projection
/// maps an image tensor to its core of extents subspace_dims.
struct MpcaModel {
    std::vector<Matrix> factors;  // factor n: extent(n) x subspace_dims[n], orthonormal columns
    DenseTensor mean;
    std::vector<std::size_t> subspace_dims;
};

struct MpcaConfig {
    std::vector<std::size_t> dims;  // explicit per-mode dims; empty selects by variance_ratio
    double variance_ratio = 0.97;   // smallest dims capturing this ratio per mode
    std::size_t max_sweeps = 20;
    double rel_tol = 1e-6;  // stop when relative captured-scatter improvement falls below
};

struct MpcaTrainResult {
    MpcaModel model;
    std::vector<double> captured_scatter;  // after init, then after each sweep
};

/// Alternating per-mode eigen-updates maximizing the captured scatter
/// sum_m ||projection of centered image m||_F^2. Factors start from the
/// leading eigenvectors of each mode's full-projection scatter; the captured
/// scatter is non-decreasing across sweeps.
MpcaTrainResult mpca_train(const std::vector<DenseTensor>& training, const MpcaConfig& config = {});

/// Centers by the training mean and applies every factor transpose:
/// core = (t - mean) x_1 A1^T x_2 A2^T ... x_N AN^T.
DenseTensor mpca_project(const MpcaModel& model, const DenseTensor& t);

/// Applies mode-n products of the factors to a core tensor.
DenseTensor tucker_reconstruct(const DenseTensor& core, const std::vector<Matrix>& factors);

/// Matricizes on the given mode: rows indexed by that mode, columns by the
/// remaining indices in increasing flat order.
Matrix mode_unfold(const DenseTensor& t, std::size_t mode);

}  // namespace tenc
