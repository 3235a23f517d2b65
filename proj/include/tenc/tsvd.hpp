#pragma once

#include "tenc/tensor.hpp"
#include "tenc/tensor_ops.hpp"

#include <vector>

namespace tenc {

/// Economy t-SVD factors: t == u * s * v^T under the t-product, with
/// r = min(n1, n2) eigen-tuples. u (n1 x r x n3) and v (n2 x r x n3) are
/// t-orthogonal (u^T * u is the tube identity); s (r x r x n3) is f-diagonal
/// with per-slice spectral singular values in non-increasing order.
struct TsvdFactors {
    DenseTensor u;
    DenseTensor s;
    DenseTensor v;
};

/// t-SVD via per-slice complex SVD in the tube Fourier domain. Singular
/// vector phases are pinned (first non-negligible row element of each
/// spectral singular vector made real non-negative) so factors are
/// reproducible bit-for-bit.
TsvdFactors tsvd(const DenseTensor& t);

/// Orthogonal factor dictionary of a training set: images (each n1 x 1 x n3)
/// stacked along the second index, mean-removed, factored by tsvd. Keeps the
/// spectral form of u for fast projections.
class TsvdBasis {
public:
    TsvdBasis() = default;
    TsvdBasis(TsvdFactors factors, DenseTensor mean);

    const DenseTensor& u() const { return factors_.u; }
    const DenseTensor& s() const { return factors_.s; }
    const DenseTensor& v() const { return factors_.v; }
    const DenseTensor& mean() const { return mean_; }

    /// Encodes one image: u^T * (t_test - mean) under the t-product,
    /// optionally keeping only the leading keep_rows tubal rows
    /// (0 keeps everything).
    DenseTensor project(const DenseTensor& t_test, std::size_t keep_rows = 0) const;

private:
    TsvdFactors factors_;
    DenseTensor mean_;
    // Unique spectral slices of u (conjugate symmetry: slices 0..n3/2).
    std::vector<Eigen::MatrixXcd> u_spec_;
};

TsvdBasis tsvd_train(const std::vector<DenseTensor>& images);

/// Additive split t = low_rank + sparse where low_rank keeps the leading r
/// eigen-tuples of the t-SVD and sparse is the exact remainder.
struct LowRankSplit {
    DenseTensor low_rank;
    DenseTensor sparse;
    std::size_t r = 0;
};

LowRankSplit low_rank_split(const DenseTensor& t, std::size_t r);

}  // namespace tenc
