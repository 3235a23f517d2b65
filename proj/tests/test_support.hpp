#pragma once

#include "tenc/rng.hpp"
#include "tenc/tensor.hpp"
#include "tenc/tensor_ops.hpp"

#include <complex>
#include <vector>

namespace tenc::testing {

inline DenseTensor random_tensor(const std::vector<std::size_t>& dims, Rng& rng) {
    DenseTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal();
    return t;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

// Oracle: the block-circulant definition of the t-product, kept independent
// of the FFT path used by the implementation.
inline DenseTensor t_product_circ_oracle(const DenseTensor& a, const DenseTensor& b) {
    const Matrix product = circ(a) * unfold_tube(b);
    return fold_tube(product, {a.dim(0), b.dim(1), a.dim(2)});
}

// Oracle: quadratic-time DFT of one tube, independent of FFTW.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& tube) {
    const std::size_t n = tube.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
            acc += tube[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

inline double rel_frobenius_diff(const DenseTensor& a, const DenseTensor& b) {
    DenseTensor d = a;
    d -= b;
    const double denom = std::max(frobenius_norm(a), 1e-300);
    return frobenius_norm(d) / denom;
}

// Exact recovery condition for greedy pursuit on support S:
// max_{j not in S} ||pinv(A_S) a_j||_1 < 1. Draws screened by this are the
// well-conditioned instances on which exact OMP support recovery is expected.
inline bool exact_recovery_condition(const Matrix& atoms, const std::vector<int>& support) {
    Matrix sub(atoms.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
        sub.col(static_cast<Eigen::Index>(i)) = atoms.col(support[i]);
    const auto qr = sub.colPivHouseholderQr();
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        bool in_support = false;
        for (int s : support) in_support |= (s == j);
        if (in_support) continue;
        if (qr.solve(atoms.col(j)).lpNorm<1>() >= 1.0) return false;
    }
    return true;
}

}  // namespace tenc::testing
