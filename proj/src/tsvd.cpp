#include "tenc/tsvd.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace tenc {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Pins the unit-modulus phase ambiguity of an SVD pair: the first
// non-negligible element of each left singular vector is made real
// non-negative, with the matching right vector rotated to compensate.
void fix_phases(MatrixXcd& u, MatrixXcd& v) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            const std::complex<double> val = u(r, c);
            const double mag = std::abs(val);
            if (mag > 1e-12) {
                const std::complex<double> phase = val / mag;
                u.col(c) *= std::conj(phase);
                if (c < v.cols()) v.col(c) *= std::conj(phase);
                break;
            }
        }
    }
}

struct SpectralSvd {
    std::vector<MatrixXcd> u, v;      // per unique slice
    std::vector<Eigen::VectorXd> sv;  // singular values per unique slice
};

// Thin SVD of every unique spectral slice (0..n3/2); the rest follow by
// conjugate symmetry.
SpectralSvd slicewise_svd(const TubeSpectrum& spec) {
    const std::size_t n3 = spec.dims[2];
    const std::size_t half = n3 / 2;
    SpectralSvd out;
    out.u.resize(half + 1);
    out.v.resize(half + 1);
    out.sv.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        Eigen::JacobiSVD<MatrixXcd> svd(spec.slice(k),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
        MatrixXcd u = svd.matrixU();
        MatrixXcd v = svd.matrixV();
        fix_phases(u, v);
        out.u[k] = std::move(u);
        out.v[k] = std::move(v);
        out.sv[k] = svd.singularValues();
    }
    return out;
}

// Writes per-slice complex matrices (unique half plus conjugate mirror) into
// a TubeSpectrum and inverse-transforms to a real tensor.
template <typename SliceFn>
DenseTensor assemble_from_slices(std::size_t n1, std::size_t n2, std::size_t n3, SliceFn&& fn) {
    TubeSpectrum spec;
    spec.dims = {n1, n2, n3};
    spec.data.assign(n1 * n2 * n3, {});
    const std::size_t half = n3 / 2;
    for (std::size_t k = 0; k <= half; ++k) spec.slice(k) = fn(k);
    for (std::size_t k = half + 1; k < n3; ++k) spec.slice(k) = spec.slice(n3 - k).conjugate();
    return tube_ifft(spec);
}

}  // namespace

TsvdFactors tsvd(const DenseTensor& t) {
    if (t.order() != 3) throw std::invalid_argument("order-3 required");
    const std::size_t n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    const std::size_t rank = std::min(n1, n2);

    const TubeSpectrum spec = tube_fft(t);
    const SpectralSvd slices = slicewise_svd(spec);

    TsvdFactors out;
    out.u = assemble_from_slices(n1, rank, n3, [&](std::size_t k) { return slices.u[k]; });
    out.v = assemble_from_slices(n2, rank, n3, [&](std::size_t k) { return slices.v[k]; });
    out.s = assemble_from_slices(rank, rank, n3, [&](std::size_t k) {
        return MatrixXcd(slices.sv[k].cast<std::complex<double>>().asDiagonal());
    });
    return out;
}

TsvdBasis::TsvdBasis(TsvdFactors factors, DenseTensor mean)
    : factors_(std::move(factors)), mean_(std::move(mean)) {
    const TubeSpectrum uspec = tube_fft(factors_.u);
    const std::size_t half = factors_.u.dim(2) / 2;
    u_spec_.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) u_spec_[k] = uspec.slice(k);
}

DenseTensor TsvdBasis::project(const DenseTensor& t_test, std::size_t keep_rows) const {
    if (t_test.dims() != mean_.dims())
        throw std::invalid_argument("tsvd projection: image extents " +
                                    dims_to_string(t_test.dims()) + " do not match basis " +
                                    dims_to_string(mean_.dims()));
    const std::size_t rank = factors_.u.dim(1);
    std::size_t keep = keep_rows == 0 ? rank : keep_rows;
    if (keep > rank) throw std::invalid_argument("tsvd projection: truncation exceeds rank");

    DenseTensor centered = t_test;
    centered -= mean_;

    const std::size_t n3 = mean_.dim(2);
    TubeSpectrum x = tube_fft(centered);
    const auto keep_i = static_cast<Eigen::Index>(keep);
    return assemble_from_slices(keep, 1, n3, [&](std::size_t k) {
        return MatrixXcd(u_spec_[k].leftCols(keep_i).adjoint() * x.slice(k));
    });
}

TsvdBasis tsvd_train(const std::vector<DenseTensor>& images) {
    if (images.empty()) throw std::invalid_argument("tsvd_train: at least one training image");
    const auto& dims = images.front().dims();
    if (dims.size() != 3 || dims[1] != 1)
        throw std::invalid_argument("tsvd_train: images must be n1 x 1 x n3");
    for (const auto& img : images)
        if (img.dims() != dims)
            throw std::invalid_argument("tsvd_train: inconsistent image extents");

    const std::size_t n1 = dims[0], n3 = dims[2], m = images.size();

    DenseTensor mean(dims);
    for (const auto& img : images) mean += img;
    mean *= 1.0 / static_cast<double>(m);

    // Images become the lateral (second-index) slices of the stack.
    DenseTensor stack({n1, m, n3});
    for (std::size_t im = 0; im < m; ++im) {
        const DenseTensor& img = images[im];
        for (std::size_t k = 0; k < n3; ++k)
            for (std::size_t i = 0; i < n1; ++i)
                stack.at3(i, im, k) = img.at3(i, 0, k) - mean.at3(i, 0, k);
    }
    return TsvdBasis(tsvd(stack), std::move(mean));
}

LowRankSplit low_rank_split(const DenseTensor& t, std::size_t r) {
    if (t.order() != 3) throw std::invalid_argument("order-3 required");
    const std::size_t n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    if (r < 1 || r > std::min(n1, n2))
        throw std::invalid_argument("low_rank_split: truncation index " + std::to_string(r) +
                                    " out of range for " + dims_to_string(t.dims()));

    const TubeSpectrum spec = tube_fft(t);
    const SpectralSvd slices = slicewise_svd(spec);
    const auto r_i = static_cast<Eigen::Index>(r);

    LowRankSplit split;
    split.r = r;
    split.low_rank = assemble_from_slices(n1, n2, n3, [&](std::size_t k) {
        return MatrixXcd(slices.u[k].leftCols(r_i) *
                         slices.sv[k].head(r_i).cast<std::complex<double>>().asDiagonal() *
                         slices.v[k].leftCols(r_i).adjoint());
    });
    split.sparse = t;
    split.sparse -= split.low_rank;
    return split;
}

}  // namespace tenc
