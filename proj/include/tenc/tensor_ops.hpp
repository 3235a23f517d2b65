#pragma once

#include "tenc/tensor.hpp"

#include <complex>
#include <vector>

namespace tenc {

/// Discrete Fourier transform of every tube (mode-3 fiber) of an order-3
/// tensor. Same linearization as the source, complex scalars. Because the
/// source is real the spectrum is conjugate-symmetric along the tube axis:
/// slice j equals the conjugate of slice (n3 - j) mod n3.
struct TubeSpectrum {
    std::vector<std::size_t> dims;
    std::vector<std::complex<double>> data;

    Eigen::Map<const Eigen::MatrixXcd> slice(std::size_t k) const {
        return Eigen::Map<const Eigen::MatrixXcd>(data.data() + k * dims[0] * dims[1],
                                                  static_cast<Eigen::Index>(dims[0]),
                                                  static_cast<Eigen::Index>(dims[1]));
    }
    Eigen::Map<Eigen::MatrixXcd> slice(std::size_t k) {
        return Eigen::Map<Eigen::MatrixXcd>(data.data() + k * dims[0] * dims[1],
                                            static_cast<Eigen::Index>(dims[0]),
                                            static_cast<Eigen::Index>(dims[1]));
    }
};

TubeSpectrum tube_fft(const DenseTensor& t);

/// Inverse of tube_fft. The imaginary residue left after the inverse
/// transform must be below 1e-10 relative Frobenius; anything larger throws,
/// since every spectrum we invert should come from a real-tensor pipeline.
DenseTensor tube_ifft(const TubeSpectrum& s);

/// In-place forward/backward DFT along every tube of a complex buffer laid
/// out like DenseTensor with n1*n2 tubes of length n3. Backward includes the
/// 1/n3 scaling. Exposed for the spectral-domain encoders.
void dft_tubes_inplace(std::complex<double>* data, std::size_t tube_count, std::size_t tube_len,
                       bool forward);

/// Matricizes an order-3 tensor on the tube axis: frontal slices stacked
/// vertically in slice order, (n1*n3) x n2.
Matrix unfold_tube(const DenseTensor& t);

/// Exact inverse of unfold_tube for the given extents.
DenseTensor fold_tube(const Matrix& m, const std::vector<std::size_t>& dims);

/// Block-circulant matrix of an order-3 tensor: block (i,j) is frontal
/// slice (i - j) mod n3, so the first block column is unfold_tube(t).
Matrix circ(const DenseTensor& t);

/// t-product of order-3 tensors, t1 (n1 x n2 x n3) * t2 (n2 x m x n3),
/// equal to fold(circ(t1) . unfold(t2)) but computed slice-wise in the
/// tube Fourier domain.
DenseTensor t_product(const DenseTensor& t1, const DenseTensor& t2);

/// Tensor transpose under the t-product: every frontal slice transposed and
/// slices 1..n3-1 reversed, so that (A*B)^T == B^T * A^T.
DenseTensor t_transpose(const DenseTensor& t);

/// Tube identity tensor: identity first frontal slice, zeros elsewhere.
/// Neutral element of the t-product.
DenseTensor tube_identity(std::size_t n, std::size_t n3);

/// Standard mode-n product: contracts dims(t)[mode] against cols(a); the
/// result extent at `mode` is rows(a). Products along distinct modes commute.
DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, std::size_t mode);

/// Sum of R rank-1 outer products; factors all share column count R and
/// factor n contributes the extent of mode n.
DenseTensor cp_reconstruct(const std::vector<Matrix>& factors);

}  // namespace tenc
