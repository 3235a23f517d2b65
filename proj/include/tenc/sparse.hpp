#pragma once

#include "tenc/descriptors.hpp"
#include "tenc/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenc {

/// Over-complete dictionary of unit-norm atoms, one per column.
struct SparseDictionary {
    Matrix atoms;  // D x Ka

    std::size_t dimension() const { return static_cast<std::size_t>(atoms.rows()); }
    std::size_t atom_count() const { return static_cast<std::size_t>(atoms.cols()); }
};

/// Sparse coefficient vector stored by support: indices unique and sorted,
/// one coefficient per index.
struct SparseCode {
    std::vector<int> support;
    Vector coefficients;
    int ambient = 0;

    Vector dense() const {
        Vector out = Vector::Zero(ambient);
        for (std::size_t i = 0; i < support.size(); ++i) out(support[i]) = coefficients(i);
        return out;
    }
};

/// Max-pooled image signature over the atom axis.
struct PooledSignature {
    Vector values;  // length Ka
    bool normalized = false;
};

/// Orthogonal matching pursuit: grows the support one atom at a time by
/// maximal |<atom, residual>| (lowest index wins ties), re-fits all
/// coefficients by least squares on the support, and stops at s atoms or
/// when the residual norm falls to res_tol. A zero descriptor yields an
/// empty code.
SparseCode omp(const SparseDictionary& dict, const Eigen::Ref<const Vector>& descriptor,
               std::size_t sparsity, double res_tol = 1e-12);

struct KsvdConfig {
    std::size_t sweeps = 30;
    std::size_t sparsity = 5;
    double res_tol = 1e-12;
    std::uint64_t seed = 1;
};

struct KsvdResult {
    SparseDictionary dictionary;
    std::vector<double> objective;  // ||T - D phi||_F after each full sweep
    std::vector<std::string> warnings;
};

/// k-SVD dictionary learning on descriptor rows (one signal per row):
/// alternates an OMP coding stage with per-column rank-1 updates of the
/// restricted error. Unused atoms are replaced by the currently
/// worst-represented signal. Columns stay unit-norm; the objective after
/// each full sweep is non-increasing.
KsvdResult ksvd_train(const Matrix& data, std::size_t atom_count, const KsvdConfig& config = {});

/// Codes every descriptor of the image with OMP and takes the entry-wise
/// max of |coefficient| per atom, then l2-normalizes.
PooledSignature encode_image_sparse(const SparseDictionary& dict, const DescriptorSet& image,
                                    std::size_t sparsity, double res_tol = 1e-12);

}  // namespace tenc
