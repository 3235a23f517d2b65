#include "tenc/mpca.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace tenc {

namespace {

void fix_column_signs(Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > 1e-12) {
                if (m(r, c) < 0.0) m.col(c) = -m.col(c);
                break;
            }
        }
    }
}

// Columns of top-d eigenvectors of a symmetric PSD scatter matrix, in
// descending eigenvalue order, deterministic signs.
Matrix leading_eigenvectors(const Matrix& scatter, std::size_t d) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("mpca: eigendecomposition failed");
    const Eigen::Index n = scatter.rows();
    Matrix out(n, static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c)
        out.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(c));
    fix_column_signs(out);
    return out;
}

std::size_t dims_for_ratio(const Vector& eigvals_desc, double ratio) {
    const double total = eigvals_desc.sum();
    if (total <= 0.0) return 1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eigvals_desc.size(); ++i) {
        acc += eigvals_desc(i);
        if (acc >= ratio * total) return static_cast<std::size_t>(i + 1);
    }
    return static_cast<std::size_t>(eigvals_desc.size());
}

}  // namespace

Matrix mode_unfold(const DenseTensor& t, std::size_t mode) {
    if (mode >= t.order()) throw std::invalid_argument("mode index out of range");
    const std::size_t rows = t.dim(mode);
    const std::size_t cols = t.size() / rows;
    std::size_t left = 1;
    for (std::size_t k = 0; k < mode; ++k) left *= t.dim(k);
    const std::size_t right = cols / left;

    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double* src = t.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t m = 0; m < rows; ++m)
            for (std::size_t l = 0; l < left; ++l)
                out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l + left * r)) =
                    src[l + left * (m + rows * r)];
    return out;
}

MpcaTrainResult mpca_train(const std::vector<DenseTensor>& training, const MpcaConfig& config) {
    if (training.size() < 2) throw std::invalid_argument("mpca_train: at least two images");
    const auto& dims = training.front().dims();
    for (const auto& t : training)
        if (t.dims() != dims) throw std::invalid_argument("mpca_train: inconsistent extents");
    const std::size_t order = dims.size();
    if (!config.dims.empty()) {
        if (config.dims.size() != order)
            throw std::invalid_argument("mpca_train: one subspace dim per mode required");
        for (std::size_t n = 0; n < order; ++n)
            if (config.dims[n] < 1 || config.dims[n] > dims[n])
                throw std::invalid_argument("mpca_train: subspace dim for mode " +
                                            std::to_string(n) + " outside 1.." +
                                            std::to_string(dims[n]));
    }

    MpcaTrainResult result;
    MpcaModel& model = result.model;
    model.mean = DenseTensor(dims);
    for (const auto& t : training) model.mean += t;
    model.mean *= 1.0 / static_cast<double>(training.size());

    auto centered = [&](std::size_t m) {
        DenseTensor c = training[m];
        c -= model.mean;
        return c;
    };

    // Initialization: leading eigenvectors of each mode's full scatter.
    model.factors.resize(order);
    model.subspace_dims.assign(order, 0);
    for (std::size_t n = 0; n < order; ++n) {
        Matrix scatter = Matrix::Zero(static_cast<Eigen::Index>(dims[n]),
                                      static_cast<Eigen::Index>(dims[n]));
        for (std::size_t m = 0; m < training.size(); ++m) {
            const Matrix unf = mode_unfold(centered(m), n);
            scatter.noalias() += unf * unf.transpose();
        }
        std::size_t d;
        if (!config.dims.empty()) {
            d = config.dims[n];
        } else {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
            d = dims_for_ratio(eig.eigenvalues().reverse(), config.variance_ratio);
        }
        model.subspace_dims[n] = d;
        model.factors[n] = leading_eigenvectors(scatter, d);
    }

    auto captured_scatter = [&]() {
        double total = 0.0;
        for (std::size_t m = 0; m < training.size(); ++m) {
            const DenseTensor core = mpca_project(model, training[m]);
            total += core.vec().squaredNorm();
        }
        return total;
    };

    result.captured_scatter.push_back(captured_scatter());
    for (std::size_t sweep = 0; sweep < config.max_sweeps; ++sweep) {
        for (std::size_t n = 0; n < order; ++n) {
            Matrix scatter = Matrix::Zero(static_cast<Eigen::Index>(dims[n]),
                                          static_cast<Eigen::Index>(dims[n]));
            for (std::size_t m = 0; m < training.size(); ++m) {
                DenseTensor partial = centered(m);
                for (std::size_t j = 0; j < order; ++j)
                    if (j != n) partial = mode_n_product(partial, model.factors[j].transpose(), j);
                const Matrix unf = mode_unfold(partial, n);
                scatter.noalias() += unf * unf.transpose();
            }
            model.factors[n] = leading_eigenvectors(scatter, model.subspace_dims[n]);
        }
        const double prev = result.captured_scatter.back();
        const double now = captured_scatter();
        result.captured_scatter.push_back(now);
        if (now - prev <= config.rel_tol * std::max(prev, 1e-300)) break;
    }
    return result;
}

DenseTensor mpca_project(const MpcaModel& model, const DenseTensor& t) {
    if (t.dims() != model.mean.dims())
        throw std::invalid_argument("mpca_project: image extents " + dims_to_string(t.dims()) +
                                    " do not match model " + dims_to_string(model.mean.dims()));
    DenseTensor out = t;
    out -= model.mean;
    for (std::size_t n = 0; n < model.factors.size(); ++n)
        out = mode_n_product(out, model.factors[n].transpose(), n);
    return out;
}

DenseTensor tucker_reconstruct(const DenseTensor& core, const std::vector<Matrix>& factors) {
    if (factors.size() != core.order())
        throw std::invalid_argument("tucker_reconstruct: one factor per mode required");
    DenseTensor out = core;
    for (std::size_t n = 0; n < factors.size(); ++n) {
        if (static_cast<std::size_t>(factors[n].cols()) != core.dim(n))
            throw std::invalid_argument("tucker_reconstruct: factor " + std::to_string(n) +
                                        " columns do not match core extent");
        out = mode_n_product(out, factors[n], n);
    }
    return out;
}

}  // namespace tenc
