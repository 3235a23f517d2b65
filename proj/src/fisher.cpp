#include "tenc/fisher.hpp"

#include <cmath>
#include <stdexcept>

namespace tenc {

FisherVector fisher_encode(const GmmModel& model, const DescriptorSet& image,
                           const FisherOptions& options) {
    const auto n = image.descriptors.rows();
    const auto dim = static_cast<Eigen::Index>(model.dimension());
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    if (n < 1) throw std::invalid_argument("fisher_encode: empty descriptor set");
    if (image.descriptors.cols() != dim)
        throw std::invalid_argument("fisher_encode: descriptor dimension mismatch");

    const Matrix sigma = model.variances.cwiseSqrt();
    Matrix mean_block = Matrix::Zero(k_count, dim);
    Matrix var_block = Matrix::Zero(k_count, dim);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = image.descriptors.row(i);
        const Vector q = soft_assign(model, row, options.weighted_posterior);
        for (Eigen::Index k = 0; k < k_count; ++k) {
            const auto z = ((row - model.means.row(k)).array() / sigma.row(k).array());
            mean_block.row(k) += q(k) * z.matrix();
            var_block.row(k) += q(k) * (z.square() - 1.0).matrix();
        }
    }

    FisherVector fv;
    fv.values.resize(2 * k_count * dim);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const double w = model.weights(k);
        fv.values.segment(k * dim, dim) = (inv_n / std::sqrt(w)) * mean_block.row(k).transpose();
        fv.values.segment((k_count + k) * dim, dim) =
            (inv_n / std::sqrt(2.0 * w)) * var_block.row(k).transpose();
    }

    if (!options.l2_normalize) return fv;
    const double norm = fv.values.norm();
    if (norm == 0.0) {
        fv.normalized = false;  // measure-zero degenerate case, left untouched
        return fv;
    }
    fv.values /= norm;
    fv.normalized = true;
    return fv;
}

}  // namespace tenc
