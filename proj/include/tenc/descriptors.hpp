#pragma once

#include "tenc/tensor.hpp"

#include <string>

namespace tenc {

/// One image's local deep features: N = H*W rows, one D-dimensional
/// descriptor per spatial position.
struct DescriptorSet {
    Matrix descriptors;  // N x D
    std::string source_id;
};

/// Views an H x W x D feature tensor as its (H*W) x D descriptor matrix.
/// The fixed linearization makes this a reinterpretation, not a copy:
/// descriptor p = h + H*w picks up element (h, w, j) at flat p + N*j.
inline Eigen::Map<const Matrix> descriptor_view(const DenseTensor& image) {
    if (image.order() != 3) throw std::invalid_argument("order-3 feature tensor required");
    const auto n = static_cast<Eigen::Index>(image.dim(0) * image.dim(1));
    const auto d = static_cast<Eigen::Index>(image.dim(2));
    return Eigen::Map<const Matrix>(image.data(), n, d);
}

}  // namespace tenc
