#include "tenc/tensor.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tenc {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw std::invalid_argument("tensor order must be >= 1");
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("tensor extents must be positive");
        n *= d;
    }
    return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(checked_size(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    if (checked_size(dims_) != data_.size())
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                    " does not match extents " + dims_to_string(dims_));
}

std::size_t DenseTensor::flat_index(const std::vector<std::size_t>& idx) const {
    if (idx.size() != dims_.size()) throw std::invalid_argument("index order mismatch");
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (idx[k] >= dims_[k]) throw std::out_of_range("tensor index out of range");
        flat += idx[k] * stride;
        stride *= dims_[k];
    }
    return flat;
}

Eigen::Map<const Matrix> DenseTensor::slice(std::size_t k) const {
    if (order() != 3) throw std::invalid_argument("order-3 required");
    if (k >= dims_[2]) throw std::out_of_range("slice index out of range");
    return Eigen::Map<const Matrix>(data_.data() + k * dims_[0] * dims_[1],
                                    static_cast<Eigen::Index>(dims_[0]),
                                    static_cast<Eigen::Index>(dims_[1]));
}

Eigen::Map<Matrix> DenseTensor::slice(std::size_t k) {
    if (order() != 3) throw std::invalid_argument("order-3 required");
    if (k >= dims_[2]) throw std::out_of_range("slice index out of range");
    return Eigen::Map<Matrix>(data_.data() + k * dims_[0] * dims_[1],
                              static_cast<Eigen::Index>(dims_[0]),
                              static_cast<Eigen::Index>(dims_[1]));
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> new_dims) const {
    if (checked_size(new_dims) != data_.size())
        throw std::invalid_argument("reshape size mismatch: " + dims_to_string(dims_) + " -> " +
                                    dims_to_string(new_dims));
    return DenseTensor(std::move(new_dims), data_);
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
    std::vector<double> data(m.data(), m.data() + m.size());
    return DenseTensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                       std::move(data));
}

Matrix DenseTensor::to_matrix() const {
    if (order() != 2) throw std::invalid_argument("order-2 required for matrix conversion");
    return Eigen::Map<const Matrix>(data_.data(), static_cast<Eigen::Index>(dims_[0]),
                                    static_cast<Eigen::Index>(dims_[1]));
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    if (!same_dims(other)) throw std::invalid_argument("tensor extents mismatch");
    vec() += other.vec();
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    if (!same_dims(other)) throw std::invalid_argument("tensor extents mismatch");
    vec() -= other.vec();
    return *this;
}

DenseTensor& DenseTensor::operator*=(double scale) {
    vec() *= scale;
    return *this;
}

double frobenius_norm(const DenseTensor& t) { return t.vec().norm(); }

double frobenius_norm(const Matrix& m) { return m.norm(); }

double nuclear_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

std::string dims_to_string(const std::vector<std::size_t>& dims) {
    std::ostringstream out;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k) out << "x";
        out << dims[k];
    }
    return out.str();
}

}  // namespace tenc
