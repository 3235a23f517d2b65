#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace tenc {

/// Dense real matrix. Column-major, so an order-2 DenseTensor and a Matrix
/// share the same linearization and convert without copying element order.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real tensor of arbitrary order with a fixed linearization:
/// the first index varies fastest, i.e. element (i1,...,iN) lives at
/// flat = i1 + d1*(i2 + d2*(i3 + ...)). For an order-3 tensor n1 x n2 x n3
/// this makes every frontal slice a contiguous column-major n1 x n2 block,
/// and the k-th mode-3 fiber ("tube") a strided run with stride n1*n2.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero tensor with the given extents. Every extent must be positive.
    explicit DenseTensor(std::vector<std::size_t> dims);

    /// Wraps existing data; data.size() must equal the product of dims.
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t k) const { return dims_.at(k); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    /// Generic element access; idx.size() must equal order().
    double& at(const std::vector<std::size_t>& idx) { return data_[flat_index(idx)]; }
    double at(const std::vector<std::size_t>& idx) const { return data_[flat_index(idx)]; }

    /// Order-3 element access.
    double& at3(std::size_t i, std::size_t j, std::size_t k) {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }
    double at3(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[i + dims_[0] * (j + dims_[1] * k)];
    }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const;

    /// Frontal slice k of an order-3 tensor as an Eigen view (no copy).
    Eigen::Map<const Matrix> slice(std::size_t k) const;
    Eigen::Map<Matrix> slice(std::size_t k);

    /// The whole tensor as a flat vector view.
    Eigen::Map<const Vector> vec() const {
        return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()));
    }
    Eigen::Map<Vector> vec() {
        return Eigen::Map<Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()));
    }

    /// Relabels the extents without touching the data. The product of the
    /// new extents must match size(). Because the linearization is fixed,
    /// e.g. an H x W x D feature block and its [H*W, 1, D] view are the
    /// same bytes.
    DenseTensor reshaped(std::vector<std::size_t> new_dims) const;

    /// Order-2 tensor from a matrix (copies; same element order).
    static DenseTensor from_matrix(const Matrix& m);

    /// Converts an order-2 tensor to a matrix. Throws for other orders.
    Matrix to_matrix() const;

    bool same_dims(const DenseTensor& other) const { return dims_ == other.dims_; }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double scale);
    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }

private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

/// sqrt of the sum of squared entries; equals the l2 norm of vec(t).
double frobenius_norm(const DenseTensor& t);
double frobenius_norm(const Matrix& m);

/// Sum of the singular values of m.
double nuclear_norm(const Matrix& m);

std::string dims_to_string(const std::vector<std::size_t>& dims);

}  // namespace tenc
