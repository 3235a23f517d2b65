#include "tenc/tensor_ops.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace tenc {

namespace {

void require_order3(const DenseTensor& t) {
    if (t.order() != 3) throw std::invalid_argument("order-3 required");
}

// FFTW planning is not thread safe; execution on distinct buffers is. Plans
// are cached per (tube_len, tube_count, direction) and created FFTW_UNALIGNED
// so they can run on any heap buffer via fftw_execute_dft.
class TubePlanCache {
public:
    static TubePlanCache& instance() {
        static TubePlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t tube_count, std::size_t tube_len, bool forward) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(tube_count, tube_len, forward);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<fftw_complex> scratch(tube_count * tube_len);
        int n = static_cast<int>(tube_len);
        fftw_plan plan = fftw_plan_many_dft(
            1, &n, static_cast<int>(tube_count), scratch.data(), nullptr,
            static_cast<int>(tube_count), 1, scratch.data(), nullptr, static_cast<int>(tube_count),
            1, forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    TubePlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> plans_;
};

}  // namespace

void dft_tubes_inplace(std::complex<double>* data, std::size_t tube_count, std::size_t tube_len,
                       bool forward) {
    if (tube_len == 1) {
        return;  // length-1 DFT is the identity either way
    }
    fftw_plan plan = TubePlanCache::instance().get(tube_count, tube_len, forward);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, raw, raw);
    if (!forward) {
        const double scale = 1.0 / static_cast<double>(tube_len);
        const std::size_t total = tube_count * tube_len;
        for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
    }
}

TubeSpectrum tube_fft(const DenseTensor& t) {
    require_order3(t);
    TubeSpectrum spec;
    spec.dims = t.dims();
    spec.data.assign(t.data(), t.data() + t.size());
    dft_tubes_inplace(spec.data.data(), t.dim(0) * t.dim(1), t.dim(2), true);
    return spec;
}

DenseTensor tube_ifft(const TubeSpectrum& s) {
    if (s.dims.size() != 3) throw std::invalid_argument("order-3 required");
    std::vector<std::complex<double>> buf = s.data;
    dft_tubes_inplace(buf.data(), s.dims[0] * s.dims[1], s.dims[2], false);

    double real_sq = 0.0, imag_sq = 0.0;
    std::vector<double> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        out[i] = buf[i].real();
        real_sq += buf[i].real() * buf[i].real();
        imag_sq += buf[i].imag() * buf[i].imag();
    }
    if (std::sqrt(imag_sq) > 1e-10 * std::max(1.0, std::sqrt(real_sq)))
        throw std::runtime_error("tube_ifft: imaginary residue above tolerance");
    return DenseTensor(s.dims, std::move(out));
}

Matrix unfold_tube(const DenseTensor& t) {
    require_order3(t);
    const std::size_t n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    Matrix out(n1 * n3, n2);
    for (std::size_t k = 0; k < n3; ++k)
        out.middleRows(static_cast<Eigen::Index>(k * n1), static_cast<Eigen::Index>(n1)) =
            t.slice(k);
    return out;
}

DenseTensor fold_tube(const Matrix& m, const std::vector<std::size_t>& dims) {
    if (dims.size() != 3) throw std::invalid_argument("order-3 extents required");
    const std::size_t n1 = dims[0], n2 = dims[1], n3 = dims[2];
    if (static_cast<std::size_t>(m.rows()) != n1 * n3 ||
        static_cast<std::size_t>(m.cols()) != n2)
        throw std::invalid_argument("fold_tube: matrix shape " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + " inconsistent with extents " +
                                    dims_to_string(dims));
    DenseTensor out(dims);
    for (std::size_t k = 0; k < n3; ++k)
        out.slice(k) =
            m.middleRows(static_cast<Eigen::Index>(k * n1), static_cast<Eigen::Index>(n1));
    return out;
}

Matrix circ(const DenseTensor& t) {
    require_order3(t);
    const std::size_t n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    Matrix out(n1 * n3, n2 * n3);
    for (std::size_t i = 0; i < n3; ++i)
        for (std::size_t j = 0; j < n3; ++j)
            out.block(static_cast<Eigen::Index>(i * n1), static_cast<Eigen::Index>(j * n2),
                      static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2)) =
                t.slice((i + n3 - j) % n3);
    return out;
}

DenseTensor t_product(const DenseTensor& t1, const DenseTensor& t2) {
    require_order3(t1);
    require_order3(t2);
    if (t1.dim(1) != t2.dim(0) || t1.dim(2) != t2.dim(2))
        throw std::invalid_argument("t_product: extents " + dims_to_string(t1.dims()) + " * " +
                                    dims_to_string(t2.dims()) + " do not chain");
    const std::size_t n1 = t1.dim(0), m = t2.dim(1), n3 = t1.dim(2);

    TubeSpectrum a = tube_fft(t1);
    TubeSpectrum b = tube_fft(t2);
    TubeSpectrum c;
    c.dims = {n1, m, n3};
    c.data.assign(n1 * m * n3, {});

    // Conjugate symmetry of real input: only slices 0..n3/2 are independent.
    const std::size_t half = n3 / 2;
    for (std::size_t k = 0; k <= half; ++k) c.slice(k) = a.slice(k) * b.slice(k);
    for (std::size_t k = half + 1; k < n3; ++k) c.slice(k) = c.slice(n3 - k).conjugate();
    return tube_ifft(c);
}

DenseTensor t_transpose(const DenseTensor& t) {
    require_order3(t);
    const std::size_t n3 = t.dim(2);
    DenseTensor out({t.dim(1), t.dim(0), n3});
    out.slice(0) = t.slice(0).transpose();
    for (std::size_t k = 1; k < n3; ++k) out.slice(k) = t.slice(n3 - k).transpose();
    return out;
}

DenseTensor tube_identity(std::size_t n, std::size_t n3) {
    DenseTensor out({n, n, n3});
    out.slice(0) = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    return out;
}

DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, std::size_t mode) {
    if (mode >= t.order()) throw std::invalid_argument("mode index out of range");
    if (static_cast<std::size_t>(a.cols()) != t.dim(mode))
        throw std::invalid_argument("mode_n_product: cols(a)=" + std::to_string(a.cols()) +
                                    " must match extent " + std::to_string(t.dim(mode)) +
                                    " of mode " + std::to_string(mode));

    const std::size_t order = t.order();
    std::size_t left = 1, right = 1;
    for (std::size_t k = 0; k < mode; ++k) left *= t.dim(k);
    for (std::size_t k = mode + 1; k < order; ++k) right *= t.dim(k);
    const std::size_t mid = t.dim(mode);
    const std::size_t mid_out = static_cast<std::size_t>(a.rows());

    std::vector<std::size_t> out_dims = t.dims();
    out_dims[mode] = mid_out;
    DenseTensor out(out_dims);

    if (mode == 0) {
        // contiguous view n1 x (rest)
        Eigen::Map<const Matrix> x(t.data(), static_cast<Eigen::Index>(mid),
                                   static_cast<Eigen::Index>(right));
        Eigen::Map<Matrix> y(out.data(), static_cast<Eigen::Index>(mid_out),
                             static_cast<Eigen::Index>(right));
        y.noalias() = a * x;
        return out;
    }
    // blocks of (left x mid) matrices, one per trailing index combination
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Matrix> x(t.data() + r * left * mid, static_cast<Eigen::Index>(left),
                                   static_cast<Eigen::Index>(mid));
        Eigen::Map<Matrix> y(out.data() + r * left * mid_out, static_cast<Eigen::Index>(left),
                             static_cast<Eigen::Index>(mid_out));
        y.noalias() = x * a.transpose();
    }
    return out;
}

DenseTensor cp_reconstruct(const std::vector<Matrix>& factors) {
    if (factors.empty()) throw std::invalid_argument("cp_reconstruct: at least one factor");
    const Eigen::Index rank = factors[0].cols();
    if (rank < 1) throw std::invalid_argument("cp_reconstruct: rank must be >= 1");
    std::vector<std::size_t> dims;
    for (const Matrix& f : factors) {
        if (f.cols() != rank)
            throw std::invalid_argument("cp_reconstruct: factors disagree on column count");
        dims.push_back(static_cast<std::size_t>(f.rows()));
    }
    DenseTensor out(dims);
    // first index fastest, so the rank-1 term is the Kronecker chain
    // a_r^(N) kron ... kron a_r^(1)
    for (Eigen::Index r = 0; r < rank; ++r) {
        Vector term = factors[0].col(r);
        for (std::size_t n = 1; n < factors.size(); ++n) {
            const Vector& f = factors[n].col(r);
            Vector next(term.size() * f.size());
            for (Eigen::Index j = 0; j < f.size(); ++j)
                next.segment(j * term.size(), term.size()) = f(j) * term;
            term = std::move(next);
        }
        out.vec() += term;
    }
    return out;
}

}  // namespace tenc
