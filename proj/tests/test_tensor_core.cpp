#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tenc/tensor.hpp"
#include "tenc/tensor_ops.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace tenc;
using tenc::testing::naive_dft;
using tenc::testing::random_tensor;
using tenc::testing::rel_frobenius_diff;
using tenc::testing::t_product_circ_oracle;

TEST_CASE("dense tensor layout puts the first index fastest") {
    DenseTensor t({2, 3, 2});
    t.at3(1, 2, 0) = 7.0;
    CHECK(t[1 + 2 * 2] == 7.0);
    t.at3(0, 1, 1) = -3.0;
    CHECK(t[2 + 6] == -3.0);
    CHECK(t.size() == 12);
    CHECK_THROWS_AS(DenseTensor({2, 0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(DenseTensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("order-2 tensors convert losslessly to and from matrices") {
    Matrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    DenseTensor t = DenseTensor::from_matrix(m);
    CHECK(t.dims() == std::vector<std::size_t>{2, 3});
    CHECK(t.to_matrix() == m);
    CHECK(t.at({1, 2}) == 6.0);
}

TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(DenseTensor({2, 2, 2})) == 0.0);

    DenseTensor one_hot({2, 2, 2});
    one_hot.at3(1, 0, 1) = 3.0;
    CHECK(frobenius_norm(one_hot) == 3.0);

    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK(frobenius_norm(m) == doctest::Approx(std::sqrt(30.0)).epsilon(1e-12));
    CHECK(frobenius_norm(DenseTensor::from_matrix(m)) ==
          doctest::Approx(std::sqrt(30.0)).epsilon(1e-12));
}

TEST_CASE("nuclear norm") {
    CHECK(nuclear_norm(Matrix::Identity(3, 3)) == doctest::Approx(3.0).epsilon(1e-12));

    Vector u(3), v(4);
    u << 1, 2, 2;
    v << 0, 3, 4, 0;
    u /= u.norm();
    v /= v.norm();
    const Matrix rank1 = 5.0 * u * v.transpose();
    CHECK(nuclear_norm(rank1) == doctest::Approx(5.0).epsilon(1e-12));

    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    // For 2x2: sum of singular values = sqrt(||m||_F^2 + 2|det m|) = sqrt(34).
    CHECK(nuclear_norm(m) == doctest::Approx(std::sqrt(34.0)).epsilon(1e-12));
}

TEST_CASE("nuclear norm dominates frobenius, equality at rank one") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = tenc::testing::random_matrix(4, 3, rng);
        CHECK(nuclear_norm(m) >= frobenius_norm(m) - 1e-12);
    }
    Rng rng2(42);
    const Matrix u = tenc::testing::random_matrix(5, 1, rng2);
    const Matrix v = tenc::testing::random_matrix(4, 1, rng2);
    const Matrix rank1 = u * v.transpose();
    CHECK(nuclear_norm(rank1) == doctest::Approx(frobenius_norm(rank1)).epsilon(1e-10));
}

TEST_CASE("unfold_tube stacks frontal slices; fold_tube is its exact inverse") {
    SUBCASE("n3 = 1 is the identity on the single slice") {
        Matrix m(2, 2);
        m << 1, 2, 3, 4;
        DenseTensor t({2, 2, 1}, {1, 3, 2, 4});
        CHECK(unfold_tube(t) == m);
    }
    SUBCASE("pure tube unfolds to a column") {
        DenseTensor t({1, 1, 3}, {5, 7, 9});
        const Matrix m = unfold_tube(t);
        CHECK(m.rows() == 3);
        CHECK(m.cols() == 1);
        CHECK(m(0, 0) == 5.0);
        CHECK(m(1, 0) == 7.0);
        CHECK(m(2, 0) == 9.0);
    }
    SUBCASE("round trip is exact") {
        Rng rng(7);
        const DenseTensor t = random_tensor({2, 3, 2}, rng);
        const DenseTensor back = fold_tube(unfold_tube(t), t.dims());
        CHECK(back.storage() == t.storage());
    }
    SUBCASE("fold of a 2x1 matrix into a tube") {
        Matrix m(2, 1);
        m << 4, 8;
        const DenseTensor t = fold_tube(m, {1, 1, 2});
        CHECK(t.at3(0, 0, 0) == 4.0);
        CHECK(t.at3(0, 0, 1) == 8.0);
    }
    SUBCASE("mismatched extents throw") {
        Matrix m(4, 2);
        m.setZero();
        CHECK_THROWS_AS(fold_tube(m, {3, 2, 2}), std::invalid_argument);
        CHECK_THROWS_AS(unfold_tube(DenseTensor({2, 2})), std::invalid_argument);
    }
}

TEST_CASE("circ builds the block circulant") {
    SUBCASE("n3 = 1 returns the slice") {
        DenseTensor t({2, 2, 1}, {1, 3, 2, 4});
        CHECK(circ(t) == t.slice(0));
    }
    SUBCASE("scalar tubes") {
        DenseTensor t({1, 1, 2}, {1, 2});
        Matrix expected(2, 2);
        expected << 1, 2, 2, 1;
        CHECK(circ(t) == expected);

        DenseTensor t3({1, 1, 3}, {1, 2, 3});
        Matrix expected3(3, 3);
        expected3 << 1, 3, 2, 2, 1, 3, 3, 2, 1;
        CHECK(circ(t3) == expected3);
    }
    SUBCASE("first block column is the unfolding") {
        Rng rng(11);
        const DenseTensor t = random_tensor({2, 3, 4}, rng);
        CHECK(circ(t).leftCols(3) == unfold_tube(t));
    }
}

TEST_CASE("t_product") {
    Rng rng(13);
    SUBCASE("tube identity is neutral") {
        const DenseTensor t = random_tensor({3, 2, 4}, rng);
        const DenseTensor id = tube_identity(2, 4);
        const DenseTensor prod = t_product(t, id);
        CHECK(rel_frobenius_diff(prod, t) < 1e-12);
    }
    SUBCASE("n3 = 1 degenerates to the matrix product") {
        const DenseTensor a = random_tensor({3, 2, 1}, rng);
        const DenseTensor b = random_tensor({2, 4, 1}, rng);
        const Matrix expected = a.slice(0) * b.slice(0);
        const DenseTensor prod = t_product(a, b);
        CHECK((prod.slice(0) - expected).norm() < 1e-12 * expected.norm());
    }
    SUBCASE("fft path matches the circulant definition") {
        const DenseTensor a = random_tensor({3, 2, 4}, rng);
        const DenseTensor b = random_tensor({2, 2, 4}, rng);
        CHECK(rel_frobenius_diff(t_product(a, b), t_product_circ_oracle(a, b)) <= 1e-8);
    }
    SUBCASE("dimension mismatches throw") {
        const DenseTensor a = random_tensor({3, 2, 4}, rng);
        const DenseTensor b = random_tensor({3, 2, 4}, rng);
        CHECK_THROWS_AS(t_product(a, b), std::invalid_argument);
        const DenseTensor c = random_tensor({2, 2, 3}, rng);
        CHECK_THROWS_AS(t_product(a, c), std::invalid_argument);
    }
}

TEST_CASE("t_product fft path vs circulant oracle over 200 random pairs") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n1 = 1 + rng.uniform_index(8);
        const std::size_t n2 = 1 + rng.uniform_index(8);
        const std::size_t m = 1 + rng.uniform_index(8);
        const std::size_t n3 = 1 + rng.uniform_index(8);
        const DenseTensor a = random_tensor({n1, n2, n3}, rng);
        const DenseTensor b = random_tensor({n2, m, n3}, rng);
        CHECK(rel_frobenius_diff(t_product(a, b), t_product_circ_oracle(a, b)) <= 1e-8);
    }
}

TEST_CASE("t_transpose") {
    Rng rng(19);
    SUBCASE("n3 = 1 is the plain transpose") {
        const DenseTensor t = random_tensor({2, 3, 1}, rng);
        CHECK(t_transpose(t).slice(0) == t.slice(0).transpose());
    }
    SUBCASE("involution") {
        const DenseTensor t = random_tensor({3, 2, 5}, rng);
        CHECK(t_transpose(t_transpose(t)).storage() == t.storage());
    }
    SUBCASE("(A*B)^T == B^T * A^T") {
        const DenseTensor a = random_tensor({2, 3, 3}, rng);
        const DenseTensor b = random_tensor({3, 2, 3}, rng);
        const DenseTensor lhs = t_transpose(t_product(a, b));
        const DenseTensor rhs = t_product(t_transpose(b), t_transpose(a));
        DenseTensor diff = lhs;
        diff -= rhs;
        CHECK(frobenius_norm(diff) < 1e-10 * std::max(1.0, frobenius_norm(lhs)));
    }
}

TEST_CASE("tube spectrum: conjugate symmetry, inversion, Parseval") {
    Rng rng(23);
    const DenseTensor t = random_tensor({3, 2, 6}, rng);
    const TubeSpectrum spec = tube_fft(t);

    SUBCASE("conjugate symmetry of the real input") {
        const std::size_t n3 = t.dim(2);
        for (std::size_t k = 1; k < n3; ++k)
            CHECK((spec.slice(k) - spec.slice(n3 - k).conjugate()).norm() < 1e-12);
    }
    SUBCASE("inverse recovers the source") {
        CHECK(rel_frobenius_diff(tube_ifft(spec), t) < 1e-10);
    }
    SUBCASE("matches the naive dft tube by tube") {
        std::vector<double> tube(t.dim(2));
        for (std::size_t k = 0; k < t.dim(2); ++k) tube[k] = t.at3(1, 1, k);
        const auto expected = naive_dft(tube);
        for (std::size_t k = 0; k < expected.size(); ++k)
            CHECK(std::abs(spec.slice(k)(1, 1) - expected[k]) < 1e-10);
    }
    SUBCASE("Parseval: squared norm equals spectrum energy over n3") {
        double energy = 0.0;
        for (const auto& z : spec.data) energy += std::norm(z);
        energy /= static_cast<double>(t.dim(2));
        const double direct = frobenius_norm(t) * frobenius_norm(t);
        CHECK(energy == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("mode_n_product") {
    Rng rng(29);
    SUBCASE("identity factor leaves the tensor unchanged") {
        const DenseTensor t = random_tensor({2, 3, 4}, rng);
        for (std::size_t mode = 0; mode < 3; ++mode) {
            const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(t.dim(mode)),
                                               static_cast<Eigen::Index>(t.dim(mode)));
            CHECK(rel_frobenius_diff(mode_n_product(t, id, mode), t) < 1e-14);
        }
    }
    SUBCASE("order-2 mode-1 product equals a * t") {
        const DenseTensor t = random_tensor({3, 4}, rng);
        const Matrix a = tenc::testing::random_matrix(2, 3, rng);
        const Matrix expected = a * t.to_matrix();
        CHECK((mode_n_product(t, a, 0).to_matrix() - expected).norm() < 1e-12);
    }
    SUBCASE("distinct modes commute") {
        const DenseTensor t = random_tensor({2, 3, 4}, rng);
        const Matrix a = tenc::testing::random_matrix(5, 2, rng);
        const Matrix b = tenc::testing::random_matrix(6, 3, rng);
        const DenseTensor ab = mode_n_product(mode_n_product(t, a, 0), b, 1);
        const DenseTensor ba = mode_n_product(mode_n_product(t, b, 1), a, 0);
        CHECK(rel_frobenius_diff(ab, ba) < 1e-10);
    }
    SUBCASE("mismatched extents throw") {
        const DenseTensor t = random_tensor({2, 3, 4}, rng);
        const Matrix a = tenc::testing::random_matrix(5, 2, rng);
        CHECK_THROWS_AS(mode_n_product(t, a, 1), std::invalid_argument);
        CHECK_THROWS_AS(mode_n_product(t, a, 3), std::invalid_argument);
    }
}

TEST_CASE("cp_reconstruct") {
    Rng rng(31);
    SUBCASE("single rank-1 term is the outer product") {
        Vector u(2), v(3);
        u << 1, 2;
        v << 3, 4, 5;
        const DenseTensor t = cp_reconstruct({u, v});
        CHECK((t.to_matrix() - u * v.transpose()).norm() == 0.0);
    }
    SUBCASE("zero factors give the zero tensor") {
        const DenseTensor t = cp_reconstruct({Matrix::Zero(2, 3), Matrix::Zero(4, 3)});
        CHECK(frobenius_norm(t) == 0.0);
    }
    SUBCASE("order-3 rank-2 sum matches the entrywise oracle") {
        const Matrix a = tenc::testing::random_matrix(2, 2, rng);
        const Matrix b = tenc::testing::random_matrix(3, 2, rng);
        const Matrix c = tenc::testing::random_matrix(4, 2, rng);
        const DenseTensor t = cp_reconstruct({a, b, c});
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 4; ++k) {
                    double expected = 0.0;
                    for (Eigen::Index r = 0; r < 2; ++r)
                        expected += a(static_cast<Eigen::Index>(i), r) *
                                    b(static_cast<Eigen::Index>(j), r) *
                                    c(static_cast<Eigen::Index>(k), r);
                    CHECK(t.at3(i, j, k) == doctest::Approx(expected).epsilon(1e-12));
                }
    }
    SUBCASE("mismatched ranks throw") {
        CHECK_THROWS_AS(cp_reconstruct({Matrix::Zero(2, 3), Matrix::Zero(4, 2)}),
                        std::invalid_argument);
    }
}
