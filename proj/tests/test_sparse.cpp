#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tenc/sparse.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tenc;

namespace {

SparseDictionary random_unit_dictionary(Eigen::Index dim, Eigen::Index atoms, Rng& rng) {
    SparseDictionary dict;
    dict.atoms = tenc::testing::random_matrix(dim, atoms, rng);
    for (Eigen::Index j = 0; j < atoms; ++j) dict.atoms.col(j) /= dict.atoms.col(j).norm();
    return dict;
}

Vector residual_of(const SparseDictionary& dict, const SparseCode& code, const Vector& x) {
    Vector r = x;
    for (std::size_t i = 0; i < code.support.size(); ++i)
        r -= code.coefficients(static_cast<Eigen::Index>(i)) * dict.atoms.col(code.support[i]);
    return r;
}

// Greedy one-to-one matching of true atoms to learned atoms by |cosine|.
std::size_t matched_atoms(const Matrix& truth, const Matrix& learned, double min_cos) {
    Matrix cos = (truth.transpose() * learned).cwiseAbs();
    std::size_t matched = 0;
    std::set<Eigen::Index> used_rows, used_cols;
    for (Eigen::Index step = 0; step < truth.cols(); ++step) {
        double best = -1.0;
        Eigen::Index bi = -1, bj = -1;
        for (Eigen::Index i = 0; i < cos.rows(); ++i) {
            if (used_rows.count(i)) continue;
            for (Eigen::Index j = 0; j < cos.cols(); ++j) {
                if (used_cols.count(j)) continue;
                if (cos(i, j) > best) {
                    best = cos(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi < 0) break;
        used_rows.insert(bi);
        used_cols.insert(bj);
        if (best >= min_cos) ++matched;
    }
    return matched;
}

}  // namespace

TEST_CASE("omp recovers a single atom exactly") {
    Rng rng(301);
    const SparseDictionary dict = random_unit_dictionary(8, 16, rng);
    const Vector x = dict.atoms.col(5);
    const SparseCode code = omp(dict, x, 3);
    REQUIRE(code.support.size() == 1);
    CHECK(code.support[0] == 5);
    CHECK(code.coefficients(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(residual_of(dict, code, x).norm() < 1e-12);
}

TEST_CASE("omp on an orthonormal square dictionary is analysis") {
    Rng rng(302);
    Matrix gauss = tenc::testing::random_matrix(6, 6, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    SparseDictionary dict{q};
    const Vector x = tenc::testing::random_matrix(6, 1, rng);
    const SparseCode code = omp(dict, x, 6, 0.0);
    const Vector expected = q.transpose() * x;
    CHECK((code.dense() - expected).norm() < 1e-10);
    CHECK(residual_of(dict, code, x).norm() < 1e-10);
}

TEST_CASE("omp zero descriptor yields the empty code") {
    Rng rng(303);
    const SparseDictionary dict = random_unit_dictionary(8, 12, rng);
    const SparseCode code = omp(dict, Vector::Zero(8), 4);
    CHECK(code.support.empty());
    CHECK(code.ambient == 12);
}

TEST_CASE("omp rejects bad inputs") {
    Rng rng(304);
    const SparseDictionary dict = random_unit_dictionary(8, 12, rng);
    CHECK_THROWS_AS(omp(dict, Vector::Zero(7), 3), std::invalid_argument);
    CHECK_THROWS_AS(omp(dict, Vector::Zero(8), 0), std::invalid_argument);
    CHECK_THROWS_AS(omp(dict, Vector::Zero(8), 9), std::invalid_argument);
}

TEST_CASE("omp invariants across sparsity budgets") {
    Rng rng(305);
    const SparseDictionary dict = random_unit_dictionary(10, 24, rng);
    for (std::size_t s = 1; s <= 10; ++s) {
        const Vector x = tenc::testing::random_matrix(10, 1, rng);
        // Track the residual across the support sizes 1..s by re-running; the
        // greedy path is deterministic so prefixes agree.
        double prev = x.norm();
        for (std::size_t partial = 1; partial <= s; ++partial) {
            const SparseCode code = omp(dict, x, partial, 0.0);
            std::set<int> unique(code.support.begin(), code.support.end());
            CHECK(unique.size() == code.support.size());  // never the same atom twice
            CHECK(code.support.size() <= partial);
            CHECK(std::is_sorted(code.support.begin(), code.support.end()));
            const Vector r = residual_of(dict, code, x);
            CHECK(r.norm() < prev + 1e-12);
            if (code.support.size() == partial && r.norm() > 1e-12) CHECK(r.norm() < prev);
            prev = r.norm();
            // residual orthogonal to every selected atom
            for (int atom : code.support) CHECK(std::abs(dict.atoms.col(atom).dot(r)) <= 1e-8);
        }
    }
}

TEST_CASE("omp exact support recovery on planted 3-sparse signals") {
    Rng rng(306);
    int recovered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const SparseDictionary dict = random_unit_dictionary(20, 50, rng);
        // well-conditioned draw: re-draw supports failing the exact recovery
        // condition (bounded attempts keep the loop total)
        std::vector<int> support;
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::set<int> draw;
            while (draw.size() < 3) draw.insert(static_cast<int>(rng.uniform_index(50)));
            support.assign(draw.begin(), draw.end());
            if (tenc::testing::exact_recovery_condition(dict.atoms, support)) break;
        }
        Vector x = Vector::Zero(20);
        for (int atom : support) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            x += sign * rng.uniform(1.0, 2.0) * dict.atoms.col(atom);
        }
        const SparseCode code = omp(dict, x, 3);
        CHECK(code.support.size() == 3);
        if (code.support == support) ++recovered;
    }
    CHECK(recovered >= 95);
}

TEST_CASE("ksvd with zero sweeps returns normalized training columns") {
    Rng rng(307);
    const Matrix data = tenc::testing::random_matrix(40, 8, rng);
    KsvdConfig config;
    config.sweeps = 0;
    const KsvdResult result = ksvd_train(data, 16, config);
    CHECK(result.objective.empty());
    REQUIRE(result.dictionary.atom_count() == 16);
    for (Eigen::Index j = 0; j < 16; ++j) {
        const Vector atom = result.dictionary.atoms.col(j);
        CHECK(atom.norm() == doctest::Approx(1.0).epsilon(1e-12));
        // each atom is some normalized training signal
        double best = 0.0;
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            const Vector row = data.row(i).transpose();
            best = std::max(best, std::abs(atom.dot(row / row.norm())));
        }
        CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ksvd objective is non-increasing and columns stay unit norm") {
    Rng rng(308);
    const SparseDictionary truth = random_unit_dictionary(12, 20, rng);
    Matrix data(300, 12);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        Vector x = Vector::Zero(12);
        std::set<int> support;
        while (support.size() < 3) support.insert(static_cast<int>(rng.uniform_index(20)));
        for (int atom : support) x += rng.normal() * truth.atoms.col(atom);
        data.row(i) = x.transpose();
    }
    KsvdConfig config;
    config.sweeps = 10;
    config.sparsity = 3;
    config.seed = 308;
    const KsvdResult result = ksvd_train(data, 20, config);

    REQUIRE(result.objective.size() == 10);
    for (std::size_t i = 1; i < result.objective.size(); ++i)
        CHECK(result.objective[i] <= result.objective[i - 1] + 1e-9);
    for (Eigen::Index j = 0; j < result.dictionary.atoms.cols(); ++j)
        CHECK(result.dictionary.atoms.col(j).norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ksvd recovers a planted dictionary") {
    Rng rng(309);
    const SparseDictionary truth = random_unit_dictionary(20, 32, rng);
    Matrix data(2000, 20);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        Vector x = Vector::Zero(20);
        std::set<int> support;
        while (support.size() < 3) support.insert(static_cast<int>(rng.uniform_index(32)));
        for (int atom : support) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            x += sign * rng.uniform(0.5, 1.5) * truth.atoms.col(atom);
        }
        data.row(i) = x.transpose();
    }
    KsvdConfig config;
    config.sweeps = 30;
    config.sparsity = 3;
    config.seed = 309;
    const KsvdResult result = ksvd_train(data, 32, config);

    for (std::size_t i = 1; i < result.objective.size(); ++i)
        CHECK(result.objective[i] <= result.objective[i - 1] + 1e-9);
    const std::size_t matched = matched_atoms(truth.atoms, result.dictionary.atoms, 0.99);
    CHECK(matched >= 26);  // >= 80% of 32
}

TEST_CASE("ksvd rejects undersized training sets") {
    Rng rng(310);
    const Matrix data = tenc::testing::random_matrix(10, 6, rng);
    CHECK_THROWS_AS(ksvd_train(data, 11), std::invalid_argument);
}

TEST_CASE("encode_image_sparse") {
    Rng rng(311);
    Matrix gauss = tenc::testing::random_matrix(6, 6, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    SparseDictionary dict{q};

    SUBCASE("single descriptor equal to an atom is one-hot") {
        Matrix rows = dict.atoms.col(3).transpose();
        const PooledSignature sig = encode_image_sparse(dict, {rows, "img"}, 2);
        CHECK(sig.normalized);
        CHECK(sig.values(3) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sig.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("duplicated descriptors pool to the same signature") {
        Matrix one = tenc::testing::random_matrix(1, 6, rng);
        Matrix three(3, 6);
        three << one, one, one;
        const PooledSignature a = encode_image_sparse(dict, {one, "a"}, 3);
        const PooledSignature b = encode_image_sparse(dict, {three, "b"}, 3);
        CHECK((a.values - b.values).norm() == 0.0);
    }
    SUBCASE("disjoint unit hits split the mass evenly") {
        Matrix rows(2, 6);
        rows.row(0) = dict.atoms.col(1).transpose();
        rows.row(1) = dict.atoms.col(5).transpose();
        const PooledSignature sig = encode_image_sparse(dict, {rows, "img"}, 1);
        CHECK(sig.values(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(sig.values(5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(sig.values.sum() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("permutation invariance") {
        Matrix rows = tenc::testing::random_matrix(5, 6, rng);
        Matrix perm(5, 6);
        const int order[5] = {3, 0, 4, 1, 2};
        for (int i = 0; i < 5; ++i) perm.row(i) = rows.row(order[i]);
        const PooledSignature a = encode_image_sparse(dict, {rows, "a"}, 2);
        const PooledSignature b = encode_image_sparse(dict, {perm, "b"}, 2);
        CHECK((a.values - b.values).norm() == 0.0);
    }
    SUBCASE("empty descriptor set is rejected") {
        CHECK_THROWS_AS(encode_image_sparse(dict, {Matrix::Zero(0, 6), "e"}, 2),
                        std::invalid_argument);
    }
}
