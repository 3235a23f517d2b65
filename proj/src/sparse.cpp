#include "tenc/sparse.hpp"

#include "tenc/parallel.hpp"
#include "tenc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tenc {

namespace {

// Least-squares coefficients of x on the dictionary columns in `support`.
Vector refit_on_support(const Matrix& atoms, const std::vector<int>& support,
                        const Eigen::Ref<const Vector>& x) {
    Matrix sub(atoms.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
        sub.col(static_cast<Eigen::Index>(i)) = atoms.col(support[i]);
    return sub.colPivHouseholderQr().solve(x);
}

void sort_by_support(SparseCode& code) {
    std::vector<std::size_t> order(code.support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return code.support[a] < code.support[b]; });
    std::vector<int> support(code.support.size());
    Vector coeffs(code.coefficients.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        support[i] = code.support[order[i]];
        coeffs(static_cast<Eigen::Index>(i)) = code.coefficients(static_cast<Eigen::Index>(order[i]));
    }
    code.support = std::move(support);
    code.coefficients = std::move(coeffs);
}

double code_residual_norm(const Matrix& atoms, const SparseCode& code,
                          const Eigen::Ref<const Vector>& x) {
    Vector r = x;
    for (std::size_t i = 0; i < code.support.size(); ++i)
        r -= code.coefficients(static_cast<Eigen::Index>(i)) * atoms.col(code.support[i]);
    return r.norm();
}

}  // namespace

SparseCode omp(const SparseDictionary& dict, const Eigen::Ref<const Vector>& descriptor,
               std::size_t sparsity, double res_tol) {
    const auto dim = dict.atoms.rows();
    const auto atom_count = dict.atoms.cols();
    if (descriptor.size() != dim) throw std::invalid_argument("omp: descriptor dimension mismatch");
    if (sparsity < 1 || sparsity > static_cast<std::size_t>(std::min(dim, atom_count)))
        throw std::invalid_argument("omp: sparsity budget out of range");

    SparseCode code;
    code.ambient = static_cast<int>(atom_count);
    if (descriptor.norm() == 0.0) return code;

    Vector residual = descriptor;
    std::vector<char> selected(static_cast<std::size_t>(atom_count), 0);
    while (code.support.size() < sparsity && residual.norm() > res_tol) {
        const Vector corr = dict.atoms.transpose() * residual;
        int best = -1;
        double best_abs = 0.0;
        for (Eigen::Index j = 0; j < atom_count; ++j) {
            if (selected[static_cast<std::size_t>(j)]) continue;
            const double a = std::abs(corr(j));
            if (a > best_abs) {  // strict: lowest index wins exact ties
                best_abs = a;
                best = static_cast<int>(j);
            }
        }
        if (best < 0 || best_abs == 0.0) break;  // residual orthogonal to all remaining atoms
        selected[static_cast<std::size_t>(best)] = 1;
        code.support.push_back(best);
        code.coefficients = refit_on_support(dict.atoms, code.support, descriptor);
        residual = descriptor;
        for (std::size_t i = 0; i < code.support.size(); ++i)
            residual -= code.coefficients(static_cast<Eigen::Index>(i)) * dict.atoms.col(code.support[i]);
    }
    sort_by_support(code);
    return code;
}

KsvdResult ksvd_train(const Matrix& data, std::size_t atom_count, const KsvdConfig& config) {
    const auto n_signals = data.rows();
    const auto dim = data.cols();
    if (static_cast<std::size_t>(n_signals) < atom_count)
        throw std::invalid_argument("ksvd_train: need at least one signal per atom");
    if (config.sparsity < 1 ||
        config.sparsity > static_cast<std::size_t>(std::min<Eigen::Index>(dim, atom_count)))
        throw std::invalid_argument("ksvd_train: sparsity budget out of range");

    const Matrix signals = data.transpose();  // D x N, one signal per column
    Rng rng(config.seed);

    // Initialize with distinct nonzero training columns, normalized.
    KsvdResult result;
    Matrix& atoms = result.dictionary.atoms;
    atoms.resize(dim, static_cast<Eigen::Index>(atom_count));
    {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n_signals));
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
        std::size_t cursor = 0;
        for (std::size_t a = 0; a < atom_count; ++a) {
            while (cursor < idx.size() &&
                   signals.col(static_cast<Eigen::Index>(idx[cursor])).norm() == 0.0)
                ++cursor;
            if (cursor >= idx.size())
                throw std::invalid_argument("ksvd_train: not enough nonzero training signals");
            const auto col = signals.col(static_cast<Eigen::Index>(idx[cursor++]));
            atoms.col(static_cast<Eigen::Index>(a)) = col / col.norm();
        }
    }

    std::vector<SparseCode> codes(static_cast<std::size_t>(n_signals));
    for (std::size_t sweep = 0; sweep < config.sweeps; ++sweep) {
        // Coding stage. OMP is greedy, so on rare signals it can code worse
        // than the previous support re-fit under the updated dictionary;
        // keeping the better of the two preserves the sweep-level descent.
        parallel_for(static_cast<std::size_t>(n_signals), [&](std::size_t i) {
            const auto x = signals.col(static_cast<Eigen::Index>(i));
            SparseCode fresh = omp(result.dictionary, x, config.sparsity, config.res_tol);
            if (sweep > 0 && !codes[i].support.empty()) {
                SparseCode refit = codes[i];
                refit.coefficients = refit_on_support(atoms, refit.support, x);
                if (code_residual_norm(atoms, refit, x) < code_residual_norm(atoms, fresh, x)) {
                    codes[i] = std::move(refit);
                    return;
                }
            }
            codes[i] = std::move(fresh);
        });

        // Dictionary update stage, one column at a time.
        for (std::size_t k = 0; k < atom_count; ++k) {
            std::vector<std::size_t> users;
            std::vector<Eigen::Index> pos_in_code;
            for (std::size_t i = 0; i < codes.size(); ++i) {
                const auto& sup = codes[i].support;
                auto it = std::lower_bound(sup.begin(), sup.end(), static_cast<int>(k));
                if (it != sup.end() && *it == static_cast<int>(k)) {
                    users.push_back(i);
                    pos_in_code.push_back(static_cast<Eigen::Index>(it - sup.begin()));
                }
            }
            const auto kc = static_cast<Eigen::Index>(k);
            if (users.empty()) {
                // Replace the unused atom with the worst-represented signal.
                double worst = -1.0;
                Eigen::Index worst_i = 0;
                for (std::size_t i = 0; i < codes.size(); ++i) {
                    const double r = code_residual_norm(
                        atoms, codes[i], signals.col(static_cast<Eigen::Index>(i)));
                    if (r > worst) {
                        worst = r;
                        worst_i = static_cast<Eigen::Index>(i);
                    }
                }
                const auto col = signals.col(worst_i);
                if (col.norm() > 0.0) atoms.col(kc) = col / col.norm();
                result.warnings.push_back("atom " + std::to_string(k) +
                                          " unused and replaced in sweep " + std::to_string(sweep));
                continue;
            }

            // Restricted error E_k over the users of atom k, with atom k's
            // contribution added back.
            Matrix err(dim, static_cast<Eigen::Index>(users.size()));
            for (std::size_t u = 0; u < users.size(); ++u) {
                const auto i = static_cast<Eigen::Index>(users[u]);
                Vector r = signals.col(i);
                const auto& code = codes[users[u]];
                for (std::size_t t = 0; t < code.support.size(); ++t)
                    if (code.support[t] != static_cast<int>(k))
                        r -= code.coefficients(static_cast<Eigen::Index>(t)) *
                             atoms.col(code.support[t]);
                err.col(static_cast<Eigen::Index>(u)) = r;
            }
            Eigen::JacobiSVD<Matrix> svd(err, Eigen::ComputeThinU | Eigen::ComputeThinV);
            Vector u0 = svd.matrixU().col(0);
            Vector v0 = svd.matrixV().col(0);
            const double w0 = svd.singularValues()(0);
            // Deterministic sign: first non-negligible entry of u0 positive.
            for (Eigen::Index j = 0; j < u0.size(); ++j) {
                if (std::abs(u0(j)) > 1e-12) {
                    if (u0(j) < 0.0) {
                        u0 = -u0;
                        v0 = -v0;
                    }
                    break;
                }
            }
            atoms.col(kc) = u0;
            for (std::size_t u = 0; u < users.size(); ++u)
                codes[users[u]].coefficients(pos_in_code[u]) =
                    w0 * v0(static_cast<Eigen::Index>(u));
        }

        double obj_sq = 0.0;
        for (std::size_t i = 0; i < codes.size(); ++i) {
            const double r =
                code_residual_norm(atoms, codes[i], signals.col(static_cast<Eigen::Index>(i)));
            obj_sq += r * r;
        }
        result.objective.push_back(std::sqrt(obj_sq));
    }
    return result;
}

PooledSignature encode_image_sparse(const SparseDictionary& dict, const DescriptorSet& image,
                                    std::size_t sparsity, double res_tol) {
    const auto n = image.descriptors.rows();
    if (n < 1) throw std::invalid_argument("encode_image_sparse: empty descriptor set");
    if (image.descriptors.cols() != dict.atoms.rows())
        throw std::invalid_argument("encode_image_sparse: descriptor dimension mismatch");

    PooledSignature sig;
    sig.values = Vector::Zero(static_cast<Eigen::Index>(dict.atom_count()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const SparseCode code = omp(dict, image.descriptors.row(i).transpose(), sparsity, res_tol);
        for (std::size_t t = 0; t < code.support.size(); ++t)
            sig.values(code.support[t]) =
                std::max(sig.values(code.support[t]),
                         std::abs(code.coefficients(static_cast<Eigen::Index>(t))));
    }
    const double norm = sig.values.norm();
    if (norm > 0.0) {
        sig.values /= norm;
        sig.normalized = true;
    }
    return sig;
}

}  // namespace tenc
