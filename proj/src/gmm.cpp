#include "tenc/gmm.hpp"

#include "tenc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tenc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr std::size_t kChunkRows = 1024;

// log N(x; mu_k, Sigma_k) for every component, written into out (length K).
void component_log_densities(const GmmModel& model, const Vector& log_norm_const,
                             const Eigen::Ref<const Eigen::RowVectorXd>& x, Vector& out) {
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const double quad =
            ((x - model.means.row(k)).array().square() / model.variances.row(k).array()).sum();
        out(k) = log_norm_const(k) - 0.5 * quad;
    }
}

Vector log_normalizers(const GmmModel& model) {
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    const auto dim = static_cast<Eigen::Index>(model.dimension());
    Vector out(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k)
        out(k) = -0.5 * (dim * kLog2Pi + model.variances.row(k).array().log().sum());
    return out;
}

double log_sum_exp(const Vector& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

// k-means++ seeding: first center uniform, then proportional to squared
// distance from the nearest chosen center.
Matrix kmeanspp_centers(const Matrix& sample, std::size_t k, Rng& rng) {
    const Eigen::Index n = sample.rows();
    Matrix centers(static_cast<Eigen::Index>(k), sample.cols());
    centers.row(0) = sample.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
    Vector dist2 = (sample.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (std::size_t c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index pick;
        if (total <= 0.0) {
            pick = static_cast<Eigen::Index>(rng.uniform_index(n));
        } else {
            double target = rng.uniform() * total;
            pick = 0;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(static_cast<Eigen::Index>(c)) = sample.row(pick);
        dist2 = dist2.cwiseMin(
            (sample.rowwise() - centers.row(static_cast<Eigen::Index>(c))).rowwise().squaredNorm());
    }
    return centers;
}

struct EStepStats {
    double log_likelihood = 0.0;
    Vector soft_counts;  // K
    Matrix sum_x;        // K x D
    Matrix sum_x2;       // K x D
};

// E-step over fixed-size row chunks; per-chunk partials are reduced in chunk
// order so results do not depend on the worker count.
EStepStats accumulate_estep(const GmmModel& model, const Matrix& data) {
    const auto n = static_cast<std::size_t>(data.rows());
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    const auto dim = static_cast<Eigen::Index>(model.dimension());
    const Vector log_norm = log_normalizers(model);
    const Vector log_weights = model.weights.array().log();

    const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
    std::vector<EStepStats> partial(chunks);

    parallel_chunks(n, kChunkRows, [&](std::size_t c, std::size_t begin, std::size_t end) {
        EStepStats& s = partial[c];
        s.soft_counts = Vector::Zero(k_count);
        s.sum_x = Matrix::Zero(k_count, dim);
        s.sum_x2 = Matrix::Zero(k_count, dim);
        Vector logp(k_count);
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = data.row(static_cast<Eigen::Index>(i));
            component_log_densities(model, log_norm, row, logp);
            logp += log_weights;
            const double lse = log_sum_exp(logp);
            s.log_likelihood += lse;
            for (Eigen::Index k = 0; k < k_count; ++k) {
                const double resp = std::exp(logp(k) - lse);
                s.soft_counts(k) += resp;
                s.sum_x.row(k) += resp * row;
                s.sum_x2.row(k) += resp * row.array().square().matrix();
            }
        }
    });

    EStepStats total;
    total.soft_counts = Vector::Zero(k_count);
    total.sum_x = Matrix::Zero(k_count, dim);
    total.sum_x2 = Matrix::Zero(k_count, dim);
    for (const EStepStats& s : partial) {
        total.log_likelihood += s.log_likelihood;
        total.soft_counts += s.soft_counts;
        total.sum_x += s.sum_x;
        total.sum_x2 += s.sum_x2;
    }
    return total;
}

}  // namespace

GmmTrainResult train_gmm(const Matrix& data, std::size_t k, const EmConfig& config) {
    const auto n = static_cast<std::size_t>(data.rows());
    const auto dim = data.cols();
    if (k < 1) throw std::invalid_argument("train_gmm: k must be >= 1");
    if (n < k)
        throw std::invalid_argument("train_gmm: component count " + std::to_string(k) +
                                    " exceeds sample count " + std::to_string(n));
    if (!data.allFinite()) throw std::invalid_argument("train_gmm: non-finite descriptor data");

    Rng rng(config.seed);

    const Eigen::RowVectorXd global_mean = data.colwise().mean();
    Eigen::RowVectorXd global_var =
        (data.rowwise() - global_mean).array().square().colwise().mean();
    Eigen::RowVectorXd floor =
        (config.variance_floor_scale * global_var.array()).max(1e-12).matrix();

    // Seeding subsample: deterministic partial Fisher-Yates.
    Matrix seed_rows;
    if (n <= config.seeding_subsample) {
        seed_rows = data;
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < config.seeding_subsample; ++i)
            std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
        seed_rows.resize(static_cast<Eigen::Index>(config.seeding_subsample), dim);
        for (std::size_t i = 0; i < config.seeding_subsample; ++i)
            seed_rows.row(static_cast<Eigen::Index>(i)) =
                data.row(static_cast<Eigen::Index>(idx[i]));
    }

    GmmTrainResult result;
    GmmModel& model = result.model;
    model.weights = Vector::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
    model.means = kmeanspp_centers(seed_rows, k, rng);
    model.variances = global_var.cwiseMax(floor).replicate(static_cast<Eigen::Index>(k), 1);

    bool skip_monotonicity_check = false;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        EStepStats stats = accumulate_estep(model, data);

        if (!result.log_likelihood.empty() && !skip_monotonicity_check) {
            const double prev = result.log_likelihood.back();
            const double slack = 1e-9 * std::max(1.0, std::abs(prev));
            if (stats.log_likelihood < prev - slack)
                throw std::runtime_error("train_gmm: EM log-likelihood decreased");
        }
        result.log_likelihood.push_back(stats.log_likelihood);
        skip_monotonicity_check = false;

        if (result.log_likelihood.size() >= 2) {
            const double prev = result.log_likelihood[result.log_likelihood.size() - 2];
            const double gain = stats.log_likelihood - prev;
            if (gain >= 0.0 && gain <= config.rel_tol * std::abs(prev)) break;
        }

        // M-step
        bool floored = false;
        for (Eigen::Index comp = 0; comp < static_cast<Eigen::Index>(k); ++comp) {
            const double mass = stats.soft_counts(comp);
            if (mass < 1e-10 * static_cast<double>(n)) {
                // Re-seed an abandoned component at a random descriptor.
                const auto pick = static_cast<Eigen::Index>(rng.uniform_index(n));
                model.means.row(comp) = data.row(pick);
                model.variances.row(comp) = global_var.cwiseMax(floor);
                model.weights(comp) = 1.0 / static_cast<double>(n);
                result.warnings.push_back("component " + std::to_string(comp) +
                                          " had empty soft mass and was re-seeded");
                skip_monotonicity_check = true;
                continue;
            }
            model.weights(comp) = mass / static_cast<double>(n);
            model.means.row(comp) = stats.sum_x.row(comp) / mass;
            Eigen::RowVectorXd var = stats.sum_x2.row(comp) / mass -
                                     model.means.row(comp).array().square().matrix();
            if ((var.array() < floor.array()).any()) floored = true;
            model.variances.row(comp) = var.cwiseMax(floor);
        }
        model.weights /= model.weights.sum();
        if (floored) {
            // A binding floor changes the M-step optimum, so the usual EM
            // monotonicity guarantee does not cover the next iteration.
            if (result.warnings.empty() || result.warnings.back() != "variance floor applied")
                result.warnings.push_back("variance floor applied");
            skip_monotonicity_check = true;
        }
    }
    return result;
}

Vector soft_assign(const GmmModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& descriptor,
                   bool weighted) {
    if (descriptor.size() != static_cast<Eigen::Index>(model.dimension()))
        throw std::invalid_argument("soft_assign: descriptor dimension mismatch");
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    Vector logp(k_count);
    const Vector log_norm = log_normalizers(model);
    component_log_densities(model, log_norm, descriptor, logp);
    if (weighted) logp += model.weights.array().log().matrix();
    const double lse = log_sum_exp(logp);
    Vector q = (logp.array() - lse).exp();
    q /= q.sum();
    return q;
}

double gmm_log_likelihood(const GmmModel& model, const Matrix& data) {
    const Vector log_norm = log_normalizers(model);
    const Vector log_weights = model.weights.array().log();
    const auto k_count = static_cast<Eigen::Index>(model.component_count());
    double total = 0.0;
    Vector logp(k_count);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        component_log_densities(model, log_norm, data.row(i), logp);
        total += log_sum_exp(logp + log_weights);
    }
    return total;
}

Matrix gmm_sample(const GmmModel& model, std::size_t n, Rng& rng) {
    const auto dim = static_cast<Eigen::Index>(model.dimension());
    const auto k_count = model.component_count();
    Matrix out(static_cast<Eigen::Index>(n), dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t comp = k_count - 1;
        for (std::size_t k = 0; k < k_count; ++k) {
            acc += model.weights(static_cast<Eigen::Index>(k));
            if (u < acc) {
                comp = k;
                break;
            }
        }
        const auto kc = static_cast<Eigen::Index>(comp);
        for (Eigen::Index j = 0; j < dim; ++j)
            out(static_cast<Eigen::Index>(i), j) =
                rng.normal(model.means(kc, j), std::sqrt(model.variances(kc, j)));
    }
    return out;
}

}  // namespace tenc
