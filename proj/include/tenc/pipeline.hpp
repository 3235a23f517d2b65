#pragma once

#include "tenc/feature_file.hpp"
#include "tenc/model_io.hpp"
#include "tenc/retrieval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenc {

/// Everything a pipeline run needs: encoder choice, hyperparameters,
/// evaluation ks, and timing behavior. Defaults are documented in the CLI.
struct RunConfig {
    std::string encoder = "raw";  // raw|fisher|sparse|tsvd|mpca|lowrank|all
    std::uint64_t seed = 42;
    std::vector<std::size_t> k_list = {1, 5, 10};

    // fisher
    std::size_t gmm_components = 8;
    int em_max_iters = 100;
    double em_rel_tol = 1e-5;
    double variance_floor_scale = 1e-4;
    bool weighted_posterior = false;
    std::size_t gmm_train_subsample = 100000;

    // sparse
    std::size_t sparse_atoms = 0;  // 0 picks 2*D
    std::size_t sparsity = 5;
    double omp_res_tol = 1e-12;
    std::size_t ksvd_sweeps = 15;
    std::size_t ksvd_train_subsample = 5000;

    // tsvd
    std::size_t tsvd_keep_rows = 0;  // 0 keeps the full projection

    // lowrank
    std::size_t lowrank_r = 16;

    // mpca
    std::vector<std::size_t> mpca_dims;  // empty selects by variance ratio
    double mpca_variance_ratio = 0.97;
    std::size_t mpca_max_sweeps = 20;

    // retrieval
    bool exclude_self = false;
    std::string ap_norm = "topk";  // topk | minktotal

    // timing (off by default; timings are measurements and are only written
    // into reports when explicitly requested)
    bool collect_timings = false;
    std::size_t timing_reps = 5;
};

/// Trains the configured encoder on the corpus. raw and lowrank have no
/// training stage and return immediately.
EncoderModel train_encoder(const RunConfig& config, const Corpus& train);

/// Encodes one image with a trained model. Depends on the model alone, so
/// persisted and freshly trained models encode identically.
Vector encode_image(const EncoderModel& model, const DenseTensor& image);

/// encode_image over a corpus followed by l2 normalization, labels attached.
std::vector<Signature> encode_corpus(const EncoderModel& model, const Corpus& corpus);

struct StageTimings {
    double train_ms = -1.0;         // whole training stage
    double encode_image_ms = -1.0;  // per image
    double query_ms = -1.0;         // per query, full MAP pass over k_list
};

struct EncoderEvalRow {
    std::string encoder;
    std::vector<std::pair<std::size_t, double>> map_at;  // (k, MAP@k) in k_list order
    StageTimings timings;
};

struct EvalReport {
    RunConfig config;
    std::string train_path, query_path;
    std::size_t train_m = 0, query_m = 0, h = 0, w = 0, d = 0, categories = 0;
    std::vector<EncoderEvalRow> rows;

    /// Deterministic structured text; identical configs and inputs render
    /// identical bytes (timing lines appear only when they were collected).
    std::string render() const;
};

/// End-to-end run: train, encode database and queries, l2-normalize, build
/// the index, evaluate MAP@k for every configured k. encoder "all" expands
/// to raw plus the five encodings. Models trained along the way are saved
/// under save_models_dir when non-empty.
EvalReport run_pipeline(const RunConfig& config, const std::string& train_path,
                        const std::string& query_path, const std::string& save_models_dir = "");

/// Same pipeline on corpora already in memory.
EvalReport run_pipeline_on(const RunConfig& config, const Corpus& train, const Corpus& queries,
                           const std::string& save_models_dir = "");

}  // namespace tenc
