#pragma once

#include "tenc/fisher.hpp"
#include "tenc/gmm.hpp"
#include "tenc/mpca.hpp"
#include "tenc/retrieval.hpp"
#include "tenc/sparse.hpp"
#include "tenc/tsvd.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tenc {

/// Trained encoder state plus the hyperparameters encoding needs.
/// raw and lowrank need no training; their "models" carry configuration
/// only so that every encoder persists and reloads the same way.
struct FisherModel {
    GmmModel gmm;
    bool weighted_posterior = false;
};

struct SparseModel {
    SparseDictionary dictionary;
    std::uint32_t sparsity = 5;
    double res_tol = 1e-12;
};

struct TsvdModel {
    TsvdBasis basis;
    std::uint32_t keep_rows = 0;  // 0 keeps the full projection
};

struct LowRankModel {
    std::uint32_t r = 16;
};

struct RawModel {};

using EncoderModel =
    std::variant<RawModel, FisherModel, SparseModel, TsvdModel, MpcaModel, LowRankModel>;

/// Stable tag of the encoder behind a model ("raw", "fisher", ...).
std::string encoder_tag(const EncoderModel& model);

/// Full-precision binary persistence (magic "TMDL"); save/load round-trips
/// are bit-exact, so encodings before and after persistence are identical.
void save_model(const EncoderModel& model, const std::string& path);
EncoderModel load_model(const std::string& path);

/// Signature collections / retrieval indexes (magic "TIDX"), storing the
/// encoder tag, label table, and per-item id, label, and values.
struct SignatureFile {
    std::string encoder_tag;
    std::vector<std::string> label_names;
    std::vector<Signature> signatures;
};

void save_signatures(const SignatureFile& sigs, const std::string& path);
SignatureFile load_signatures(const std::string& path);

}  // namespace tenc
