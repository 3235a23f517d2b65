#pragma once

#include "tenc/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenc {

/// One database entry: a flattened signature with an opaque id and a
/// category label.
struct Signature {
    Vector values;
    std::string item_id;
    std::uint32_t label = 0;
};

/// Immutable database of signatures sharing one encoder and one dimension.
class EncodedIndex {
public:
    EncodedIndex(std::vector<Signature> signatures, std::string encoder_tag);

    std::size_t size() const { return signatures_.size(); }
    std::size_t dimension() const { return dimension_; }
    const std::string& encoder_tag() const { return encoder_tag_; }
    const Signature& item(std::size_t i) const { return signatures_[i]; }
    const std::vector<Signature>& signatures() const { return signatures_; }

private:
    std::vector<Signature> signatures_;
    std::string encoder_tag_;
    std::size_t dimension_ = 0;
};

inline EncodedIndex build_index(std::vector<Signature> signatures, std::string encoder_tag) {
    return EncodedIndex(std::move(signatures), std::move(encoder_tag));
}

/// Ranked neighbors, ascending distance; ties broken by insertion order.
struct RankedResult {
    struct Hit {
        std::size_t index;  // position in the index
        double distance;
    };
    std::vector<Hit> hits;
};

struct QueryOptions {
    bool exclude_self = false;  // drop the candidate whose item_id equals the query's
};

/// Top-k by Euclidean distance (Frobenius on flattened tensor encodings).
RankedResult query(const EncodedIndex& index, const Signature& q, std::size_t k,
                   const QueryOptions& options = {});

enum class ApNormalization {
    kRelevantInTopK,  // divide by the number of relevant results in the top k (1 if none)
    kMinKTotal,       // divide by min(k, total relevant in the candidate set)
};

struct EvalOptions {
    ApNormalization ap_norm = ApNormalization::kRelevantInTopK;
    bool exclude_self = false;
};

/// Average precision over the top k of a ranked result:
/// sum of precision@i over relevant ranks i <= k, divided by the
/// normalizer picked above. total_relevant is only consulted by kMinKTotal.
double average_precision_at_k(const RankedResult& result, const EncodedIndex& index,
                              std::uint32_t query_label, std::size_t k,
                              ApNormalization norm = ApNormalization::kRelevantInTopK,
                              std::size_t total_relevant = 0);

/// Mean of per-query AP@k over the query set.
double mean_average_precision(const EncodedIndex& index, const std::vector<Signature>& queries,
                              std::size_t k, const EvalOptions& options = {});

}  // namespace tenc
