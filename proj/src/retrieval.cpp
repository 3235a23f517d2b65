#include "tenc/retrieval.hpp"

#include "tenc/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace tenc {

EncodedIndex::EncodedIndex(std::vector<Signature> signatures, std::string encoder_tag)
    : signatures_(std::move(signatures)), encoder_tag_(std::move(encoder_tag)) {
    if (signatures_.empty()) throw std::invalid_argument("build_index: no signatures");
    dimension_ = static_cast<std::size_t>(signatures_.front().values.size());
    for (const Signature& s : signatures_) {
        if (static_cast<std::size_t>(s.values.size()) != dimension_)
            throw std::invalid_argument("build_index: signature dimension mismatch (" +
                                        std::to_string(s.values.size()) + " vs " +
                                        std::to_string(dimension_) + ")");
        if (!s.values.allFinite())
            throw std::invalid_argument("build_index: non-finite signature entries");
    }
}

RankedResult query(const EncodedIndex& index, const Signature& q, std::size_t k,
                   const QueryOptions& options) {
    if (index.size() == 0) throw std::invalid_argument("query: empty index");
    if (k < 1) throw std::invalid_argument("query: k must be >= 1");
    if (static_cast<std::size_t>(q.values.size()) != index.dimension())
        throw std::invalid_argument("query: dimension mismatch");

    RankedResult result;
    result.hits.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        const Signature& cand = index.item(i);
        if (options.exclude_self && cand.item_id == q.item_id) continue;
        result.hits.push_back({i, (cand.values - q.values).norm()});
    }
    // Stable sort on distance keeps insertion order for exact ties.
    std::stable_sort(result.hits.begin(), result.hits.end(),
                     [](const RankedResult::Hit& a, const RankedResult::Hit& b) {
                         return a.distance < b.distance;
                     });
    if (result.hits.size() > k) result.hits.resize(k);
    return result;
}

double average_precision_at_k(const RankedResult& result, const EncodedIndex& index,
                              std::uint32_t query_label, std::size_t k, ApNormalization norm,
                              std::size_t total_relevant) {
    std::size_t relevant_seen = 0;
    double precision_sum = 0.0;
    const std::size_t depth = std::min(k, result.hits.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (index.item(result.hits[i].index).label == query_label) {
            ++relevant_seen;
            precision_sum += static_cast<double>(relevant_seen) / static_cast<double>(i + 1);
        }
    }
    std::size_t denom;
    switch (norm) {
        case ApNormalization::kRelevantInTopK:
            denom = std::max<std::size_t>(relevant_seen, 1);
            break;
        case ApNormalization::kMinKTotal:
            denom = std::max<std::size_t>(std::min(k, total_relevant), 1);
            break;
        default:
            throw std::invalid_argument("unknown AP normalization");
    }
    return precision_sum / static_cast<double>(denom);
}

double mean_average_precision(const EncodedIndex& index, const std::vector<Signature>& queries,
                              std::size_t k, const EvalOptions& options) {
    if (queries.empty()) throw std::invalid_argument("mean_average_precision: no queries");

    std::vector<double> ap(queries.size());
    parallel_for(queries.size(), [&](std::size_t qi) {
        const Signature& q = queries[qi];
        QueryOptions qopt;
        qopt.exclude_self = options.exclude_self;
        const RankedResult ranked = query(index, q, k, qopt);
        std::size_t total_relevant = 0;
        if (options.ap_norm == ApNormalization::kMinKTotal) {
            for (std::size_t i = 0; i < index.size(); ++i) {
                const Signature& cand = index.item(i);
                if (options.exclude_self && cand.item_id == q.item_id) continue;
                if (cand.label == q.label) ++total_relevant;
            }
        }
        ap[qi] = average_precision_at_k(ranked, index, q.label, k, options.ap_norm, total_relevant);
    });

    double sum = 0.0;
    for (double v : ap) sum += v;
    return sum / static_cast<double>(queries.size());
}

}  // namespace tenc
