#include "tenc/pipeline.hpp"

#include "tenc/descriptors.hpp"
#include "tenc/parallel.hpp"
#include "tenc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tenc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point begin, Clock::time_point end) {
    return std::chrono::duration<double, std::milli>(end - begin).count();
}

// Runs fn `reps` times (identical work each time), returns the median time.
template <typename Fn>
double median_time_ms(std::size_t reps, Fn&& fn) {
    std::vector<double> times;
    times.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto begin = Clock::now();
        fn();
        times.push_back(elapsed_ms(begin, Clock::now()));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

// Pools descriptor rows across the corpus, capped by a deterministic
// fixed-seed subsample when the corpus exceeds the budget.
Matrix pooled_descriptors(const Corpus& corpus, std::size_t cap, std::uint64_t seed) {
    const std::size_t per_image = corpus.h * corpus.w;
    const std::size_t total = per_image * corpus.image_count();
    const std::size_t dim = corpus.d;

    std::vector<std::size_t> rows(total);
    std::iota(rows.begin(), rows.end(), 0);
    std::size_t keep = total;
    if (cap > 0 && total > cap) {
        Rng rng(seed);
        for (std::size_t i = 0; i < cap; ++i)
            std::swap(rows[i], rows[i + rng.uniform_index(total - i)]);
        keep = cap;
    }

    Matrix out(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t img = rows[i] / per_image;
        const std::size_t pix = rows[i] % per_image;
        out.row(static_cast<Eigen::Index>(i)) =
            descriptor_view(corpus.images[img]).row(static_cast<Eigen::Index>(pix));
    }
    return out;
}

std::vector<std::string> expand_encoders(const std::string& encoder) {
    if (encoder == "all") return {"raw", "fisher", "sparse", "tsvd", "mpca", "lowrank"};
    return {encoder};
}

void check_encoder_name(const std::string& name) {
    static const char* known[] = {"raw", "fisher", "sparse", "tsvd", "mpca", "lowrank"};
    for (const char* k : known)
        if (name == k) return;
    throw std::invalid_argument("unknown encoder '" + name + "'");
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string join_sizes(const std::vector<std::size_t>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ",";
        out << values[i];
    }
    return out.str();
}

}  // namespace

EncoderModel train_encoder(const RunConfig& config, const Corpus& train) {
    check_encoder_name(config.encoder);
    const std::string& name = config.encoder;

    if (name == "raw") return RawModel{};
    if (name == "lowrank") {
        LowRankModel m;
        m.r = static_cast<std::uint32_t>(config.lowrank_r);
        return m;
    }
    if (name == "fisher") {
        const Matrix data = pooled_descriptors(train, config.gmm_train_subsample, config.seed);
        EmConfig em;
        em.max_iters = config.em_max_iters;
        em.rel_tol = config.em_rel_tol;
        em.variance_floor_scale = config.variance_floor_scale;
        em.seed = config.seed;
        FisherModel m;
        m.gmm = train_gmm(data, config.gmm_components, em).model;
        m.weighted_posterior = config.weighted_posterior;
        return m;
    }
    if (name == "sparse") {
        const Matrix data = pooled_descriptors(train, config.ksvd_train_subsample, config.seed);
        KsvdConfig kc;
        kc.sweeps = config.ksvd_sweeps;
        kc.sparsity = config.sparsity;
        kc.res_tol = config.omp_res_tol;
        kc.seed = config.seed;
        const std::size_t atoms = config.sparse_atoms ? config.sparse_atoms : 2 * train.d;
        SparseModel m;
        m.dictionary = ksvd_train(data, atoms, kc).dictionary;
        m.sparsity = static_cast<std::uint32_t>(config.sparsity);
        m.res_tol = config.omp_res_tol;
        return m;
    }
    if (name == "tsvd") {
        std::vector<DenseTensor> stacked;
        stacked.reserve(train.image_count());
        for (const DenseTensor& img : train.images)
            stacked.push_back(img.reshaped({train.h * train.w, 1, train.d}));
        TsvdModel m{tsvd_train(stacked), static_cast<std::uint32_t>(config.tsvd_keep_rows)};
        return m;
    }
    // mpca
    MpcaConfig mc;
    mc.dims = config.mpca_dims;
    mc.variance_ratio = config.mpca_variance_ratio;
    mc.max_sweeps = config.mpca_max_sweeps;
    return mpca_train(train.images, mc).model;
}

Vector encode_image(const EncoderModel& model, const DenseTensor& image) {
    if (std::holds_alternative<RawModel>(model)) {
        return image.vec();
    }
    if (const auto* fisher = std::get_if<FisherModel>(&model)) {
        DescriptorSet set{descriptor_view(image), ""};
        FisherOptions opts;
        opts.weighted_posterior = fisher->weighted_posterior;
        return fisher_encode(fisher->gmm, set, opts).values;
    }
    if (const auto* sparse = std::get_if<SparseModel>(&model)) {
        DescriptorSet set{descriptor_view(image), ""};
        return encode_image_sparse(sparse->dictionary, set, sparse->sparsity, sparse->res_tol)
            .values;
    }
    if (const auto* tsvd_m = std::get_if<TsvdModel>(&model)) {
        const auto& mean_dims = tsvd_m->basis.mean().dims();
        return tsvd_m->basis.project(image.reshaped(mean_dims), tsvd_m->keep_rows).vec();
    }
    if (const auto* mpca_m = std::get_if<MpcaModel>(&model)) {
        return mpca_project(*mpca_m, image).vec();
    }
    const auto& lowrank = std::get<LowRankModel>(model);
    return low_rank_split(image, lowrank.r).low_rank.vec();
}

std::vector<Signature> encode_corpus(const EncoderModel& model, const Corpus& corpus) {
    std::vector<Signature> out(corpus.image_count());
    parallel_for(corpus.image_count(), [&](std::size_t i) {
        Vector values = encode_image(model, corpus.images[i]);
        const double norm = values.norm();
        if (norm > 0.0) values /= norm;
        out[i] = Signature{std::move(values), corpus.ids[i], corpus.labels[i]};
    }, 8);
    return out;
}

EvalReport run_pipeline(const RunConfig& config, const std::string& train_path,
                        const std::string& query_path, const std::string& save_models_dir) {
    const Corpus train = read_feature_file(train_path);
    const Corpus queries = read_feature_file(query_path);
    EvalReport report = run_pipeline_on(config, train, queries, save_models_dir);
    report.train_path = train_path;
    report.query_path = query_path;
    return report;
}

EvalReport run_pipeline_on(const RunConfig& config, const Corpus& train, const Corpus& queries,
                           const std::string& save_models_dir) {
    if (train.h != queries.h || train.w != queries.w || train.d != queries.d)
        throw std::invalid_argument("pipeline: train and query feature shapes differ");
    for (std::size_t k : config.k_list)
        if (k < 1) throw std::invalid_argument("pipeline: every k must be >= 1");

    // Query labels are matched to database labels by name.
    std::vector<std::uint32_t> query_labels(queries.image_count());
    for (std::size_t i = 0; i < queries.image_count(); ++i) {
        const std::string& name = queries.label_names[queries.labels[i]];
        auto it = std::find(train.label_names.begin(), train.label_names.end(), name);
        if (it == train.label_names.end())
            throw std::invalid_argument("pipeline: query label '" + name +
                                        "' missing from the database label table");
        query_labels[i] =
            static_cast<std::uint32_t>(it - train.label_names.begin());
    }

    EvalReport report;
    report.config = config;
    report.train_m = train.image_count();
    report.query_m = queries.image_count();
    report.h = train.h;
    report.w = train.w;
    report.d = train.d;
    report.categories = train.label_names.size();

    EvalOptions eval_opts;
    eval_opts.exclude_self = config.exclude_self;
    if (config.ap_norm == "topk") {
        eval_opts.ap_norm = ApNormalization::kRelevantInTopK;
    } else if (config.ap_norm == "minktotal") {
        eval_opts.ap_norm = ApNormalization::kMinKTotal;
    } else {
        throw std::invalid_argument("pipeline: unknown AP normalization '" + config.ap_norm + "'");
    }

    const std::size_t reps = config.collect_timings ? std::max<std::size_t>(config.timing_reps, 1) : 1;

    for (const std::string& encoder : expand_encoders(config.encoder)) {
        RunConfig stage_config = config;
        stage_config.encoder = encoder;

        EncoderEvalRow row;
        row.encoder = encoder;

        EncoderModel model;
        const bool has_training = encoder != "raw" && encoder != "lowrank";
        if (config.collect_timings && has_training) {
            row.timings.train_ms =
                median_time_ms(reps, [&]() { model = train_encoder(stage_config, train); });
        } else {
            model = train_encoder(stage_config, train);
        }
        if (!save_models_dir.empty())
            save_model(model, save_models_dir + "/" + encoder + ".tmdl");

        std::vector<Signature> db_sigs;
        std::vector<Signature> query_sigs;
        auto encode_stage = [&]() {
            db_sigs = encode_corpus(model, train);
            query_sigs = encode_corpus(model, queries);
        };
        if (config.collect_timings) {
            const double total = median_time_ms(reps, encode_stage);
            row.timings.encode_image_ms =
                total / static_cast<double>(train.image_count() + queries.image_count());
        } else {
            encode_stage();
        }
        for (std::size_t i = 0; i < query_sigs.size(); ++i) query_sigs[i].label = query_labels[i];

        const EncodedIndex index = build_index(std::move(db_sigs), encoder);
        auto eval_stage = [&]() {
            row.map_at.clear();
            for (std::size_t k : config.k_list)
                row.map_at.emplace_back(k,
                                        mean_average_precision(index, query_sigs, k, eval_opts));
        };
        if (config.collect_timings) {
            const double total = median_time_ms(reps, eval_stage);
            row.timings.query_ms = total / static_cast<double>(query_sigs.size());
        } else {
            eval_stage();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string EvalReport::render() const {
    std::ostringstream out;
    out << "tenc-eval-report v1\n";
    out << "seed " << config.seed << "\n";
    out << "k " << join_sizes(config.k_list) << "\n";
    out << "encoder " << config.encoder << "\n";
    out << "train " << (train_path.empty() ? "-" : train_path) << " m=" << train_m << " h=" << h
        << " w=" << w << " d=" << d << " categories=" << categories << "\n";
    out << "query " << (query_path.empty() ? "-" : query_path) << " m=" << query_m << "\n";
    out << "ap-normalization " << config.ap_norm << "\n";
    out << "exclude-self " << (config.exclude_self ? 1 : 0) << "\n";
    out << "config fisher K=" << config.gmm_components << " em-max-iters=" << config.em_max_iters
        << " em-rel-tol=" << format_double(config.em_rel_tol, 9)
        << " variance-floor-scale=" << format_double(config.variance_floor_scale, 9)
        << " weighted-posterior=" << (config.weighted_posterior ? 1 : 0)
        << " train-subsample=" << config.gmm_train_subsample << "\n";
    out << "config sparse atoms=" << config.sparse_atoms << " sparsity=" << config.sparsity
        << " res-tol=" << format_double(config.omp_res_tol, 15)
        << " sweeps=" << config.ksvd_sweeps << " train-subsample=" << config.ksvd_train_subsample
        << "\n";
    out << "config tsvd keep-rows=" << config.tsvd_keep_rows << "\n";
    out << "config lowrank r=" << config.lowrank_r << "\n";
    out << "config mpca dims=" << (config.mpca_dims.empty() ? "auto" : join_sizes(config.mpca_dims))
        << " variance-ratio=" << format_double(config.mpca_variance_ratio, 6)
        << " max-sweeps=" << config.mpca_max_sweeps << "\n";
    out << "timings " << (config.collect_timings ? "on" : "off");
    if (config.collect_timings) out << " reps=" << config.timing_reps;
    out << "\n";

    for (const EncoderEvalRow& row : rows) {
        out << "\n";
        out << "encoder " << row.encoder << "\n";
        for (const auto& [k, value] : row.map_at)
            out << "map top-" << k << " " << format_double(value, 6) << "\n";
        if (config.collect_timings) {
            if (row.timings.train_ms >= 0.0)
                out << "time train-ms " << format_double(row.timings.train_ms, 3) << "\n";
            out << "time encode-image-ms " << format_double(row.timings.encode_image_ms, 3)
                << "\n";
            out << "time query-ms " << format_double(row.timings.query_ms, 3) << "\n";
        }
    }

    if (rows.empty()) return out.str();
    out << "\n";
    out << "table method";
    for (const auto& entry : rows.front().map_at) out << " top-" << entry.first;
    if (config.collect_timings) out << " train-ms encode-image-ms query-ms";
    out << "\n";
    for (const EncoderEvalRow& row : rows) {
        out << "table " << row.encoder;
        for (const auto& entry : row.map_at) out << " " << format_double(entry.second, 6);
        if (config.collect_timings) {
            out << " "
                << (row.timings.train_ms >= 0.0 ? format_double(row.timings.train_ms, 3) : "-");
            out << " " << format_double(row.timings.encode_image_ms, 3);
            out << " " << format_double(row.timings.query_ms, 3);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace tenc
