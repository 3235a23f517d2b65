#include "tenc/cli.hpp"

#include "tenc/pipeline.hpp"
#include "tenc/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace tenc {

namespace {

void add_encoder_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--seed", config.seed, "Random seed for every stochastic stage");
    cmd->add_option("--gmm-components,-K", config.gmm_components, "Mixture components (fisher)");
    cmd->add_option("--em-max-iters", config.em_max_iters, "EM iteration cap (fisher)");
    cmd->add_option("--em-rel-tol", config.em_rel_tol,
                    "EM relative log-likelihood stopping tolerance (fisher)");
    cmd->add_option("--variance-floor-scale", config.variance_floor_scale,
                    "Variance floor as a fraction of the global variance (fisher)");
    cmd->add_flag("--weighted-posterior", config.weighted_posterior,
                  "Include mixture weights in the soft assignments (fisher)");
    cmd->add_option("--gmm-train-subsample", config.gmm_train_subsample,
                    "Descriptor cap for GMM training, 0 = all (fisher)");
    cmd->add_option("--atoms", config.sparse_atoms, "Dictionary atoms, 0 = 2*D (sparse)");
    cmd->add_option("--sparsity,-s", config.sparsity, "OMP sparsity budget (sparse)");
    cmd->add_option("--omp-res-tol", config.omp_res_tol, "OMP residual tolerance (sparse)");
    cmd->add_option("--ksvd-sweeps", config.ksvd_sweeps, "Dictionary learning sweeps (sparse)");
    cmd->add_option("--ksvd-train-subsample", config.ksvd_train_subsample,
                    "Descriptor cap for dictionary learning, 0 = all (sparse)");
    cmd->add_option("--tsvd-keep-rows", config.tsvd_keep_rows,
                    "Tubal rows kept by the projection, 0 = all (tsvd)");
    cmd->add_option("--lowrank-r", config.lowrank_r, "Truncation index (lowrank)");
    cmd->add_option("--mpca-dims", config.mpca_dims, "Explicit per-mode dims (mpca)")
        ->delimiter(',');
    cmd->add_option("--mpca-variance-ratio", config.mpca_variance_ratio,
                    "Per-mode variance ratio when dims are not explicit (mpca)");
    cmd->add_option("--mpca-max-sweeps", config.mpca_max_sweeps, "Optimization sweeps (mpca)");
}

std::string label_name_of(const SignatureFile& sigs, std::uint32_t label) {
    if (label < sigs.label_names.size()) return sigs.label_names[label];
    return "label" + std::to_string(label);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Feature-tensor encoding and retrieval toolkit"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic feature corpus");
    SynthConfig synth_config;
    std::string synth_out, synth_query_out;
    std::size_t queries_per_category = 2;
    synth->add_option("--out", synth_out, "Output feature file")->required();
    synth->add_option("--categories", synth_config.categories, "Category count");
    synth->add_option("--per-category", synth_config.per_category, "Images per category");
    synth->add_option("--h", synth_config.h, "Feature height");
    synth->add_option("--w", synth_config.w, "Feature width");
    synth->add_option("--d", synth_config.d, "Descriptor dimension");
    synth->add_option("--seed", synth_config.seed, "Random seed");
    synth->add_option("--mean-scale", synth_config.mean_scale, "Category mean range");
    synth->add_option("--sigma-lo", synth_config.sigma_lo, "Per-dimension sigma lower bound");
    synth->add_option("--sigma-hi", synth_config.sigma_hi, "Per-dimension sigma upper bound");
    synth->add_option("--query-out", synth_query_out,
                      "Also write a query corpus drawn from the same categories");
    synth->add_option("--queries-per-category", queries_per_category,
                      "Query images per category (with --query-out)");

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train an encoder model on a feature file");
    RunConfig train_config;
    std::string train_in, train_model_out;
    train->add_option("--encoder", train_config.encoder,
                      "raw | fisher | sparse | tsvd | mpca | lowrank")
        ->required();
    train->add_option("--in", train_in, "Training feature file")->required();
    train->add_option("--model", train_model_out, "Output model file")->required();
    add_encoder_options(train, train_config);

    // ---- encode ----
    auto* encode = app.add_subcommand("encode", "Encode a feature file with a trained model");
    std::string encode_model, encode_in, encode_out;
    encode->add_option("--model", encode_model, "Model file")->required();
    encode->add_option("--in", encode_in, "Feature file")->required();
    encode->add_option("--out", encode_out, "Output signature file")->required();

    // ---- index ----
    auto* index_cmd = app.add_subcommand("index", "Validate signatures and write an index");
    std::string index_in, index_out;
    index_cmd->add_option("--in", index_in, "Signature file")->required();
    index_cmd->add_option("--out", index_out, "Output index file")->required();

    // ---- query ----
    auto* query_cmd = app.add_subcommand("query", "Rank index entries against a query image");
    std::string query_index, query_model, query_image;
    std::size_t query_image_index = 0, query_top = 10;
    bool query_exclude_self = false;
    query_cmd->add_option("--index", query_index, "Index file")->required();
    query_cmd->add_option("--model", query_model, "Model file used to encode the query")
        ->required();
    query_cmd->add_option("--image", query_image, "Feature file holding the query image")
        ->required();
    query_cmd->add_option("--image-index", query_image_index, "Image position in the file");
    query_cmd->add_option("--top", query_top, "Number of results");
    query_cmd->add_flag("--exclude-self", query_exclude_self,
                        "Drop the candidate with the query's id");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "Train, encode, index, and evaluate MAP@k");
    RunConfig eval_config;
    std::string eval_train, eval_queries, eval_out, eval_save_models;
    eval->add_option("--train", eval_train, "Database/training feature file")->required();
    eval->add_option("--queries", eval_queries, "Query feature file")->required();
    eval->add_option("--encoder", eval_config.encoder,
                     "raw | fisher | sparse | tsvd | mpca | lowrank | all");
    eval->add_option("--k", eval_config.k_list, "MAP cutoffs")->delimiter(',');
    eval->add_option("--out", eval_out, "Write the report here as well as stdout");
    eval->add_option("--save-models", eval_save_models, "Directory for trained models");
    eval->add_flag("--timings", eval_config.collect_timings,
                   "Measure stage timings (median of --timing-reps runs); timing lines are "
                   "measurements and vary run to run");
    eval->add_option("--timing-reps", eval_config.timing_reps, "Repetitions per timed stage");
    eval->add_flag("--exclude-self", eval_config.exclude_self,
                   "Leave-one-out: drop each query's own id from its candidates");
    std::string ap_norm = "topk";
    eval->add_option("--ap-norm", ap_norm, "AP@k normalization: topk | minktotal");
    add_encoder_options(eval, eval_config);

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "Print the table rows of saved reports");
    std::vector<std::string> report_in;
    report_cmd->add_option("--in", report_in, "Report file(s)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    if (synth->parsed()) {
        const Corpus corpus = synth_corpus(synth_config);
        write_feature_file(corpus, synth_out);
        std::cout << "wrote " << corpus.image_count() << " images (" << synth_config.h << "x"
                  << synth_config.w << "x" << synth_config.d << ", "
                  << synth_config.categories << " categories) to " << synth_out << "\n";
        if (!synth_query_out.empty()) {
            const Corpus queries = synth_queries(synth_config, queries_per_category);
            write_feature_file(queries, synth_query_out);
            std::cout << "wrote " << queries.image_count() << " query images to "
                      << synth_query_out << "\n";
        }
        return 0;
    }

    if (train->parsed()) {
        const Corpus corpus = read_feature_file(train_in);
        const EncoderModel model = train_encoder(train_config, corpus);
        save_model(model, train_model_out);
        std::cout << "trained " << encoder_tag(model) << " model on " << corpus.image_count()
                  << " images -> " << train_model_out << "\n";
        return 0;
    }

    if (encode->parsed()) {
        const EncoderModel model = load_model(encode_model);
        const Corpus corpus = read_feature_file(encode_in);
        SignatureFile sigs;
        sigs.encoder_tag = encoder_tag(model);
        sigs.label_names = corpus.label_names;
        sigs.signatures = encode_corpus(model, corpus);
        save_signatures(sigs, encode_out);
        std::cout << "encoded " << sigs.signatures.size() << " images ("
                  << (sigs.signatures.empty() ? 0 : sigs.signatures.front().values.size())
                  << "-dim " << sigs.encoder_tag << ") -> " << encode_out << "\n";
        return 0;
    }

    if (index_cmd->parsed()) {
        SignatureFile sigs = load_signatures(index_in);
        build_index(sigs.signatures, sigs.encoder_tag);  // validates
        save_signatures(sigs, index_out);
        std::cout << "indexed " << sigs.signatures.size() << " signatures -> " << index_out
                  << "\n";
        return 0;
    }

    if (query_cmd->parsed()) {
        const SignatureFile sigs = load_signatures(query_index);
        const EncodedIndex index = build_index(sigs.signatures, sigs.encoder_tag);
        const EncoderModel model = load_model(query_model);
        const Corpus corpus = read_feature_file(query_image);
        if (query_image_index >= corpus.image_count())
            throw std::invalid_argument("--image-index out of range");
        Vector values = encode_image(model, corpus.images[query_image_index]);
        const double norm = values.norm();
        if (norm > 0.0) values /= norm;
        Signature q{std::move(values), corpus.ids[query_image_index],
                    corpus.labels[query_image_index]};
        QueryOptions opts;
        opts.exclude_self = query_exclude_self;
        const RankedResult ranked = query(index, q, query_top, opts);
        for (std::size_t i = 0; i < ranked.hits.size(); ++i) {
            const Signature& hit = index.item(ranked.hits[i].index);
            char dist[32];
            std::snprintf(dist, sizeof(dist), "%.6f", ranked.hits[i].distance);
            std::cout << (i + 1) << " " << hit.item_id << " " << dist << " "
                      << label_name_of(sigs, hit.label) << "\n";
        }
        return 0;
    }

    if (eval->parsed()) {
        eval_config.ap_norm = ap_norm;
        const EvalReport report =
            run_pipeline(eval_config, eval_train, eval_queries, eval_save_models);
        const std::string text = report.render();
        std::cout << text;
        if (!eval_out.empty()) {
            std::ofstream out(eval_out, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open '" + eval_out + "' for writing");
            out << text;
        }
        return 0;
    }

    // report
    for (const std::string& path : report_in) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open report '" + path + "'");
        std::string line;
        while (std::getline(in, line))
            if (line.rfind("table", 0) == 0) std::cout << line << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tenc
