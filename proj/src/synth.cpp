#include "tenc/synth.hpp"

#include "tenc/rng.hpp"

#include <cstdio>
#include <stdexcept>

namespace tenc {

namespace {

struct CategoryGaussians {
    Matrix means;   // categories x d
    Matrix sigmas;  // categories x d
};

// Category parameters are a pure function of (seed, categories, d), so a
// database file and a query file generated from the same config share them.
CategoryGaussians category_params(const SynthConfig& config) {
    Rng rng(config.seed);
    Rng param_rng = rng.child(0x636174);  // category-parameter stream
    CategoryGaussians g;
    g.means.resize(static_cast<Eigen::Index>(config.categories),
                   static_cast<Eigen::Index>(config.d));
    g.sigmas.resize(static_cast<Eigen::Index>(config.categories),
                    static_cast<Eigen::Index>(config.d));
    for (Eigen::Index c = 0; c < g.means.rows(); ++c)
        for (Eigen::Index j = 0; j < g.means.cols(); ++j) {
            g.means(c, j) = param_rng.uniform(-config.mean_scale, config.mean_scale);
            g.sigmas(c, j) = param_rng.uniform(config.sigma_lo, config.sigma_hi);
        }
    return g;
}

Corpus sample_corpus(const SynthConfig& config, std::size_t per_category,
                     std::uint64_t stream_tag) {
    if (config.categories == 0 || per_category == 0 || config.h == 0 || config.w == 0 ||
        config.d == 0)
        throw std::invalid_argument("synth_corpus: all counts and extents must be positive");

    const CategoryGaussians g = category_params(config);
    Rng rng(config.seed);
    Rng sample_rng = rng.child(stream_tag);

    Corpus corpus;
    corpus.h = config.h;
    corpus.w = config.w;
    corpus.d = config.d;
    corpus.label_names.resize(config.categories);
    for (std::size_t c = 0; c < config.categories; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "cat%03zu", c);
        corpus.label_names[c] = buf;
    }

    const std::size_t pixels = config.h * config.w;
    for (std::size_t c = 0; c < config.categories; ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        for (std::size_t i = 0; i < per_category; ++i) {
            DenseTensor img({config.h, config.w, config.d});
            for (std::size_t j = 0; j < config.d; ++j)
                for (std::size_t p = 0; p < pixels; ++p)
                    img[p + pixels * j] = sample_rng.normal(
                        g.means(ci, static_cast<Eigen::Index>(j)),
                        g.sigmas(ci, static_cast<Eigen::Index>(j)));
            corpus.images.push_back(std::move(img));
            corpus.labels.push_back(static_cast<std::uint32_t>(c));
        }
    }
    corpus.assign_default_ids();
    return corpus;
}

}  // namespace

Corpus synth_corpus(const SynthConfig& config) {
    return sample_corpus(config, config.per_category, 0x6462);  // database stream
}

Corpus synth_queries(const SynthConfig& config, std::size_t per_category) {
    return sample_corpus(config, per_category, 0x7172);  // query stream
}

}  // namespace tenc
