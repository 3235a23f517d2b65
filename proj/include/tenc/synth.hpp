#pragma once

#include "tenc/feature_file.hpp"

#include <cstdint>

namespace tenc {

struct SynthConfig {
    std::size_t categories = 47;
    std::size_t per_category = 80;
    std::size_t h = 8, w = 8, d = 64;
    std::uint64_t seed = 1;
    // Category Gaussians: means uniform in [-mean_scale, mean_scale] per
    // dimension, per-dimension std-devs uniform in [sigma_lo, sigma_hi].
    double mean_scale = 1.0;
    double sigma_lo = 0.75;
    double sigma_hi = 1.25;
};

/// Synthetic corpus: each category is a distinct diagonal-covariance
/// Gaussian over R^d; descriptors are drawn i.i.d. per spatial position.
/// Deterministic given the seed.
Corpus synth_corpus(const SynthConfig& config);

/// Companion query set drawn from the same category Gaussians as
/// synth_corpus(config) but from an independent sample stream. per_category
/// here is the number of query images per category.
Corpus synth_queries(const SynthConfig& config, std::size_t per_category);

}  // namespace tenc
