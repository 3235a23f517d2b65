#pragma once

#include "tenc/descriptors.hpp"
#include "tenc/gmm.hpp"

namespace tenc {

/// Image signature built from the mixture's mean and variance score blocks,
/// length 2*K*D. `normalized` is false only for the all-zero degenerate case.
struct FisherVector {
    Vector values;
    bool normalized = false;
};

struct FisherOptions {
    bool weighted_posterior = false;  // posterior form used for the soft assignments
    bool l2_normalize = true;         // false exposes the raw score blocks
};

/// Encodes a descriptor set against a trained mixture: per component k and
/// dimension j the mean block accumulates q_ik (t_ji - mu_jk) / sigma_jk
/// scaled by 1/(N sqrt(w_k)) and the variance block accumulates
/// q_ik [((t_ji - mu_jk)/sigma_jk)^2 - 1] scaled by 1/(N sqrt(2 w_k)),
/// mean blocks first, then variance blocks, followed by l2 normalization.
FisherVector fisher_encode(const GmmModel& model, const DescriptorSet& image,
                           const FisherOptions& options = {});

}  // namespace tenc
