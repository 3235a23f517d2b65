#pragma once

#include "tenc/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenc {

/// In-memory corpus of feature tensors with category labels.
///
/// File format (magic "TENC", version 1, all integers little-endian):
///   offset 0   4 bytes  magic "TENC"
///          4   u16      version (1)
///          6   u16      reserved (0)
///          8   u32 H, u32 W, u32 D, u32 M
///         24   u32 L                      label-name count
///              L x { u32 len, len bytes } label names, UTF-8
///              M x u32                    per-image label ids (< L)
///              M*H*W*D f64                payload, image-major; inside an
///                                         image element (h,w,d) lives at
///                                         h + H*(w + W*d)
struct Corpus {
    std::size_t h = 0, w = 0, d = 0;
    std::vector<DenseTensor> images;          // each H x W x D
    std::vector<std::uint32_t> labels;        // one per image
    std::vector<std::string> label_names;
    std::vector<std::string> ids;             // "img%06u", assigned on load/build

    std::size_t image_count() const { return images.size(); }
    void assign_default_ids();
    void validate() const;
};

void write_feature_file(const Corpus& corpus, const std::string& path);
Corpus read_feature_file(const std::string& path);

}  // namespace tenc
