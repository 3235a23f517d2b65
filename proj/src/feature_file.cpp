#include "tenc/feature_file.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tenc {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'N', 'C'};
constexpr std::uint16_t kVersion = 1;

[[noreturn]] void fail_at(const std::string& path, std::uint64_t offset, const std::string& what) {
    throw std::runtime_error("feature file '" + path + "': " + what + " at byte offset " +
                             std::to_string(offset));
}

class Reader {
public:
    Reader(std::ifstream& in, const std::string& path) : in_(in), path_(path) {}

    void read_bytes(void* dst, std::size_t n, const std::string& what) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            fail_at(path_, offset_, "truncated while reading " + what);
        offset_ += n;
    }

    std::uint16_t read_u16(const std::string& what) {
        unsigned char b[2];
        read_bytes(b, 2, what);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t read_u32(const std::string& what) {
        unsigned char b[4];
        read_bytes(b, 4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

private:
    std::ifstream& in_;
    std::string path_;
    std::uint64_t offset_ = 0;
};

void write_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

void Corpus::assign_default_ids() {
    ids.resize(images.size());
    char buf[16];
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "img%06zu", i);
        ids[i] = buf;
    }
}

void Corpus::validate() const {
    if (images.size() != labels.size())
        throw std::invalid_argument("corpus: one label per image required");
    for (const DenseTensor& t : images)
        if (t.dims() != std::vector<std::size_t>{h, w, d})
            throw std::invalid_argument("corpus: image extents inconsistent with header");
    for (std::uint32_t l : labels)
        if (l >= label_names.size())
            throw std::invalid_argument("corpus: label id outside the label table");
}

void write_feature_file(const Corpus& corpus, const std::string& path) {
    corpus.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    out.write(kMagic, 4);
    write_u16(out, kVersion);
    write_u16(out, 0);
    write_u32(out, static_cast<std::uint32_t>(corpus.h));
    write_u32(out, static_cast<std::uint32_t>(corpus.w));
    write_u32(out, static_cast<std::uint32_t>(corpus.d));
    write_u32(out, static_cast<std::uint32_t>(corpus.images.size()));
    write_u32(out, static_cast<std::uint32_t>(corpus.label_names.size()));
    for (const std::string& name : corpus.label_names) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (std::uint32_t l : corpus.labels) write_u32(out, l);
    // IEEE-754 doubles, little-endian; this build targets little-endian hosts.
    for (const DenseTensor& t : corpus.images)
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Corpus read_feature_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open feature file '" + path + "'");
    Reader r(in, path);

    char magic[4];
    r.read_bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) fail_at(path, 0, "bad magic (expected \"TENC\")");
    const std::uint16_t version = r.read_u16("version");
    if (version != kVersion)
        fail_at(path, 4, "unsupported version " + std::to_string(version));
    r.read_u16("reserved");

    Corpus corpus;
    corpus.h = r.read_u32("H");
    corpus.w = r.read_u32("W");
    corpus.d = r.read_u32("D");
    const std::uint32_t m = r.read_u32("M");
    if (corpus.h == 0 || corpus.w == 0 || corpus.d == 0)
        fail_at(path, 8, "zero extent in header");

    const std::uint32_t label_count = r.read_u32("label count");
    corpus.label_names.resize(label_count);
    for (std::uint32_t i = 0; i < label_count; ++i) {
        const std::uint32_t len = r.read_u32("label name length");
        corpus.label_names[i].resize(len);
        if (len) r.read_bytes(corpus.label_names[i].data(), len, "label name");
    }
    corpus.labels.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        const std::uint64_t off = r.offset();
        corpus.labels[i] = r.read_u32("label id");
        if (corpus.labels[i] >= label_count)
            fail_at(path, off, "label id " + std::to_string(corpus.labels[i]) +
                                   " outside table of size " + std::to_string(label_count));
    }

    const std::size_t per_image = corpus.h * corpus.w * corpus.d;
    corpus.images.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::vector<double> data(per_image);
        r.read_bytes(data.data(), per_image * sizeof(double),
                     "payload of image " + std::to_string(i));
        corpus.images.emplace_back(std::vector<std::size_t>{corpus.h, corpus.w, corpus.d},
                                   std::move(data));
    }
    // Trailing garbage would make round-trips ambiguous.
    char probe;
    in.read(&probe, 1);
    if (in.gcount() != 0) fail_at(path, r.offset(), "unexpected trailing bytes");

    corpus.assign_default_ids();
    corpus.validate();
    return corpus;
}

}  // namespace tenc
