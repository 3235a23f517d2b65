#include "tenc/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tenc {

namespace {

constexpr std::uint16_t kModelVersion = 1;
constexpr std::uint16_t kIndexVersion = 1;

class BinWriter {
public:
    BinWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    void bytes(const void* src, std::size_t n) {
        out_.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(n));
    }
    void u16(std::uint16_t v) {
        unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
        bytes(b, 2);
    }
    void u32(std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
        bytes(b, 4);
    }
    void f64(double v) { bytes(&v, sizeof(double)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void doubles(const double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
    void matrix(const Matrix& m) {
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        doubles(m.data(), static_cast<std::size_t>(m.size()));
    }
    void vector(const Vector& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        doubles(v.data(), static_cast<std::size_t>(v.size()));
    }
    void tensor(const DenseTensor& t) {
        u32(static_cast<std::uint32_t>(t.order()));
        for (std::size_t d : t.dims()) u32(static_cast<std::uint32_t>(d));
        doubles(t.data(), t.size());
    }
    void check(const std::string& path) {
        if (!out_) throw std::runtime_error("write failed for '" + path + "'");
    }

private:
    std::ofstream out_;
};

class BinReader {
public:
    BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error("cannot open '" + path + "'");
    }
    void bytes(void* dst, std::size_t n) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw std::runtime_error("'" + path_ + "': truncated");
    }
    std::uint16_t u16() {
        unsigned char b[2];
        bytes(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    double f64() {
        double v;
        bytes(&v, sizeof(double));
        return v;
    }
    std::string str() {
        std::string s(u32(), '\0');
        if (!s.empty()) bytes(s.data(), s.size());
        return s;
    }
    Matrix matrix() {
        const std::uint32_t rows = u32(), cols = u32();
        Matrix m(rows, cols);
        bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
        return m;
    }
    Vector vector() {
        const std::uint32_t n = u32();
        Vector v(n);
        bytes(v.data(), n * sizeof(double));
        return v;
    }
    DenseTensor tensor() {
        const std::uint32_t order = u32();
        std::vector<std::size_t> dims(order);
        for (auto& d : dims) d = u32();
        std::size_t total = 1;
        for (std::size_t d : dims) total *= d;
        std::vector<double> data(total);
        bytes(data.data(), total * sizeof(double));
        return DenseTensor(std::move(dims), std::move(data));
    }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace

std::string encoder_tag(const EncoderModel& model) {
    struct Visitor {
        std::string operator()(const RawModel&) const { return "raw"; }
        std::string operator()(const FisherModel&) const { return "fisher"; }
        std::string operator()(const SparseModel&) const { return "sparse"; }
        std::string operator()(const TsvdModel&) const { return "tsvd"; }
        std::string operator()(const MpcaModel&) const { return "mpca"; }
        std::string operator()(const LowRankModel&) const { return "lowrank"; }
    };
    return std::visit(Visitor{}, model);
}

void save_model(const EncoderModel& model, const std::string& path) {
    BinWriter w(path);
    w.bytes("TMDL", 4);
    w.u16(kModelVersion);
    w.u16(0);
    w.str(encoder_tag(model));

    if (const auto* fisher = std::get_if<FisherModel>(&model)) {
        w.vector(fisher->gmm.weights);
        w.matrix(fisher->gmm.means);
        w.matrix(fisher->gmm.variances);
        w.u32(fisher->weighted_posterior ? 1 : 0);
    } else if (const auto* sparse = std::get_if<SparseModel>(&model)) {
        w.matrix(sparse->dictionary.atoms);
        w.u32(sparse->sparsity);
        w.f64(sparse->res_tol);
    } else if (const auto* tsvd_m = std::get_if<TsvdModel>(&model)) {
        w.tensor(tsvd_m->basis.u());
        w.tensor(tsvd_m->basis.s());
        w.tensor(tsvd_m->basis.v());
        w.tensor(tsvd_m->basis.mean());
        w.u32(tsvd_m->keep_rows);
    } else if (const auto* mpca_m = std::get_if<MpcaModel>(&model)) {
        w.u32(static_cast<std::uint32_t>(mpca_m->factors.size()));
        for (const Matrix& f : mpca_m->factors) w.matrix(f);
        w.tensor(mpca_m->mean);
        for (std::size_t d : mpca_m->subspace_dims) w.u32(static_cast<std::uint32_t>(d));
    } else if (const auto* lowrank = std::get_if<LowRankModel>(&model)) {
        w.u32(lowrank->r);
    }
    w.check(path);
}

EncoderModel load_model(const std::string& path) {
    BinReader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "TMDL", 4) != 0)
        throw std::runtime_error("'" + path + "': not a model file (bad magic)");
    if (r.u16() != kModelVersion)
        throw std::runtime_error("'" + path + "': unsupported model version");
    r.u16();
    const std::string tag = r.str();

    if (tag == "raw") return RawModel{};
    if (tag == "fisher") {
        FisherModel m;
        m.gmm.weights = r.vector();
        m.gmm.means = r.matrix();
        m.gmm.variances = r.matrix();
        m.weighted_posterior = r.u32() != 0;
        return m;
    }
    if (tag == "sparse") {
        SparseModel m;
        m.dictionary.atoms = r.matrix();
        m.sparsity = r.u32();
        m.res_tol = r.f64();
        return m;
    }
    if (tag == "tsvd") {
        TsvdFactors factors;
        factors.u = r.tensor();
        factors.s = r.tensor();
        factors.v = r.tensor();
        DenseTensor mean = r.tensor();
        TsvdModel m{TsvdBasis(std::move(factors), std::move(mean)), r.u32()};
        return m;
    }
    if (tag == "mpca") {
        MpcaModel m;
        m.factors.resize(r.u32());
        for (Matrix& f : m.factors) f = r.matrix();
        m.mean = r.tensor();
        m.subspace_dims.resize(m.factors.size());
        for (std::size_t& d : m.subspace_dims) d = r.u32();
        return m;
    }
    if (tag == "lowrank") {
        LowRankModel m;
        m.r = r.u32();
        return m;
    }
    throw std::runtime_error("'" + path + "': unknown encoder tag '" + tag + "'");
}

void save_signatures(const SignatureFile& sigs, const std::string& path) {
    BinWriter w(path);
    w.bytes("TIDX", 4);
    w.u16(kIndexVersion);
    w.u16(0);
    w.str(sigs.encoder_tag);
    const std::uint32_t dim =
        sigs.signatures.empty() ? 0
                                : static_cast<std::uint32_t>(sigs.signatures.front().values.size());
    w.u32(dim);
    w.u32(static_cast<std::uint32_t>(sigs.signatures.size()));
    w.u32(static_cast<std::uint32_t>(sigs.label_names.size()));
    for (const std::string& name : sigs.label_names) w.str(name);
    for (const Signature& s : sigs.signatures) {
        if (static_cast<std::uint32_t>(s.values.size()) != dim)
            throw std::invalid_argument("save_signatures: inconsistent dimensions");
        w.str(s.item_id);
        w.u32(s.label);
        w.doubles(s.values.data(), static_cast<std::size_t>(s.values.size()));
    }
    w.check(path);
}

SignatureFile load_signatures(const std::string& path) {
    BinReader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "TIDX", 4) != 0)
        throw std::runtime_error("'" + path + "': not a signature file (bad magic)");
    if (r.u16() != kIndexVersion)
        throw std::runtime_error("'" + path + "': unsupported signature-file version");
    r.u16();

    SignatureFile out;
    out.encoder_tag = r.str();
    const std::uint32_t dim = r.u32();
    const std::uint32_t count = r.u32();
    out.label_names.resize(r.u32());
    for (std::string& name : out.label_names) name = r.str();
    out.signatures.resize(count);
    for (Signature& s : out.signatures) {
        s.item_id = r.str();
        s.label = r.u32();
        s.values.resize(dim);
        r.bytes(s.values.data(), dim * sizeof(double));
    }
    return out;
}

}  // namespace tenc
