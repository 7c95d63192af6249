#include "svt/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "svt/errors.hpp"

namespace svt {

namespace {

constexpr char kMagic[8] = {'S', 'V', 'T', 'C', 'K', 'P', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

class Reader {
public:
    explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    void expect_magic() {
        if (bytes_.size() < sizeof kMagic ||
            std::memcmp(bytes_.data(), kMagic, sizeof kMagic) != 0)
            throw ParseError("not a checkpoint file (bad magic)");
        pos_ = sizeof kMagic;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size())
            throw ParseError("checkpoint file truncated");
    }
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ck) {
    std::vector<std::uint8_t> out(kMagic, kMagic + sizeof kMagic);
    put_u32(out, kVersion);
    put_u64(out, ck.seed);

    std::vector<std::uint32_t> dims;
    dims.push_back(static_cast<std::uint32_t>(ck.params.layers[0].weight.cols()));
    for (const auto& layer : ck.params.layers)
        dims.push_back(static_cast<std::uint32_t>(layer.weight.rows()));
    put_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (std::uint32_t d : dims) put_u32(out, d);

    for (const auto& layer : ck.params.layers) {
        for (double w : layer.weight.data()) put_f64(out, w);
        for (double b : layer.bias) put_f64(out, b);
    }
    return out;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    const auto bytes = serialize_checkpoint(ck);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write checkpoint '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open checkpoint '" + path.string() + "'");
    std::vector<std::uint8_t> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r(std::move(bytes));
    r.expect_magic();
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw ParseError("unsupported checkpoint version " +
                         std::to_string(version));

    Checkpoint ck;
    ck.seed = r.u64();
    const std::uint32_t ndims = r.u32();
    if (ndims < 2) throw ParseError("checkpoint has fewer than 2 layer dims");
    std::vector<std::uint32_t> dims(ndims);
    for (auto& d : dims) d = r.u32();

    for (std::size_t l = 1; l < dims.size(); ++l) {
        EmbedderParams::Layer layer;
        layer.weight = Matrix(dims[l], dims[l - 1]);
        for (double& w : layer.weight.data()) w = r.f64();
        layer.bias.resize(dims[l]);
        for (double& b : layer.bias) b = r.f64();
        ck.params.layers.push_back(std::move(layer));
    }
    if (!r.done()) throw ParseError("trailing bytes in checkpoint");
    return ck;
}

}  // namespace svt
