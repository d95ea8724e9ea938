#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/features.hpp"
#include "wellsim/mlp.hpp"

namespace wellsim {

/// FNV-1a 64-bit hash; used as the checkpoint integrity checksum and for
/// config digests.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = 0xCBF29CE484222325ULL) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

struct Checkpoint {
    Architecture arch;
    ScalerStats scaler;
    ModelParams params;
};

// Binary checkpoint layout (all integers little-endian, doubles as IEEE-754
// bit patterns):
//   magic   "WSIMCKP1" (8 bytes)
//   u32     format version (currently 1)
//   u32     input width
//   u32     hidden layer count, then u32 per hidden width
//   u32     output width
//   u8      activation id (0 = relu)
//   u32     split index
//   u32     scaler length, then f64 means, f64 stds, u64 fitted_on
//   u32     dense layer count, then per layer:
//             u32 out_dim, u32 in_dim, f64 weights (row-major), f64 biases
//   u64     FNV-1a 64 checksum of everything above
namespace detail {

inline constexpr char kCkptMagic[8] = {'W', 'S', 'I', 'M', 'C', 'K', 'P', '1'};
inline constexpr std::uint32_t kCkptVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::string& buf, std::size_t limit) : buf_(buf), limit_(limit) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }

    void raw(char* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, buf_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > limit_) throw std::runtime_error("checkpoint truncated or corrupt");
    }

    const std::string& buf_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string checkpoint_to_bytes(const Checkpoint& ckpt) {
    ckpt.arch.validate();
    std::string out(detail::kCkptMagic, sizeof(detail::kCkptMagic));
    detail::put_u32(out, detail::kCkptVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(ckpt.arch.input));
    detail::put_u32(out, static_cast<std::uint32_t>(ckpt.arch.hidden.size()));
    for (int h : ckpt.arch.hidden) detail::put_u32(out, static_cast<std::uint32_t>(h));
    detail::put_u32(out, static_cast<std::uint32_t>(ckpt.arch.output));
    out.push_back(0);  // activation id: relu
    detail::put_u32(out, static_cast<std::uint32_t>(ckpt.arch.split_index));
    detail::put_u32(out, static_cast<std::uint32_t>(kFeatureCount));
    for (double m : ckpt.scaler.mean) detail::put_f64(out, m);
    for (double s : ckpt.scaler.std) detail::put_f64(out, s);
    detail::put_u64(out, static_cast<std::uint64_t>(ckpt.scaler.fitted_on));
    detail::put_u32(out, static_cast<std::uint32_t>(ckpt.params.layers.size()));
    for (const auto& l : ckpt.params.layers) {
        detail::put_u32(out, static_cast<std::uint32_t>(l.out_dim));
        detail::put_u32(out, static_cast<std::uint32_t>(l.in_dim));
        for (double w : l.w) detail::put_f64(out, w);
        for (double b : l.b) detail::put_f64(out, b);
    }
    detail::put_u64(out, fnv1a64(out.data(), out.size()));
    return out;
}

inline Checkpoint checkpoint_from_bytes(const std::string& buf,
                                        const std::optional<Architecture>& expected = {}) {
    if (buf.size() < sizeof(detail::kCkptMagic) + 12)
        throw std::runtime_error("checkpoint truncated or corrupt");
    const std::size_t payload = buf.size() - 8;
    detail::Reader r(buf, payload);

    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, detail::kCkptMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file (bad magic)");

    // verify the trailing checksum before trusting any length fields
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[payload + i]))
                  << (8 * i);
    if (fnv1a64(buf.data(), payload) != stored)
        throw std::runtime_error("checkpoint checksum mismatch");

    const std::uint32_t version = r.u32();
    if (version != detail::kCkptVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.arch.input = static_cast<int>(r.u32());
    const std::uint32_t n_hidden = r.u32();
    if (n_hidden > 1024) throw std::runtime_error("checkpoint corrupt (hidden count)");
    ckpt.arch.hidden.resize(n_hidden);
    for (auto& h : ckpt.arch.hidden) h = static_cast<int>(r.u32());
    ckpt.arch.output = static_cast<int>(r.u32());
    if (r.u8() != 0) throw std::runtime_error("unsupported activation id");
    ckpt.arch.split_index = static_cast<int>(r.u32());
    ckpt.arch.validate();

    const std::uint32_t n_features = r.u32();
    if (n_features != kFeatureCount)
        throw std::runtime_error("checkpoint scaler width mismatch");
    for (auto& m : ckpt.scaler.mean) m = r.f64();
    for (auto& s : ckpt.scaler.std) s = r.f64();
    ckpt.scaler.fitted_on = static_cast<std::size_t>(r.u64());

    const std::uint32_t n_layers = r.u32();
    if (n_layers != static_cast<std::uint32_t>(ckpt.arch.layer_count()))
        throw std::runtime_error("checkpoint layer count does not match architecture");
    const auto dims = ckpt.arch.layer_dims();
    for (std::uint32_t li = 0; li < n_layers; ++li) {
        DenseLayer l;
        l.out_dim = static_cast<int>(r.u32());
        l.in_dim = static_cast<int>(r.u32());
        if (l.out_dim != dims[li].first || l.in_dim != dims[li].second)
            throw std::runtime_error("checkpoint layer shape does not match architecture");
        l.w.resize(static_cast<std::size_t>(l.out_dim) * l.in_dim);
        for (auto& w : l.w) w = r.f64();
        l.b.resize(l.out_dim);
        for (auto& b : l.b) b = r.f64();
        ckpt.params.layers.push_back(std::move(l));
    }
    if (r.pos() != payload) throw std::runtime_error("checkpoint has trailing bytes");

    if (expected && !(ckpt.arch == *expected))
        throw std::runtime_error("checkpoint architecture does not match the expected one");
    return ckpt;
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    const std::string bytes = checkpoint_to_bytes(ckpt);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path,
                                  const std::optional<Architecture>& expected = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return checkpoint_from_bytes(buf, expected);
}

}  // namespace wellsim
