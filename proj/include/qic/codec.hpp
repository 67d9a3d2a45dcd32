#pragma once

// QIC1 compressed-image format. All integers little-endian.
//
//   offset  size  field
//   0       4     magic "QIC1"
//   4       2     u16 version (= 1)
//   6       4     u32 original height
//   10      4     u32 original width
//   14      2     u16 block size k
//   16      1     u8  qubit count n (= 2 ceil(log2 k))
//   17      2     u16 layer count L
//   19      1     u8  ansatz id (rotation sequence, see ansatz.hpp)
//   20      1     u8  flags (bit 0: produced by fast mode)
//   21      ...   N*M block records in raster order:
//                   u8  origin tag
//                   f64 scale (L2 norm of the block)
//                   m * f64 angles in [0, 2pi), present only when scale > 0
//
// m = 3nL is implied by the header.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qic/ansatz.hpp"
#include "qic/error.hpp"
#include "qic/pipeline.hpp"
#include "qic/statevec.hpp"
#include "qic/transfer.hpp"

namespace qic {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 21;
inline constexpr std::uint8_t kFlagFastMode = 0x01;

struct StoredBlock {
    Origin origin{Origin::Zero};
    double scale{0.0};
    ParamVector theta; // empty when scale == 0

    friend bool operator==(const StoredBlock &, const StoredBlock &) = default;
};

struct CompressedImage {
    GridShape grid;
    AnsatzConfig config;
    std::uint8_t flags{0};
    std::vector<StoredBlock> blocks;

    friend bool operator==(const CompressedImage &, const CompressedImage &) = default;
};

/// Packs pipeline output for storage; angles are wrapped to [0, 2pi).
[[nodiscard]] inline CompressedImage make_compressed(const GridShape &grid,
                                                     const AnsatzConfig &config,
                                                     const std::vector<BlockRecord> &records,
                                                     std::uint8_t flags = 0) {
    CompressedImage img{grid, config, flags, {}};
    img.blocks.reserve(records.size());
    for (const auto &r : records) {
        StoredBlock b{r.origin, r.scale, {}};
        if (r.scale > 0.0) {
            b.theta.reserve(r.theta.size());
            for (double a : r.theta) {
                b.theta.push_back(wrap_angle(a));
            }
        }
        img.blocks.push_back(std::move(b));
    }
    return img;
}

[[nodiscard]] inline CompressedImage make_compressed(const CompressionRun &run,
                                                     Mode mode) {
    return make_compressed(run.grid, run.config, run.records,
                           mode == Mode::Fast ? kFlagFastMode : std::uint8_t{0});
}

namespace detail {

class ByteWriter {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put_le(v, 2); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(const char *s, std::size_t len) { out_.insert(out_.end(), s, s + len); }

    [[nodiscard]] std::vector<std::uint8_t> take() { return std::move(out_); }

  private:
    void put_le(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> out_;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    double f64() { return std::bit_cast<double>(get_le(8)); }

    [[nodiscard]] std::size_t pos() const noexcept { return pos_; }
    [[nodiscard]] bool done() const noexcept { return pos_ == in_.size(); }

  private:
    std::uint64_t get_le(std::size_t bytes) {
        if (in_.size() - pos_ < bytes) {
            throw FormatError("truncated stream: need " + std::to_string(bytes) +
                                  " more bytes",
                              pos_);
        }
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < bytes; ++i) {
            v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        }
        pos_ += bytes;
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_{0};
};

} // namespace detail

[[nodiscard]] inline std::vector<std::uint8_t> encode(const CompressedImage &img) {
    const auto &g = img.grid;
    const auto &cfg = img.config;
    validate(cfg);
    if (g.n != cfg.n || g.n != qubits_for_block(g.k)) {
        throw UsageError("grid and ansatz qubit counts disagree");
    }
    if (plan_grid(g.height, g.width, g.k) != g) {
        throw UsageError("grid shape is inconsistent with its dimensions");
    }
    if (img.blocks.size() != g.num_blocks()) {
        throw UsageError("expected " + std::to_string(g.num_blocks()) + " blocks, got " +
                         std::to_string(img.blocks.size()));
    }
    if (g.height > 0xFFFFFFFFu || g.width > 0xFFFFFFFFu || g.k > 0xFFFF ||
        cfg.layers > 0xFFFF) {
        throw UsageError("header field out of range");
    }
    if ((img.flags & ~kFlagFastMode) != 0) {
        throw UsageError("unknown flag bits");
    }
    const std::size_t m = param_count(cfg);

    detail::ByteWriter w;
    w.raw("QIC1", 4);
    w.u16(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(g.height));
    w.u32(static_cast<std::uint32_t>(g.width));
    w.u16(static_cast<std::uint16_t>(g.k));
    w.u8(static_cast<std::uint8_t>(g.n));
    w.u16(static_cast<std::uint16_t>(cfg.layers));
    w.u8(ansatz_id(cfg.rotations));
    w.u8(img.flags);
    for (const auto &b : img.blocks) {
        if (!(b.scale >= 0.0) || !std::isfinite(b.scale)) {
            throw UsageError("block scale must be finite and non-negative");
        }
        if ((b.scale == 0.0) != (b.origin == Origin::Zero)) {
            throw UsageError("scale 0 must coincide with the ZERO origin");
        }
        w.u8(static_cast<std::uint8_t>(b.origin));
        w.f64(b.scale);
        if (b.scale > 0.0) {
            if (b.theta.size() != m) {
                throw UsageError("block carries " + std::to_string(b.theta.size()) +
                                 " angles, header implies " + std::to_string(m));
            }
            for (double a : b.theta) {
                w.f64(wrap_angle(a));
            }
        }
    }
    return w.take();
}

[[nodiscard]] inline CompressedImage decode(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    static constexpr char magic[4] = {'Q', 'I', 'C', '1'};
    for (char c : magic) {
        const std::size_t at = r.pos();
        if (r.u8() != static_cast<std::uint8_t>(c)) {
            throw FormatError("bad magic, not a QIC1 stream", at);
        }
    }
    const std::size_t version_at = r.pos();
    const std::uint16_t version = r.u16();
    if (version != kFormatVersion) {
        throw FormatError("unsupported format version " + std::to_string(version),
                          version_at);
    }
    const std::size_t dims_at = r.pos();
    const std::uint32_t height = r.u32();
    const std::uint32_t width = r.u32();
    const std::uint16_t k = r.u16();
    const std::size_t n_at = r.pos();
    const std::uint8_t n = r.u8();
    const std::uint16_t layers = r.u16();
    const std::size_t id_at = r.pos();
    const std::uint8_t id = r.u8();
    const std::size_t flags_at = r.pos();
    const std::uint8_t flags = r.u8();

    CompressedImage img;
    try {
        img.grid = plan_grid(height, width, k);
    } catch (const ConfigError &e) {
        throw FormatError(std::string("invalid header geometry: ") + e.what(), dims_at);
    }
    if (img.grid.n != n) {
        throw FormatError("qubit count does not match block size", n_at);
    }
    if (id >= 27) {
        throw FormatError("unknown ansatz id " + std::to_string(id), id_at);
    }
    if ((flags & ~kFlagFastMode) != 0) {
        throw FormatError("unknown flag bits", flags_at);
    }
    if (layers < 1) {
        throw FormatError("layer count must be positive", n_at + 1);
    }
    img.config = AnsatzConfig{n, layers, rotations_from_id(id)};
    img.flags = flags;
    const std::size_t m = param_count(img.config);

    img.blocks.reserve(img.grid.num_blocks());
    for (std::size_t b = 0; b < img.grid.num_blocks(); ++b) {
        const std::size_t tag_at = r.pos();
        const std::uint8_t tag = r.u8();
        if (tag > static_cast<std::uint8_t>(Origin::Estimated)) {
            throw FormatError("unknown origin tag " + std::to_string(tag), tag_at);
        }
        StoredBlock sb{static_cast<Origin>(tag), 0.0, {}};
        const std::size_t scale_at = r.pos();
        sb.scale = r.f64();
        if (!(sb.scale >= 0.0) || !std::isfinite(sb.scale)) {
            throw FormatError("invalid block scale", scale_at);
        }
        if ((sb.scale == 0.0) != (sb.origin == Origin::Zero)) {
            throw FormatError("scale 0 must coincide with the ZERO origin", tag_at);
        }
        if (sb.scale > 0.0) {
            sb.theta.resize(m);
            for (auto &a : sb.theta) {
                a = r.f64();
            }
        }
        img.blocks.push_back(std::move(sb));
    }
    if (!r.done()) {
        throw FormatError("trailing bytes after last block", r.pos());
    }
    return img;
}

/// Rebuilds one k x k block (unrounded, clamped to [0, 255]).
[[nodiscard]] inline std::vector<double> reconstruct_block(const StoredBlock &block,
                                                           const AnsatzConfig &config,
                                                           std::size_t k) {
    std::vector<double> out(k * k, 0.0);
    if (block.scale == 0.0) {
        return out;
    }
    const auto gates = build_ansatz(config);
    const QuantumState psi = run_circuit(gates, block.theta, config.n);
    if (psi.dim() != k * k) {
        throw UsageError("ansatz dimension does not match block size");
    }
    // Rotate the global phase so the dominant amplitude is real and positive.
    std::size_t dominant = 0;
    for (std::size_t i = 1; i < psi.dim(); ++i) {
        if (std::abs(psi[i]) > std::abs(psi[dominant])) {
            dominant = i;
        }
    }
    const Complex phase = std::polar(1.0, -std::arg(psi[dominant]));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp((psi[i] * phase).real() * block.scale, 0.0, 255.0);
    }
    return out;
}

[[nodiscard]] inline GrayImage decompress_image(const CompressedImage &img) {
    std::vector<std::vector<double>> blocks;
    blocks.reserve(img.blocks.size());
    for (const auto &b : img.blocks) {
        blocks.push_back(reconstruct_block(b, img.config, img.grid.k));
    }
    GrayImage out = assemble_blocks(blocks, img.grid);
    for (auto &p : out.pixels) {
        p = std::clamp(std::round(p), 0.0, 255.0);
    }
    return out;
}

/// Stored real numbers per original pixel: N*M*(m'nL + 1) / (I_N * I_M).
[[nodiscard]] inline double compression_ratio(const GridShape &grid,
                                              const AnsatzConfig &config) {
    const double per_block = static_cast<double>(param_count(config)) + 1.0;
    return static_cast<double>(grid.num_blocks()) * per_block /
           (static_cast<double>(grid.height) * static_cast<double>(grid.width));
}

/// Encoded bytes per 8-bit original pixel.
[[nodiscard]] inline double byte_ratio(std::size_t encoded_bytes, const GridShape &grid) {
    return static_cast<double>(encoded_bytes) /
           (static_cast<double>(grid.height) * static_cast<double>(grid.width));
}

} // namespace qic
