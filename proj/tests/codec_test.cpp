#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include "golden_fixtures.hpp"
#include "qic/codec.hpp"
#include "qic/image_io.hpp"
#include "test_util.hpp"

using namespace qic;
namespace qt = qic::testing;

namespace {

std::string golden_path(const std::string &file) {
    return std::string(QIC_GOLDEN_DIR) + "/" + file;
}

CompressedImage sample_image() {
    return qt::golden_cases().front().image;
}

} // namespace

TEST(Encode, LayoutSizes) {
    const AnsatzConfig cfg{2, 2, kZXZ};
    const auto grid = plan_grid(8, 8, 2);
    std::vector<BlockRecord> recs(16, {ones_params(cfg), 10.0, 1e-4, Origin::ColdCompiled, 1, 1});
    EXPECT_EQ(encode(make_compressed(grid, cfg, recs)).size(), kHeaderSize + 16 * (1 + 8 + 8 * 12));

    std::vector<BlockRecord> zeros(16, {ones_params(cfg), 0.0, 0.0, Origin::Zero, 0, 0});
    EXPECT_EQ(encode(make_compressed(grid, cfg, zeros)).size(), kHeaderSize + 16 * 9);
}

TEST(Encode, HeaderFieldsLittleEndian) {
    const auto bytes = encode(sample_image());
    ASSERT_GE(bytes.size(), kHeaderSize);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "QIC1");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[5], 0);
    EXPECT_EQ(bytes[6], 3); // height
    EXPECT_EQ(bytes[10], 5); // width
    EXPECT_EQ(bytes[14], 2); // k
    EXPECT_EQ(bytes[16], 2); // n
    EXPECT_EQ(bytes[17], 2); // L
    EXPECT_EQ(bytes[19], 20); // ZXZ
    EXPECT_EQ(bytes[20], kFlagFastMode);
    EXPECT_EQ(bytes[21], static_cast<std::uint8_t>(Origin::ColdCompiled));
}

TEST(Encode, RejectsInconsistentImages) {
    auto img = sample_image();
    img.blocks.pop_back();
    EXPECT_THROW((void)encode(img), UsageError);

    img = sample_image();
    img.blocks[0].theta.pop_back();
    EXPECT_THROW((void)encode(img), UsageError);

    img = sample_image();
    img.blocks[0].scale = 0.0; // non-ZERO origin with zero scale
    EXPECT_THROW((void)encode(img), UsageError);

    img = sample_image();
    img.config.n = 4;
    EXPECT_THROW((void)encode(img), UsageError);
}

TEST(Decode, RoundTripsFixtures) {
    for (const auto &c : qt::golden_cases()) {
        const auto bytes = encode(c.image);
        EXPECT_EQ(decode(bytes), c.image) << c.file;
        EXPECT_EQ(encode(decode(bytes)), bytes) << c.file;
    }
}

TEST(Decode, StoredAnglesAreWrapped) {
    for (const auto &b : decode(encode(sample_image())).blocks) {
        for (double a : b.theta) {
            EXPECT_GE(a, 0.0);
            EXPECT_LT(a, 2.0 * std::numbers::pi);
        }
    }
}

TEST(Decode, EveryTruncationIsAFormatError) {
    const auto bytes = encode(sample_image());
    for (std::size_t len = 0; len < bytes.size(); ++len) {
        const std::span<const std::uint8_t> prefix(bytes.data(), len);
        try {
            (void)decode(prefix);
            ADD_FAILURE() << "accepted truncated stream of length " << len;
        } catch (const FormatError &e) {
            EXPECT_LE(e.offset(), len);
        }
    }
}

TEST(Decode, BadMagicReportsOffset) {
    auto bytes = encode(sample_image());
    bytes[2] = 'X';
    try {
        (void)decode(bytes);
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_EQ(e.offset(), 2u);
    }
}

TEST(Decode, UnknownVersionReportsOffset) {
    auto bytes = encode(sample_image());
    bytes[4] = 2;
    try {
        (void)decode(bytes);
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_EQ(e.offset(), 4u);
    }
}

TEST(Decode, RejectsBadFields) {
    const auto good = encode(sample_image());
    auto bytes = good;
    bytes[14] = 3; // k
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes[16] = 3; // n
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes[19] = 27; // ansatz id
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes[20] = 0x02; // flags
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes[17] = 0; // L
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes[21] = 9; // origin tag
    EXPECT_THROW((void)decode(bytes), FormatError);
    bytes = good;
    bytes.push_back(0);
    try {
        (void)decode(bytes);
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_EQ(e.offset(), good.size());
    }
}

TEST(Golden, MatchesCheckedInBytes) {
    const bool regen = std::getenv("QIC_REGEN_GOLDEN") != nullptr;
    for (const auto &c : qt::golden_cases()) {
        const auto bytes = encode(c.image);
        if (regen) {
            detail::write_file(golden_path(c.file), bytes);
        }
        const auto stored = detail::read_file(golden_path(c.file));
        EXPECT_EQ(stored, bytes) << c.file;
        EXPECT_EQ(encode(decode(stored)), stored) << c.file;
    }
}

TEST(Reconstruct, ComputationalBasisState) {
    const AnsatzConfig cfg{2, 2, kZXZ};
    const StoredBlock b{Origin::ColdCompiled, 200.0, ParamVector(param_count(cfg), 0.0)};
    EXPECT_EQ(reconstruct_block(b, cfg, 2), (std::vector<double>{200, 0, 0, 0}));
}

TEST(Reconstruct, ZeroBlockIsBlack) {
    const AnsatzConfig cfg{2, 2, kZXZ};
    EXPECT_EQ(reconstruct_block({Origin::Zero, 0.0, {}}, cfg, 2), std::vector<double>(4, 0.0));
}

TEST(Reconstruct, GlobalPhaseIsRemoved) {
    // RZ(phi) on |0> only adds a phase.
    const AnsatzConfig cfg{2, 1, kZXZ};
    ParamVector theta(param_count(cfg), 0.0);
    theta[0] = 1.3;
    theta[2] = -0.4;
    const auto out = reconstruct_block({Origin::ColdCompiled, 50.0, theta}, cfg, 2);
    EXPECT_NEAR(out[0], 50.0, 1e-12);
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_NEAR(out[i], 0.0, 1e-12);
    }
}

TEST(Reconstruct, CompiledBlockWithinFidelityBound) {
    const AnsatzConfig cfg{2, 2, kZXZ};
    const CompileSettings s;
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> px(0, 255);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        Block block{{double(px(rng)), double(px(rng)), double(px(rng)), double(px(rng))}, 2, 1, 1};
        const auto bs = block_to_state(block);
        if (bs.is_zero()) {
            continue;
        }
        const auto r = compile(ones_params(cfg), *bs.state, cfg, s);
        if (r.final_cost >= s.tau) {
            continue;
        }
        ++checked;
        const auto out = reconstruct_block({Origin::ColdCompiled, bs.scale, r.theta_star}, cfg, 2);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_LE(std::abs(out[i] - block.pixels[i]), 2.0 * bs.scale * std::sqrt(s.tau));
        }
    }
    EXPECT_GE(checked, 20);
}

// Property: adding whole turns to any angle leaves the reconstruction unchanged.
TEST(CodecProperty, WrapInvariance) {
    const AnsatzConfig cfg{4, 2, kZXZ};
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> turns(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto theta = qt::random_params(rng, param_count(cfg));
        auto shifted = theta;
        for (auto &a : shifted) {
            a += 2.0 * std::numbers::pi * turns(rng);
        }
        const auto a = reconstruct_block({Origin::ColdCompiled, 700.0, theta}, cfg, 4);
        const auto b = reconstruct_block({Origin::ColdCompiled, 700.0, shifted}, cfg, 4);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a[i], b[i], 1e-9);
        }
    }
}

TEST(Decompress, ZeroImageIsBlack) {
    const auto c = qt::golden_cases().back();
    EXPECT_EQ(decompress_image(c.image), GrayImage(4, 4, 0.0));
}

TEST(Decompress, CropsPaddingAndRounds) {
    const auto out = decompress_image(sample_image());
    EXPECT_EQ(out.height, 3u);
    EXPECT_EQ(out.width, 5u);
    for (double p : out.pixels) {
        EXPECT_EQ(p, std::round(p));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 255.0);
    }
}

TEST(Decompress, UniformImageRoundTripIsClose) {
    const GrayImage img(8, 8, 120.0);
    CompressOptions o;
    const auto run = compress_image(img, o);
    const auto out = decompress_image(decode(encode(make_compressed(run, o.mode))));
    for (double p : out.pixels) {
        EXPECT_NEAR(p, 120.0, 240.0 * 2.0 * std::sqrt(o.settings.tau) + 0.5);
    }
}

TEST(Ratios, ParameterRatio) {
    EXPECT_DOUBLE_EQ(compression_ratio(plan_grid(256, 256, 16), {8, 8}), 193.0 / 256.0);
    EXPECT_GT(compression_ratio(plan_grid(64, 64, 8), {6, 6}), 1.0); // 109 per 64 pixels
    const double r16 = compression_ratio(plan_grid(256, 256, 16), {8, 8});
    const double r32 = compression_ratio(plan_grid(256, 256, 32), {10, 10});
    const double r64 = compression_ratio(plan_grid(256, 256, 64), {12, 12});
    EXPECT_GT(r16, r32);
    EXPECT_GT(r32, r64);
}

TEST(Ratios, ByteRatio) {
    const auto grid = plan_grid(8, 8, 2);
    EXPECT_DOUBLE_EQ(byte_ratio(21 + 16 * 9, grid), 165.0 / 64.0);
}
