#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "qic/pipeline.hpp"
#include "test_util.hpp"

using namespace qic;

namespace {

GrayImage smooth_random_image(std::mt19937_64 &rng, std::size_t h, std::size_t w) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    const double a = 40 + 150 * d(rng), fx = 0.05 + 0.3 * d(rng), fy = 0.05 + 0.3 * d(rng);
    GrayImage img(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            img.at(r, c) = std::round(a + 60 * std::sin(fx * c) * std::cos(fy * r) + 10 * d(rng));
        }
    }
    return img;
}

CompressOptions options(Mode mode, std::size_t k = 2) {
    CompressOptions o;
    o.k = k;
    o.mode = mode;
    return o;
}

} // namespace

TEST(PlanGrid, ExactDivision) {
    const auto g = plan_grid(256, 256, 4);
    EXPECT_EQ(g.pad_rows, 0u);
    EXPECT_EQ(g.pad_cols, 0u);
    EXPECT_EQ(g.rows, 64u);
    EXPECT_EQ(g.cols, 64u);
    EXPECT_EQ(g.n, 4);
}

TEST(PlanGrid, PadsToNextMultiple) {
    const auto g = plan_grid(10, 10, 4);
    EXPECT_EQ(g.pad_rows, 2u);
    EXPECT_EQ(g.pad_cols, 2u);
    EXPECT_EQ(g.rows, 3u);
    EXPECT_EQ(g.cols, 3u);
    const auto r = plan_grid(5, 9, 2);
    EXPECT_EQ(r.rows, 3u);
    EXPECT_EQ(r.cols, 5u);
}

TEST(PlanGrid, SmallImageTwoByTwoBlocks) {
    const auto g = plan_grid(8, 8, 2);
    EXPECT_EQ(g.rows, 4u);
    EXPECT_EQ(g.cols, 4u);
    EXPECT_EQ(g.n, 2);
    EXPECT_EQ(plan_grid(64, 64, 16).n, 8);
    EXPECT_EQ(plan_grid(64, 64, 8).n, 6);
}

TEST(PlanGrid, RejectsBadBlockSizes) {
    EXPECT_THROW((void)plan_grid(8, 8, 3), ConfigError);
    EXPECT_THROW((void)plan_grid(8, 8, 1), ConfigError);
    EXPECT_THROW((void)plan_grid(8, 8, 0), ConfigError);
    EXPECT_THROW((void)plan_grid(0, 8, 2), ConfigError);
    EXPECT_THROW((void)plan_grid(512, 512, 128), ConfigError); // 14 qubits
}

TEST(SplitBlocks, UniformImage) {
    const GrayImage img(4, 4, 7.0);
    const auto blocks = split_blocks(img, plan_grid(4, 4, 2));
    ASSERT_EQ(blocks.size(), 4u);
    for (const auto &b : blocks) {
        EXPECT_EQ(b.pixels, std::vector<double>(4, 7.0));
    }
    EXPECT_EQ(blocks[1].row, 1u);
    EXPECT_EQ(blocks[1].col, 2u);
    EXPECT_EQ(blocks[2].row, 2u);
    EXPECT_EQ(blocks[2].col, 1u);
}

TEST(SplitBlocks, ZeroPaddingGoesBottomRight) {
    GrayImage img(3, 3, 5.0);
    const auto blocks = split_blocks(img, plan_grid(3, 3, 2));
    ASSERT_EQ(blocks.size(), 4u);
    EXPECT_EQ(blocks[0].pixels, (std::vector<double>{5, 5, 5, 5}));
    EXPECT_EQ(blocks[1].pixels, (std::vector<double>{5, 0, 5, 0}));
    EXPECT_EQ(blocks[2].pixels, (std::vector<double>{5, 5, 0, 0}));
    EXPECT_EQ(blocks[3].pixels, (std::vector<double>{5, 0, 0, 0}));
}

TEST(SplitBlocks, AssembleIsInverse) {
    std::mt19937_64 rng(31);
    for (auto [h, w, k] : {std::tuple{7u, 5u, 2u}, {8u, 8u, 4u}, {13u, 6u, 4u}}) {
        const auto img = smooth_random_image(rng, h, w);
        const auto grid = plan_grid(h, w, k);
        std::vector<std::vector<double>> raw;
        for (const auto &b : split_blocks(img, grid)) {
            raw.push_back(b.pixels);
        }
        EXPECT_EQ(assemble_blocks(raw, grid), img);
    }
}

TEST(BlockToState, ThreeFourFive) {
    const Block b{{3, 4, 0, 0}, 2, 1, 1};
    const auto s = block_to_state(b);
    ASSERT_FALSE(s.is_zero());
    EXPECT_DOUBLE_EQ(s.scale, 5.0);
    EXPECT_NEAR((*s.state)[0].real(), 0.6, 1e-15);
    EXPECT_NEAR((*s.state)[1].real(), 0.8, 1e-15);
    EXPECT_EQ((*s.state)[2], Complex{});
}

TEST(BlockToState, UniformAndZeroBlocks) {
    const auto u = block_to_state({{9, 9, 9, 9}, 2, 1, 1});
    EXPECT_DOUBLE_EQ(u.scale, 18.0);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR((*u.state)[i].real(), 0.5, 1e-15);
    }
    const auto z = block_to_state({{0, 0, 0, 0}, 2, 1, 1});
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z.scale, 0.0);
}

TEST(RunMetrics, AllReused) {
    std::vector<BlockRecord> recs(4, BlockRecord{{}, 1.0, 1e-4, Origin::Reused, 0, 1});
    const auto m = run_metrics(recs, 2);
    EXPECT_DOUBLE_EQ(m.transferred_percent, 100.0);
    EXPECT_DOUBLE_EQ(m.mean_iterations, 0.0);
    EXPECT_EQ(m.total_evaluations, 4);
    EXPECT_EQ(m.rows[3].row, 2u);
    EXPECT_EQ(m.rows[3].col, 2u);
}

TEST(RunMetrics, SingleColdBlock) {
    const std::vector<BlockRecord> recs{{{}, 1.0, 4e-4, Origin::ColdCompiled, 12, 301}};
    const auto m = run_metrics(recs);
    EXPECT_DOUBLE_EQ(m.mean_cost, 4e-4);
    EXPECT_DOUBLE_EQ(m.sum_cost, 4e-4);
    EXPECT_DOUBLE_EQ(m.mean_iterations, 12.0);
    EXPECT_DOUBLE_EQ(m.transferred_percent, 0.0);
}

TEST(RunMetrics, EmptyIsUsageError) {
    EXPECT_THROW((void)run_metrics({}), UsageError);
}

TEST(CompressImage, UniformImageFastModeReusesFirstBlock) {
    const GrayImage img(8, 8, 120.0);
    const auto run = compress_image(img, options(Mode::Fast));
    ASSERT_EQ(run.records.size(), 16u);
    EXPECT_EQ(run.records[0].origin, Origin::ColdCompiled);
    for (std::size_t b = 1; b < 16; ++b) {
        EXPECT_EQ(run.records[b].origin, Origin::Reused) << b;
        EXPECT_EQ(run.records[b].iterations, 0);
        EXPECT_EQ(run.records[b].theta, run.records[0].theta);
    }
    EXPECT_DOUBLE_EQ(run.metrics.transferred_percent, 93.75);
}

TEST(CompressImage, UniformImageNaiveModeIsDeterministicCold) {
    const GrayImage img(8, 8, 120.0);
    const auto run = compress_image(img, options(Mode::Naive));
    for (const auto &r : run.records) {
        EXPECT_EQ(r.origin, Origin::ColdCompiled);
        EXPECT_EQ(r.theta, run.records[0].theta);
    }
    EXPECT_DOUBLE_EQ(run.metrics.transferred_percent, 0.0);
}

TEST(CompressImage, ZeroBlocksSkipCompilation) {
    GrayImage img(6, 6, 0.0);
    img.at(0, 0) = 200; // only the top-left block carries signal
    const auto run = compress_image(img, options(Mode::Fast));
    ASSERT_EQ(run.records.size(), 9u);
    EXPECT_EQ(run.records[0].origin, Origin::ColdCompiled);
    for (std::size_t b = 1; b < 9; ++b) {
        EXPECT_EQ(run.records[b].origin, Origin::Zero);
        EXPECT_EQ(run.records[b].scale, 0.0);
        EXPECT_EQ(run.records[b].evaluations, 0);
        EXPECT_EQ(run.records[b].cost, 0.0);
    }
}

TEST(CompressImage, RadiusZeroMatchesNaive) {
    std::mt19937_64 rng(33);
    const auto img = smooth_random_image(rng, 8, 8);
    auto fast = options(Mode::Fast);
    fast.radius = 0;
    EXPECT_EQ(compress_image(img, fast).records, compress_image(img, options(Mode::Naive)).records);
}

TEST(CompressImage, DeterministicAcrossRuns) {
    std::mt19937_64 rng(34);
    const auto img = smooth_random_image(rng, 12, 10);
    for (Mode mode : {Mode::Naive, Mode::Fast}) {
        EXPECT_EQ(compress_image(img, options(mode)).records,
                  compress_image(img, options(mode)).records);
    }
}

TEST(CompressImage, LayersOverrideAndRotationChoice) {
    const GrayImage img(4, 4, 50.0);
    auto o = options(Mode::Fast);
    o.layers = 3;
    o.rotations = kXYZ;
    const auto run = compress_image(img, o);
    EXPECT_EQ(run.config.layers, 3);
    EXPECT_EQ(run.config.rotations, kXYZ);
    EXPECT_EQ(run.records[0].theta.size(), 18u);
}

// Property: naive evaluations stay within N*M*(n_iter(2m+1)+1), fast never
// exceeds naive, and the fast loss stays within tau of the naive loss.
TEST(PipelineProperty, EvaluationBudgetAndOrdering) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 4; ++trial) {
        const auto img = smooth_random_image(rng, 16, 16);
        const auto naive = compress_image(img, options(Mode::Naive));
        const auto fast = compress_image(img, options(Mode::Fast));
        const long long m = static_cast<long long>(param_count(naive.config));
        const long long bound =
            static_cast<long long>(naive.grid.num_blocks()) * (100 * (2 * m + 1) + 1);
        EXPECT_LE(naive.metrics.total_evaluations, bound);
        EXPECT_LE(fast.metrics.total_evaluations, naive.metrics.total_evaluations);
        EXPECT_LE(fast.metrics.mean_cost, naive.metrics.mean_cost + 1e-3);
    }
}
