#pragma once

// Image -> k x k blocks -> compiled parameters.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qic/ansatz.hpp"
#include "qic/error.hpp"
#include "qic/optimize.hpp"
#include "qic/statevec.hpp"
#include "qic/transfer.hpp"

namespace qic {

/// Row-major grayscale image, pixel values on the 0..255 scale.
struct GrayImage {
    std::size_t height{0};
    std::size_t width{0};
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(std::size_t h, std::size_t w, double fill = 0.0)
        : height(h), width(w), pixels(h * w, fill) {}

    [[nodiscard]] double &at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }

    friend bool operator==(const GrayImage &, const GrayImage &) = default;
};

[[nodiscard]] constexpr bool is_power_of_two(std::size_t v) noexcept {
    return v != 0 && (v & (v - 1)) == 0;
}

struct GridShape {
    std::size_t height{0}; // I_N
    std::size_t width{0};  // I_M
    std::size_t k{0};
    std::size_t pad_rows{0}; // P_N
    std::size_t pad_cols{0}; // P_M
    std::size_t rows{0};     // N
    std::size_t cols{0};     // M
    int n{0};

    [[nodiscard]] std::size_t num_blocks() const noexcept { return rows * cols; }

    friend bool operator==(const GridShape &, const GridShape &) = default;
};

/// n = 2 * ceil(log2 k).
[[nodiscard]] inline int qubits_for_block(std::size_t k) {
    int bits = 0;
    while ((std::size_t{1} << bits) < k) {
        ++bits;
    }
    return 2 * bits;
}

[[nodiscard]] inline GridShape plan_grid(std::size_t height, std::size_t width, std::size_t k) {
    if (height < 1 || width < 1) {
        throw ConfigError("image dimensions must be positive");
    }
    if (k < 2 || !is_power_of_two(k)) {
        throw ConfigError("block size must be a power of two >= 2, got " + std::to_string(k));
    }
    GridShape g;
    g.height = height;
    g.width = width;
    g.k = k;
    g.pad_rows = height % k == 0 ? 0 : k - height % k;
    g.pad_cols = width % k == 0 ? 0 : k - width % k;
    g.rows = (height + g.pad_rows) / k;
    g.cols = (width + g.pad_cols) / k;
    g.n = qubits_for_block(k);
    if (g.n > kMaxQubits) {
        throw ConfigError("block size " + std::to_string(k) + " exceeds simulator limit");
    }
    return g;
}

struct Block {
    std::vector<double> pixels; // k*k, row-major
    std::size_t k{0};
    std::size_t row{1}; // 1-based grid position
    std::size_t col{1};
};

/// Zero-pads bottom/right and emits blocks in raster order.
[[nodiscard]] inline std::vector<Block> split_blocks(const GrayImage &image,
                                                     const GridShape &grid) {
    if (image.height != grid.height || image.width != grid.width) {
        throw UsageError("image dimensions do not match the grid");
    }
    const std::size_t k = grid.k;
    std::vector<Block> blocks;
    blocks.reserve(grid.num_blocks());
    for (std::size_t bi = 0; bi < grid.rows; ++bi) {
        for (std::size_t bj = 0; bj < grid.cols; ++bj) {
            Block b{std::vector<double>(k * k, 0.0), k, bi + 1, bj + 1};
            for (std::size_t r = 0; r < k; ++r) {
                const std::size_t y = bi * k + r;
                if (y >= image.height) {
                    break;
                }
                for (std::size_t c = 0; c < k; ++c) {
                    const std::size_t x = bj * k + c;
                    if (x < image.width) {
                        b.pixels[r * k + c] = image.at(y, x);
                    }
                }
            }
            blocks.push_back(std::move(b));
        }
    }
    return blocks;
}

/// Inverse of split_blocks: writes raster-ordered blocks back and crops padding.
[[nodiscard]] inline GrayImage assemble_blocks(const std::vector<std::vector<double>> &blocks,
                                               const GridShape &grid) {
    if (blocks.size() != grid.num_blocks()) {
        throw UsageError("block count does not match the grid");
    }
    const std::size_t k = grid.k;
    GrayImage out(grid.height, grid.width);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].size() != k * k) {
            throw UsageError("block has wrong pixel count");
        }
        const std::size_t bi = b / grid.cols;
        const std::size_t bj = b % grid.cols;
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t y = bi * k + r;
            if (y >= grid.height) {
                break;
            }
            for (std::size_t c = 0; c < k; ++c) {
                const std::size_t x = bj * k + c;
                if (x < grid.width) {
                    out.at(y, x) = blocks[b][r * k + c];
                }
            }
        }
    }
    return out;
}

/// Normalized block state; `state` is empty for an all-zero block (scale 0).
struct BlockState {
    std::optional<QuantumState> state;
    double scale{0.0};

    [[nodiscard]] bool is_zero() const noexcept { return !state.has_value(); }
};

[[nodiscard]] inline BlockState block_to_state(const Block &block) {
    if (block.pixels.size() != block.k * block.k || !is_power_of_two(block.pixels.size())) {
        throw UsageError("block is not k x k with k a power of two");
    }
    double norm2 = 0.0;
    for (double p : block.pixels) {
        if (p < 0.0) {
            throw UsageError("negative pixel value");
        }
        norm2 += p * p;
    }
    if (norm2 == 0.0) {
        return {};
    }
    return {QuantumState::from_real(block.pixels), std::sqrt(norm2)};
}

struct BlockRecord {
    ParamVector theta;
    double scale{0.0};
    double cost{0.0};
    Origin origin{Origin::Zero};
    int iterations{0};
    long long evaluations{0};

    friend bool operator==(const BlockRecord &, const BlockRecord &) = default;
};

struct BlockMetricRow {
    std::size_t row{1};
    std::size_t col{1};
    Origin origin{Origin::Zero};
    double cost{0.0};
    int iterations{0};
    long long evaluations{0};
};

struct RunMetrics {
    double mean_cost{0.0};
    double sum_cost{0.0};
    double mean_iterations{0.0};
    double transferred_percent{0.0};
    long long total_evaluations{0};
    double wall_time{0.0}; // seconds
    std::vector<BlockMetricRow> rows;
};

/// Aggregates per-block records given in raster order on a grid with `cols` columns.
[[nodiscard]] inline RunMetrics run_metrics(const std::vector<BlockRecord> &records,
                                            std::size_t cols = 0) {
    if (records.empty()) {
        throw UsageError("no block records to aggregate");
    }
    if (cols == 0) {
        cols = records.size();
    }
    RunMetrics m;
    std::size_t transferred = 0;
    double iter_sum = 0.0;
    m.rows.reserve(records.size());
    for (std::size_t b = 0; b < records.size(); ++b) {
        const auto &r = records[b];
        m.sum_cost += r.cost;
        iter_sum += r.iterations;
        m.total_evaluations += r.evaluations;
        if (is_transferred(r.origin)) {
            ++transferred;
        }
        m.rows.push_back({b / cols + 1, b % cols + 1, r.origin, r.cost, r.iterations,
                          r.evaluations});
    }
    const auto count = static_cast<double>(records.size());
    m.mean_cost = m.sum_cost / count;
    m.mean_iterations = iter_sum / count;
    m.transferred_percent = 100.0 * static_cast<double>(transferred) / count;
    return m;
}

enum class Mode { Naive, Fast };

[[nodiscard]] inline std::string_view mode_name(Mode m) noexcept {
    return m == Mode::Naive ? "naive" : "fast";
}

struct CompressOptions {
    std::size_t k{2};
    Mode mode{Mode::Fast};
    int radius{1};
    int layers{0}; // 0 selects L = n
    RotationSequence rotations{kZXZ};
    CompileSettings settings{};
};

[[nodiscard]] inline AnsatzConfig ansatz_for(const GridShape &grid, const CompressOptions &opt) {
    return AnsatzConfig{grid.n, opt.layers > 0 ? opt.layers : grid.n, opt.rotations};
}

struct CompressionRun {
    GridShape grid;
    AnsatzConfig config;
    std::vector<BlockRecord> records;
    RunMetrics metrics;
};

/// Compiles every block in raster order. In fast mode each block first tries
/// the already-compiled blocks within Chebyshev radius R (which, in raster
/// order, lie above or to the left).
[[nodiscard]] inline CompressionRun compress_image(const GrayImage &image,
                                                   const CompressOptions &opt) {
    validate(opt.settings);
    if (opt.radius < 0) {
        throw ConfigError("neighbour radius must be non-negative");
    }
    const auto t0 = std::chrono::steady_clock::now();

    CompressionRun run;
    run.grid = plan_grid(image.height, image.width, opt.k);
    run.config = ansatz_for(run.grid, opt);
    const auto blocks = split_blocks(image, run.grid);
    const std::size_t cols = run.grid.cols;
    const auto radius = static_cast<std::size_t>(opt.radius);
    run.records.reserve(blocks.size());

    std::vector<Neighbor> neighbors;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        BlockState bs = block_to_state(blocks[b]);
        if (bs.is_zero()) {
            run.records.push_back({ones_params(run.config), 0.0, 0.0, Origin::Zero, 0, 0});
            continue;
        }
        Objective objective(run.config, *bs.state);

        neighbors.clear();
        if (opt.mode == Mode::Fast) {
            const std::size_t bi = b / cols;
            const std::size_t bj = b % cols;
            const std::size_t r0 = bi >= radius ? bi - radius : 0;
            const std::size_t c0 = bj >= radius ? bj - radius : 0;
            const std::size_t c1 = std::min(cols - 1, bj + radius);
            for (std::size_t r = r0; r <= bi; ++r) {
                for (std::size_t c = c0; c <= c1; ++c) {
                    const std::size_t idx = r * cols + c;
                    if (idx >= b || run.records[idx].origin == Origin::Zero) {
                        continue;
                    }
                    neighbors.push_back({run.records[idx].theta, static_cast<int>(r),
                                         static_cast<int>(c)});
                }
            }
        }

        if (neighbors.empty()) {
            CompileResult r = compile(objective, ones_params(run.config), opt.settings);
            run.records.push_back({std::move(r.theta_star), bs.scale, r.final_cost,
                                   Origin::ColdCompiled, r.iterations_used,
                                   r.evaluations_used});
        } else {
            TransferOutcome t = run_transfer(objective, neighbors, opt.settings);
            run.records.push_back({std::move(t.theta), bs.scale, t.cost, t.origin,
                                   t.iterations_used, t.evaluations_used});
        }
    }

    run.metrics = run_metrics(run.records, cols);
    run.metrics.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

} // namespace qic
