#pragma once

// Fast-vs-naive sweep over image sizes and block sizes, emitted as CSV.

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "qic/codec.hpp"
#include "qic/image_io.hpp"
#include "qic/pipeline.hpp"

namespace qic {

/// Bumped whenever the column set or formatting changes.
inline constexpr int kBenchCsvVersion = 1;

inline constexpr const char *kBenchCsvHeader =
    "image,size,k,mode,mean_cost,sum_cost,mean_iterations,transferred_percent,"
    "total_evaluations,param_ratio,byte_ratio,wall_time";

struct BenchRow {
    std::string image;
    std::size_t size{0};
    std::size_t k{0};
    Mode mode{Mode::Fast};
    RunMetrics metrics;
    double param_ratio{0.0};
    double byte_ratio{0.0};
};

struct BenchOptions {
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> block_sizes;
    std::vector<Mode> modes{Mode::Naive, Mode::Fast};
    int radius{1};
    int layers{0};
    RotationSequence rotations{kZXZ};
    CompileSettings settings{};
};

/// Runs every (size, k, mode) combination in that nesting order.
[[nodiscard]] inline std::vector<BenchRow> run_bench(const GrayImage &image,
                                                     const std::string &name,
                                                     const BenchOptions &opt) {
    std::vector<BenchRow> rows;
    for (std::size_t size : opt.sizes) {
        if (!is_power_of_two(size)) {
            throw ConfigError("bench size " + std::to_string(size) + " is not a power of two");
        }
        const GrayImage scaled = downscale_area(image, size, size);
        for (std::size_t k : opt.block_sizes) {
            for (Mode mode : opt.modes) {
                CompressOptions co;
                co.k = k;
                co.mode = mode;
                co.radius = opt.radius;
                co.layers = opt.layers;
                co.rotations = opt.rotations;
                co.settings = opt.settings;
                CompressionRun run = compress_image(scaled, co);
                const auto bytes = encode(make_compressed(run, mode));
                rows.push_back({name, size, k, mode, std::move(run.metrics),
                                compression_ratio(run.grid, run.config),
                                byte_ratio(bytes.size(), run.grid)});
            }
        }
    }
    return rows;
}

/// One CSV line (no trailing newline). wall_time is written as 0 unless
/// `with_timing` is set so that repeated runs are byte-identical.
[[nodiscard]] inline std::string format_bench_row(const BenchRow &r, bool with_timing) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%s,%.9g,%.9g,%.6f,%.4f,%lld,%.6f,%.6f,%.3f",
                  r.image.c_str(), r.size, r.k, std::string(mode_name(r.mode)).c_str(),
                  r.metrics.mean_cost, r.metrics.sum_cost, r.metrics.mean_iterations,
                  r.metrics.transferred_percent, r.metrics.total_evaluations, r.param_ratio,
                  r.byte_ratio, with_timing ? r.metrics.wall_time : 0.0);
    return buf;
}

[[nodiscard]] inline std::string format_bench_csv(const std::vector<BenchRow> &rows,
                                                  bool with_timing) {
    std::string out = kBenchCsvHeader;
    out += '\n';
    for (const auto &r : rows) {
        out += format_bench_row(r, with_timing);
        out += '\n';
    }
    return out;
}

} // namespace qic
