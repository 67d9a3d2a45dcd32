// qic: command-line front end for the block-circuit image codec.
//
//   qic compress   IN.pgm OUT.qic [--k 2] [--mode fast|naive] [...]
//   qic decompress IN.qic OUT.pgm [--reference ORIG.pgm] [--ascii]
//   qic bench      IN.pgm --k 2,4 --sizes 8,16,32 [--modes naive,fast] [--output F]
//   qic inspect    IN.qic [--reference ORIG.pgm]
//
// Exit codes: 0 success, 1 runtime / IO / format failure, 2 usage error.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qic/qic.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TuningFlags {
    int radius = 1;
    int layers = 0;
    int n_iter = 100;
    double tau = 1e-3;
    double alpha = 0.1;
    std::string rotations = "ZXZ";

    void attach(CLI::App &cmd) {
        cmd.add_option("--radius", radius, "Neighbour radius R (fast mode)")->capture_default_str();
        cmd.add_option("--layers", layers, "Ansatz layers L (0 = n)")->capture_default_str();
        cmd.add_option("--n-iter", n_iter, "Max compilation iterations")->capture_default_str();
        cmd.add_option("--tau", tau, "Cost threshold")->capture_default_str();
        cmd.add_option("--alpha", alpha, "Adam learning rate")->capture_default_str();
        cmd.add_option("--rotations", rotations, "Rotation triple, e.g. XYZ or ZXZ")
            ->capture_default_str();
    }

    [[nodiscard]] qic::CompileSettings settings() const {
        qic::CompileSettings s;
        s.n_iter = n_iter;
        s.tau = tau;
        s.alpha = alpha;
        return s;
    }
};

qic::Mode parse_mode(const std::string &s) {
    if (s == "fast") {
        return qic::Mode::Fast;
    }
    if (s == "naive") {
        return qic::Mode::Naive;
    }
    throw UsageFailure("unknown mode '" + s + "' (expected fast or naive)");
}

void check_block_size(std::size_t k) {
    if (k < 2 || !qic::is_power_of_two(k)) {
        throw UsageFailure("--k must be a power of two >= 2, got " + std::to_string(k));
    }
}

std::vector<std::uint8_t> read_bytes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw qic::Error("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw qic::Error("cannot write '" + path + "'");
    }
}

void write_block_csv(const std::string &path, const qic::RunMetrics &m) {
    std::ofstream out(path);
    if (!out) {
        throw qic::Error("cannot write '" + path + "'");
    }
    out << "i,j,origin,cost,iterations,evaluations\n";
    char buf[256];
    for (const auto &r : m.rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%s,%.9g,%d,%lld\n", r.row, r.col,
                      std::string(qic::origin_name(r.origin)).c_str(), r.cost, r.iterations,
                      r.evaluations);
        out << buf;
    }
}

template <typename T>
std::vector<T> parse_list(const std::string &csv) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t end = std::min(csv.find(',', start), csv.size());
        const std::string item = csv.substr(start, end - start);
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                const unsigned long long v = std::stoull(item, &used);
                if (used != item.size()) {
                    throw std::invalid_argument(item);
                }
                out.push_back(static_cast<T>(v));
            } catch (const std::exception &) {
                throw UsageFailure("bad list entry '" + item + "'");
            }
        }
        start = end + 1;
    }
    if (out.empty()) {
        throw UsageFailure("empty list '" + csv + "'");
    }
    return out;
}

// Cost of every stored block against the normalized reference blocks.
std::vector<double> reference_costs(const qic::CompressedImage &img,
                                    const qic::GrayImage &reference) {
    const auto blocks = qic::split_blocks(reference, img.grid);
    std::vector<double> costs;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto bs = qic::block_to_state(blocks[b]);
        if (bs.is_zero() || img.blocks[b].scale == 0.0) {
            costs.push_back(bs.is_zero() && img.blocks[b].scale == 0.0 ? 0.0 : 1.0);
            continue;
        }
        costs.push_back(qic::cost(img.blocks[b].theta, *bs.state, img.config));
    }
    return costs;
}

int cmd_compress(const std::string &in, const std::string &out, std::size_t k,
                 const std::string &mode_str, const TuningFlags &tune,
                 const std::string &metrics_csv) {
    check_block_size(k);
    const qic::Mode mode = parse_mode(mode_str);
    const qic::GrayImage image = qic::read_pnm(in);

    qic::CompressOptions opt;
    opt.k = k;
    opt.mode = mode;
    opt.radius = tune.radius;
    opt.layers = tune.layers;
    opt.rotations = qic::parse_rotations(tune.rotations);
    opt.settings = tune.settings();
    const qic::CompressionRun run = qic::compress_image(image, opt);
    const auto bytes = qic::encode(qic::make_compressed(run, mode));
    write_bytes(out, bytes);
    if (!metrics_csv.empty()) {
        write_block_csv(metrics_csv, run.metrics);
    }

    const auto &m = run.metrics;
    std::printf("blocks              %zu (%zu x %zu), k=%zu n=%d L=%d m=%zu\n",
                run.grid.num_blocks(), run.grid.rows, run.grid.cols, k, run.config.n,
                run.config.layers, qic::param_count(run.config));
    std::printf("mean_cost           %.6g\n", m.mean_cost);
    std::printf("mean_iterations     %.4f\n", m.mean_iterations);
    std::printf("transferred_percent %.4f\n", m.transferred_percent);
    std::printf("total_evaluations   %lld\n", m.total_evaluations);
    std::printf("param_ratio         %.6f\n", qic::compression_ratio(run.grid, run.config));
    std::printf("byte_ratio          %.6f\n", qic::byte_ratio(bytes.size(), run.grid));
    std::printf("wall_time           %.3f s\n", m.wall_time);
    return 0;
}

int cmd_decompress(const std::string &in, const std::string &out,
                   const std::string &reference, bool ascii) {
    const auto img = qic::decode(read_bytes(in));
    const qic::GrayImage decoded = qic::decompress_image(img);
    qic::write_pgm(out, decoded, ascii);
    std::printf("wrote %zux%zu image to %s\n", decoded.width, decoded.height, out.c_str());
    if (!reference.empty()) {
        const qic::GrayImage ref = qic::read_pnm(reference);
        std::printf("psnr %.4f dB\n", qic::psnr(ref, decoded));
    }
    return 0;
}

int cmd_bench(const std::string &in, const std::string &k_list, const std::string &size_list,
              const std::string &mode_list, const TuningFlags &tune, const std::string &output,
              const std::string &name_override, bool timing) {
    qic::BenchOptions opt;
    opt.block_sizes = parse_list<std::size_t>(k_list);
    for (auto k : opt.block_sizes) {
        check_block_size(k);
    }
    opt.sizes = parse_list<std::size_t>(size_list);
    opt.modes.clear();
    std::size_t start = 0;
    while (start <= mode_list.size()) {
        const std::size_t end = std::min(mode_list.find(',', start), mode_list.size());
        const std::string item = mode_list.substr(start, end - start);
        if (!item.empty()) {
            opt.modes.push_back(parse_mode(item));
        }
        start = end + 1;
    }
    if (opt.modes.empty()) {
        throw UsageFailure("no modes given");
    }
    opt.radius = tune.radius;
    opt.layers = tune.layers;
    opt.rotations = qic::parse_rotations(tune.rotations);
    opt.settings = tune.settings();

    const qic::GrayImage image = qic::read_pnm(in);
    for (auto s : opt.sizes) {
        if (s > image.height || s > image.width) {
            throw UsageFailure("size " + std::to_string(s) + " exceeds the input image");
        }
    }
    const std::string name =
        name_override.empty() ? std::filesystem::path(in).stem().string() : name_override;
    const auto rows = qic::run_bench(image, name, opt);
    const std::string csv = qic::format_bench_csv(rows, timing);
    if (output.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(output, std::ios::binary);
        f << csv;
        if (!f) {
            throw qic::Error("cannot write '" + output + "'");
        }
    }
    return 0;
}

int cmd_inspect(const std::string &in, const std::string &reference) {
    const auto bytes = read_bytes(in);
    const auto img = qic::decode(bytes);
    const auto &g = img.grid;
    const auto &c = img.config;
    const auto gates = qic::build_ansatz(c);
    std::printf("format        QIC1 v%d, %zu bytes\n", qic::kFormatVersion, bytes.size());
    std::printf("image         %zu x %zu (padding %zu rows, %zu cols)\n", g.height, g.width,
                g.pad_rows, g.pad_cols);
    std::printf("blocks        %zu x %zu = %zu, k=%zu\n", g.rows, g.cols, g.num_blocks(), g.k);
    std::printf("ansatz        n=%d L=%d rotations=%s id=%d m=%zu depth=%d\n", c.n, c.layers,
                qic::rotations_name(c.rotations).c_str(), qic::ansatz_id(c.rotations),
                qic::param_count(c), qic::circuit_depth(gates, c.n));
    std::printf("mode          %s\n", (img.flags & qic::kFlagFastMode) ? "fast" : "naive");
    std::printf("param_ratio   %.6f\n", qic::compression_ratio(g, c));
    std::printf("byte_ratio    %.6f\n", qic::byte_ratio(bytes.size(), g));

    constexpr std::array origins{qic::Origin::Zero, qic::Origin::ColdCompiled,
                                 qic::Origin::WarmCompiled, qic::Origin::Reused,
                                 qic::Origin::Estimated};
    std::map<qic::Origin, std::size_t> hist;
    for (const auto &b : img.blocks) {
        ++hist[b.origin];
    }
    std::printf("origins\n");
    for (auto o : origins) {
        const double pct = 100.0 * static_cast<double>(hist[o]) /
                           static_cast<double>(img.blocks.size());
        std::printf("  %-14s %8zu  %7.3f%%\n", std::string(qic::origin_name(o)).c_str(),
                    hist[o], pct);
    }

    if (reference.empty()) {
        std::printf("cost          (pass --reference to evaluate block costs)\n");
        return 0;
    }
    const qic::GrayImage ref = qic::read_pnm(reference);
    if (ref.height != g.height || ref.width != g.width) {
        throw UsageFailure("reference image size does not match the header");
    }
    auto costs = reference_costs(img, ref);
    std::sort(costs.begin(), costs.end());
    double sum = 0.0;
    for (double x : costs) {
        sum += x;
    }
    auto quantile = [&](double q) {
        return costs[static_cast<std::size_t>(q * static_cast<double>(costs.size() - 1))];
    };
    std::printf("cost          mean %.6g  min %.6g  median %.6g  p90 %.6g  max %.6g\n",
                sum / static_cast<double>(costs.size()), costs.front(), quantile(0.5),
                quantile(0.9), costs.back());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Block-circuit image codec"};
    app.require_subcommand(1);

    std::string in, out, reference, mode = "fast", metrics_csv, k_list, size_list,
                                    mode_list = "naive,fast", bench_out, bench_name;
    std::size_t k = 2;
    bool ascii = false;
    bool timing = false;
    TuningFlags tune;

    auto *compress = app.add_subcommand("compress", "Compress a PGM image to a QIC1 file");
    compress->add_option("input", in, "Input PGM/PPM")->required();
    compress->add_option("output", out, "Output .qic file")->required();
    compress->add_option("--k", k, "Block size (power of two)")->capture_default_str();
    compress->add_option("--mode", mode, "fast or naive")->capture_default_str();
    compress->add_option("--metrics-csv", metrics_csv, "Write per-block metrics CSV");
    tune.attach(*compress);

    auto *decompress = app.add_subcommand("decompress", "Decode a QIC1 file to PGM");
    decompress->add_option("input", in, "Input .qic file")->required();
    decompress->add_option("output", out, "Output PGM")->required();
    decompress->add_option("--reference", reference, "Original image; prints PSNR");
    decompress->add_flag("--ascii", ascii, "Write P2 instead of P5");

    auto *bench = app.add_subcommand("bench", "Fast vs naive sweep, CSV output");
    bench->add_option("input", in, "Input PGM/PPM")->required();
    bench->add_option("--k", k_list, "Comma-separated block sizes")->required();
    bench->add_option("--sizes", size_list, "Comma-separated square sizes")->required();
    bench->add_option("--modes", mode_list, "Comma-separated modes")->capture_default_str();
    bench->add_option("--output", bench_out, "CSV path (default stdout)");
    bench->add_option("--name", bench_name, "Image column value (default file stem)");
    bench->add_flag("--timing", timing, "Record wall_time (output no longer reproducible)");
    tune.attach(*bench);

    auto *inspect = app.add_subcommand("inspect", "Summarize a QIC1 file");
    inspect->add_option("input", in, "Input .qic file")->required();
    inspect->add_option("--reference", reference, "Original image; reports block costs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*compress) {
            return cmd_compress(in, out, k, mode, tune, metrics_csv);
        }
        if (*decompress) {
            return cmd_decompress(in, out, reference, ascii);
        }
        if (*bench) {
            return cmd_bench(in, k_list, size_list, mode_list, tune, bench_out, bench_name,
                             timing);
        }
        if (*inspect) {
            return cmd_inspect(in, reference);
        }
    } catch (const UsageFailure &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qic::ConfigError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
