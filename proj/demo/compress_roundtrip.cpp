// Compresses a PGM in naive and fast mode, then reports iterations and PSNR.
//
//   compress_roundtrip image.pgm [k]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "qic/qic.hpp"

int main(int argc, char **argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s image.pgm [k]\n", argv[0]);
        return 2;
    }
    try {
        const qic::GrayImage image = qic::read_pnm(argv[1]);
        qic::CompressOptions opt;
        opt.k = argc > 2 ? std::stoul(argv[2]) : 2;

        for (qic::Mode mode : {qic::Mode::Naive, qic::Mode::Fast}) {
            opt.mode = mode;
            const auto run = qic::compress_image(image, opt);
            const auto bytes = qic::encode(qic::make_compressed(run, mode));
            const auto restored = qic::decompress_image(qic::decode(bytes));
            std::printf("%-5s  iterations %7.3f  transferred %6.2f%%  cost %.3e  "
                        "psnr %6.2f dB  %zu bytes\n",
                        std::string(qic::mode_name(mode)).c_str(),
                        run.metrics.mean_iterations, run.metrics.transferred_percent,
                        run.metrics.mean_cost, qic::psnr(image, restored), bytes.size());
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
