#pragma once

// Netpbm grayscale I/O (P2 / P5, maxval <= 255) plus colour P3 / P6 input,
// which is converted to luma with 0.299 / 0.587 / 0.114 weights.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qic/error.hpp"
#include "qic/pipeline.hpp"

namespace qic {

namespace detail {

class PnmCursor {
  public:
    explicit PnmCursor(const std::vector<std::uint8_t> &bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(ch)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t read_uint() {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::size_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (v > (std::size_t{1} << 31)) {
                throw FormatError("integer too large in PNM header", start);
            }
            ++pos_;
        }
        if (pos_ == start) {
            throw FormatError("expected integer in PNM data", start);
        }
        return v;
    }

    std::uint8_t read_byte() {
        if (pos_ >= bytes_.size()) {
            throw FormatError("truncated PNM raster", pos_);
        }
        return bytes_[pos_++];
    }

    /// Single whitespace byte separating the header from a binary raster.
    void skip_one_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("expected whitespace after PNM header", pos_);
        }
        ++pos_;
    }

    [[nodiscard]] std::size_t pos() const noexcept { return pos_; }

  private:
    const std::vector<std::uint8_t> &bytes_;
    std::size_t pos_{0};
};

inline std::vector<std::uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

} // namespace detail

[[nodiscard]] inline GrayImage decode_pnm(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw FormatError("missing PNM magic", 0);
    }
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '5' && kind != '3' && kind != '6') {
        throw FormatError(std::string("unsupported PNM type P") + kind, 1);
    }
    const bool binary = kind == '5' || kind == '6';
    const bool color = kind == '3' || kind == '6';

    detail::PnmCursor cur(bytes);
    cur.read_byte();
    cur.read_byte();
    const std::size_t width = cur.read_uint();
    const std::size_t height = cur.read_uint();
    const std::size_t maxval = cur.read_uint();
    if (width == 0 || height == 0) {
        throw FormatError("PNM image has zero size", cur.pos());
    }
    if (maxval == 0 || maxval > 255) {
        throw FormatError("only 8-bit PNM (maxval 1..255) is supported", cur.pos());
    }
    if (binary) {
        cur.skip_one_space();
    }
    const double to_255 = 255.0 / static_cast<double>(maxval);
    auto sample = [&]() -> double {
        const std::size_t at = cur.pos();
        const std::size_t v = binary ? cur.read_byte() : cur.read_uint();
        if (v > maxval) {
            throw FormatError("sample exceeds maxval", at);
        }
        return static_cast<double>(v);
    };

    GrayImage img(height, width);
    for (auto &p : img.pixels) {
        double v;
        if (color) {
            const double r = sample();
            const double g = sample();
            const double b = sample();
            v = 0.299 * r + 0.587 * g + 0.114 * b;
        } else {
            v = sample();
        }
        p = std::clamp(std::round(v * to_255), 0.0, 255.0);
    }
    return img;
}

[[nodiscard]] inline GrayImage read_pnm(const std::string &path) {
    return decode_pnm(detail::read_file(path));
}

/// Rounds and clamps to 0..255 and serializes as P5 (binary) or P2 (ASCII).
[[nodiscard]] inline std::vector<std::uint8_t> encode_pgm(const GrayImage &img,
                                                          bool ascii = false) {
    std::ostringstream header;
    header << (ascii ? "P2\n" : "P5\n") << img.width << ' ' << img.height << "\n255\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> out(h.begin(), h.end());
    auto to_byte = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    };
    if (ascii) {
        std::ostringstream body;
        for (std::size_t r = 0; r < img.height; ++r) {
            for (std::size_t c = 0; c < img.width; ++c) {
                body << static_cast<int>(to_byte(img.at(r, c)))
                     << (c + 1 == img.width ? '\n' : ' ');
            }
        }
        const std::string b = body.str();
        out.insert(out.end(), b.begin(), b.end());
    } else {
        out.reserve(out.size() + img.pixels.size());
        for (double v : img.pixels) {
            out.push_back(to_byte(v));
        }
    }
    return out;
}

inline void write_pgm(const std::string &path, const GrayImage &img, bool ascii = false) {
    detail::write_file(path, encode_pgm(img, ascii));
}

/// Box-filter downscale to `out_h` x `out_w`; both must divide the input dims.
/// The result is rounded back to integer levels.
[[nodiscard]] inline GrayImage downscale_area(const GrayImage &img, std::size_t out_h,
                                              std::size_t out_w) {
    if (out_h == 0 || out_w == 0 || img.height % out_h != 0 || img.width % out_w != 0) {
        throw ConfigError("downscale target " + std::to_string(out_h) + "x" +
                          std::to_string(out_w) + " must evenly divide " +
                          std::to_string(img.height) + "x" + std::to_string(img.width));
    }
    const std::size_t fy = img.height / out_h;
    const std::size_t fx = img.width / out_w;
    const double inv = 1.0 / static_cast<double>(fy * fx);
    GrayImage out(out_h, out_w);
    for (std::size_t r = 0; r < out_h; ++r) {
        for (std::size_t c = 0; c < out_w; ++c) {
            double s = 0.0;
            for (std::size_t dy = 0; dy < fy; ++dy) {
                for (std::size_t dx = 0; dx < fx; ++dx) {
                    s += img.at(r * fy + dy, c * fx + dx);
                }
            }
            out.at(r, c) = std::round(s * inv);
        }
    }
    return out;
}

[[nodiscard]] inline GrayImage crop(const GrayImage &img, std::size_t top, std::size_t left,
                                    std::size_t h, std::size_t w) {
    if (top + h > img.height || left + w > img.width) {
        throw ConfigError("crop window outside image");
    }
    GrayImage out(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            out.at(r, c) = img.at(top + r, left + c);
        }
    }
    return out;
}

/// 10 log10(255^2 / MSE); +infinity for identical images.
[[nodiscard]] inline double psnr(const GrayImage &a, const GrayImage &b) {
    if (a.height != b.height || a.width != b.width) {
        throw UsageError("PSNR of images with different sizes");
    }
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        se += d * d;
    }
    if (se == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double mse = se / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace qic
