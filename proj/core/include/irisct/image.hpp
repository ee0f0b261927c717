#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irisct/error.hpp"

namespace irisct {

/// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    /// Bilinear sample at real coordinates, clamped to the image rectangle.
    double sample(double x, double y) const;

    bool operator==(const GrayImage& o) const = default;
};

namespace io {

/// Loads a PGM (P5), BMP (8-bit palette-gray or equal-channel 24-bit) or
/// PNG (8-bit gray, or equal-channel RGB) file.
/// Throws Error{FileNotFound, UnsupportedFormat, CorruptImage}.
GrayImage load_image(const std::filesystem::path& path);

/// Writes by extension: .pgm, .bmp, .png. Lossless for 8-bit data.
void save_image(const GrayImage& img, const std::filesystem::path& path);

GrayImage decode_pgm(const std::vector<uint8_t>& bytes);
GrayImage decode_bmp(const std::vector<uint8_t>& bytes);
GrayImage decode_png(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> encode_pgm(const GrayImage& img);
std::vector<uint8_t> encode_bmp(const GrayImage& img);
std::vector<uint8_t> encode_png(const GrayImage& img);

} // namespace io
} // namespace irisct
