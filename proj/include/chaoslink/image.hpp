#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaoslink/common.hpp"

namespace chaoslink::img {

struct GrayImage {
    int width = 0;   // N columns
    int height = 0;  // M rows
    std::vector<std::uint8_t> pixels;  // row-major, size width*height

    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

GrayImage make_image(int width, int height, std::uint8_t fill = 0);

// Binary PGM (P5), maxval 255 only. Comments and arbitrary whitespace in the
// header are handled; anything else is rejected with a diagnostic.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

using BitVec = std::vector<std::uint8_t>;  // one 0/1 value per entry

// Row-major bytes, most-significant bit first; length 8*width*height.
BitVec bits_from_image(const GrayImage& image);
GrayImage image_from_bits(const BitVec& bits, int width, int height);

}  // namespace chaoslink::img
