#include "chaoslink/image.hpp"

#include <cctype>
#include <fstream>

namespace chaoslink::img {

namespace {

void validate_shape(int width, int height) {
    if (width < 1 || height < 1) throw invalid_input("image dimensions must be positive");
    if (static_cast<long long>(width) * height > (1ll << 28))
        throw invalid_input("image too large");
}

// Reads the next header token, skipping whitespace and '#' comment lines.
int next_header_int(std::istream& in, const std::string& path) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw invalid_input(path + ": truncated PGM header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw invalid_input(path + ": malformed PGM header");
    return value;
}

}  // namespace

GrayImage make_image(int width, int height, std::uint8_t fill) {
    validate_shape(width, height);
    GrayImage im;
    im.width = width;
    im.height = height;
    im.pixels.assign(static_cast<std::size_t>(width) * height, fill);
    return im;
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open image file: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw invalid_input(path + ": not a binary PGM (P5) file");
    int width = next_header_int(in, path);
    int height = next_header_int(in, path);
    int maxval = next_header_int(in, path);
    validate_shape(width, height);
    if (maxval != 255) throw invalid_input(path + ": only 8-bit PGM (maxval 255) is supported");
    in.get();  // single whitespace separating header from raster
    GrayImage im = make_image(width, height);
    in.read(reinterpret_cast<char*>(im.pixels.data()),
            static_cast<std::streamsize>(im.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(im.pixels.size()))
        throw invalid_input(path + ": truncated PGM raster");
    return im;
}

void write_pgm(const GrayImage& image, const std::string& path) {
    validate_shape(image.width, image.height);
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw invalid_input("pixel buffer does not match image dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write image file: " + path);
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw invalid_input("short write on image file: " + path);
}

BitVec bits_from_image(const GrayImage& image) {
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw invalid_input("pixel buffer does not match image dimensions");
    BitVec bits;
    bits.reserve(image.pixels.size() * 8);
    for (std::uint8_t b : image.pixels)
        for (int k = 7; k >= 0; --k) bits.push_back((b >> k) & 1u);
    return bits;
}

GrayImage image_from_bits(const BitVec& bits, int width, int height) {
    validate_shape(width, height);
    std::size_t n = static_cast<std::size_t>(width) * height;
    if (bits.size() != n * 8) throw invalid_input("bit count does not match image dimensions");
    GrayImage im = make_image(width, height);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t b = 0;
        for (int k = 0; k < 8; ++k) b = static_cast<std::uint8_t>((b << 1) | (bits[8 * i + k] & 1u));
        im.pixels[i] = b;
    }
    return im;
}

}  // namespace chaoslink::img
