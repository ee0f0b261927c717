#include "irisct/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

namespace irisct {

double GrayImage::sample(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    int x1 = std::min(x0 + 1, width - 1);
    int y1 = std::min(y0 + 1, height - 1);
    double fx = x - x0;
    double fy = y - y0;
    double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    double bot = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

namespace io {
namespace {

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::FileNotFound, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::FileNotFound, "short write to " + path.string());
}

uint16_t rd_u16le(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }
uint32_t rd_u32le(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint32_t rd_u32be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}
void wr_u16le(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(static_cast<uint8_t>(x & 0xff));
    v.push_back(static_cast<uint8_t>(x >> 8));
}
void wr_u32le(std::vector<uint8_t>& v, uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(static_cast<uint8_t>((x >> (8 * i)) & 0xff));
}
void wr_u32be(std::vector<uint8_t>& v, uint32_t x) {
    for (int i = 3; i >= 0; --i) v.push_back(static_cast<uint8_t>((x >> (8 * i)) & 0xff));
}

// Skips whitespace and '#' comment lines, then parses one decimal token.
int pgm_next_int(const std::vector<uint8_t>& b, size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || !std::isdigit(b[pos]))
        fail(ErrorCode::CorruptImage, "malformed PGM header");
    long val = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        val = val * 10 + (b[pos] - '0');
        if (val > 1'000'000'000) fail(ErrorCode::CorruptImage, "PGM header value overflow");
        ++pos;
    }
    return static_cast<int>(val);
}

std::vector<uint8_t> zlib_inflate(const uint8_t* data, size_t len, size_t expected) {
    std::vector<uint8_t> out(expected);
    uLongf out_len = static_cast<uLongf>(expected);
    int rc = uncompress(out.data(), &out_len, data, static_cast<uLong>(len));
    if (rc != Z_OK || out_len != expected)
        fail(ErrorCode::CorruptImage, "PNG zlib stream does not inflate to expected size");
    return out;
}

std::vector<uint8_t> zlib_deflate(const std::vector<uint8_t>& data) {
    uLongf bound = compressBound(static_cast<uLong>(data.size()));
    std::vector<uint8_t> out(bound);
    int rc = compress2(out.data(), &bound, data.data(), static_cast<uLong>(data.size()),
                       Z_BEST_COMPRESSION);
    if (rc != Z_OK) fail(ErrorCode::CorruptImage, "zlib deflate failed");
    out.resize(bound);
    return out;
}

uint8_t paeth(uint8_t a, uint8_t b, uint8_t c) {
    int p = static_cast<int>(a) + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

GrayImage decode_pgm(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        fail(ErrorCode::UnsupportedFormat, "not a P5 PGM file");
    size_t pos = 2;
    int w = pgm_next_int(bytes, pos);
    int h = pgm_next_int(bytes, pos);
    int maxval = pgm_next_int(bytes, pos);
    if (w <= 0 || h <= 0) fail(ErrorCode::CorruptImage, "non-positive PGM dimensions");
    if (maxval <= 0 || maxval > 255)
        fail(ErrorCode::UnsupportedFormat, "PGM maxval " + std::to_string(maxval) +
                                               " outside 1..255");
    ++pos;  // single whitespace byte after maxval
    size_t need = static_cast<size_t>(w) * h;
    if (bytes.size() < pos + need) fail(ErrorCode::CorruptImage, "PGM pixel data truncated");
    GrayImage img(w, h);
    std::memcpy(img.pixels.data(), bytes.data() + pos, need);
    return img;
}

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::vector<uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

GrayImage decode_bmp(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 54 || bytes[0] != 'B' || bytes[1] != 'M')
        fail(ErrorCode::UnsupportedFormat, "not a BMP file");
    uint32_t data_offset = rd_u32le(&bytes[10]);
    uint32_t hdr_size = rd_u32le(&bytes[14]);
    if (hdr_size < 40) fail(ErrorCode::UnsupportedFormat, "BMP core header not supported");
    int32_t w = static_cast<int32_t>(rd_u32le(&bytes[18]));
    int32_t h_raw = static_cast<int32_t>(rd_u32le(&bytes[22]));
    uint16_t planes = rd_u16le(&bytes[26]);
    uint16_t bpp = rd_u16le(&bytes[28]);
    uint32_t compression = rd_u32le(&bytes[30]);
    if (planes != 1) fail(ErrorCode::CorruptImage, "BMP planes != 1");
    if (compression != 0) fail(ErrorCode::UnsupportedFormat, "compressed BMP not supported");
    if (bpp != 8 && bpp != 24)
        fail(ErrorCode::UnsupportedFormat, "BMP bit depth " + std::to_string(bpp) +
                                               " not supported");
    bool bottom_up = h_raw > 0;
    int h = std::abs(h_raw);
    if (w <= 0 || h <= 0) fail(ErrorCode::CorruptImage, "non-positive BMP dimensions");

    std::vector<uint8_t> palette_gray;
    if (bpp == 8) {
        uint32_t colors = rd_u32le(&bytes[46]);
        if (colors == 0) colors = 256;
        size_t pal_off = 14 + hdr_size;
        if (bytes.size() < pal_off + colors * 4)
            fail(ErrorCode::CorruptImage, "BMP palette truncated");
        palette_gray.resize(colors);
        for (uint32_t i = 0; i < colors; ++i) {
            uint8_t b = bytes[pal_off + i * 4 + 0];
            uint8_t g = bytes[pal_off + i * 4 + 1];
            uint8_t r = bytes[pal_off + i * 4 + 2];
            if (b != g || g != r)
                fail(ErrorCode::UnsupportedFormat, "BMP palette entry is not gray");
            palette_gray[i] = r;
        }
    }

    size_t row_bytes = (static_cast<size_t>(w) * bpp + 7) / 8;
    size_t stride = (row_bytes + 3) & ~size_t{3};
    if (bytes.size() < data_offset + stride * h)
        fail(ErrorCode::CorruptImage, "BMP pixel data truncated");

    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        int src_row = bottom_up ? (h - 1 - y) : y;
        const uint8_t* row = bytes.data() + data_offset + stride * src_row;
        if (bpp == 8) {
            for (int x = 0; x < w; ++x) {
                uint8_t idx = row[x];
                if (idx >= palette_gray.size())
                    fail(ErrorCode::CorruptImage, "BMP pixel index outside palette");
                img.at(x, y) = palette_gray[idx];
            }
        } else {
            for (int x = 0; x < w; ++x) {
                uint8_t b = row[x * 3 + 0];
                uint8_t g = row[x * 3 + 1];
                uint8_t r = row[x * 3 + 2];
                if (b != g || g != r)
                    fail(ErrorCode::UnsupportedFormat, "BMP pixel is not gray");
                img.at(x, y) = r;
            }
        }
    }
    return img;
}

std::vector<uint8_t> encode_bmp(const GrayImage& img) {
    size_t stride = (static_cast<size_t>(img.width) + 3) & ~size_t{3};
    uint32_t palette_bytes = 256 * 4;
    uint32_t data_offset = 14 + 40 + palette_bytes;
    uint32_t data_size = static_cast<uint32_t>(stride * img.height);
    std::vector<uint8_t> out;
    out.reserve(data_offset + data_size);
    out.push_back('B');
    out.push_back('M');
    wr_u32le(out, data_offset + data_size);
    wr_u32le(out, 0);
    wr_u32le(out, data_offset);
    wr_u32le(out, 40);
    wr_u32le(out, static_cast<uint32_t>(img.width));
    wr_u32le(out, static_cast<uint32_t>(img.height));  // bottom-up
    wr_u16le(out, 1);
    wr_u16le(out, 8);
    wr_u32le(out, 0);          // BI_RGB
    wr_u32le(out, data_size);
    wr_u32le(out, 2835);       // 72 dpi
    wr_u32le(out, 2835);
    wr_u32le(out, 256);
    wr_u32le(out, 0);
    for (int i = 0; i < 256; ++i) {
        out.push_back(static_cast<uint8_t>(i));
        out.push_back(static_cast<uint8_t>(i));
        out.push_back(static_cast<uint8_t>(i));
        out.push_back(0);
    }
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) out.push_back(img.at(x, y));
        for (size_t p = img.width; p < stride; ++p) out.push_back(0);
    }
    return out;
}

namespace {

uint32_t crc32_of(const uint8_t* data, size_t len, uint32_t seed = 0) {
    return static_cast<uint32_t>(
        ::crc32(seed, data, static_cast<uInt>(len)));
}

void png_append_chunk(std::vector<uint8_t>& out, const char type[4],
                      const std::vector<uint8_t>& payload) {
    wr_u32be(out, static_cast<uint32_t>(payload.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uint32_t crc = crc32_of(out.data() + crc_start, out.size() - crc_start);
    wr_u32be(out, crc);
}

} // namespace

GrayImage decode_png(const std::vector<uint8_t>& bytes) {
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        fail(ErrorCode::UnsupportedFormat, "not a PNG file");

    size_t pos = 8;
    int w = 0, h = 0, bit_depth = 0, color_type = 0;
    bool seen_ihdr = false, seen_iend = false;
    std::vector<uint8_t> idat;

    while (pos + 8 <= bytes.size()) {
        uint32_t len = rd_u32be(&bytes[pos]);
        if (pos + 12 + static_cast<size_t>(len) > bytes.size())
            fail(ErrorCode::CorruptImage, "PNG chunk overruns file");
        char type[5] = {};
        std::memcpy(type, &bytes[pos + 4], 4);
        const uint8_t* payload = &bytes[pos + 8];
        if (std::strcmp(type, "IHDR") == 0) {
            if (len != 13) fail(ErrorCode::CorruptImage, "bad IHDR length");
            w = static_cast<int>(rd_u32be(payload));
            h = static_cast<int>(rd_u32be(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[10] != 0 || payload[11] != 0)
                fail(ErrorCode::UnsupportedFormat, "nonstandard PNG compression/filter method");
            if (payload[12] != 0)
                fail(ErrorCode::UnsupportedFormat, "interlaced PNG not supported");
            if (bit_depth != 8)
                fail(ErrorCode::UnsupportedFormat, "PNG bit depth " +
                                                       std::to_string(bit_depth) +
                                                       " not supported");
            if (color_type != 0 && color_type != 2)
                fail(ErrorCode::UnsupportedFormat, "PNG color type " +
                                                       std::to_string(color_type) +
                                                       " not supported");
            seen_ihdr = true;
        } else if (std::strcmp(type, "IDAT") == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::strcmp(type, "IEND") == 0) {
            seen_iend = true;
            break;
        }
        pos += 12 + len;
    }
    if (!seen_ihdr) fail(ErrorCode::CorruptImage, "PNG missing IHDR");
    if (!seen_iend) fail(ErrorCode::CorruptImage, "PNG missing IEND");
    if (w <= 0 || h <= 0) fail(ErrorCode::CorruptImage, "non-positive PNG dimensions");
    if (idat.empty()) fail(ErrorCode::CorruptImage, "PNG missing IDAT");

    int channels = color_type == 0 ? 1 : 3;
    size_t row_bytes = static_cast<size_t>(w) * channels;
    size_t raw_size = (row_bytes + 1) * h;
    std::vector<uint8_t> raw = zlib_inflate(idat.data(), idat.size(), raw_size);

    std::vector<uint8_t> prev(row_bytes, 0);
    std::vector<uint8_t> cur(row_bytes, 0);
    GrayImage img(w, h);
    int bpp = channels;
    for (int y = 0; y < h; ++y) {
        const uint8_t* src = raw.data() + static_cast<size_t>(y) * (row_bytes + 1);
        uint8_t filter = src[0];
        const uint8_t* line = src + 1;
        for (size_t i = 0; i < row_bytes; ++i) {
            uint8_t a = i >= static_cast<size_t>(bpp) ? cur[i - bpp] : 0;
            uint8_t b = prev[i];
            uint8_t c = i >= static_cast<size_t>(bpp) ? prev[i - bpp] : 0;
            int v;
            switch (filter) {
                case 0: v = line[i]; break;
                case 1: v = line[i] + a; break;
                case 2: v = line[i] + b; break;
                case 3: v = line[i] + ((a + b) >> 1); break;
                case 4: v = line[i] + paeth(a, b, c); break;
                default:
                    fail(ErrorCode::CorruptImage,
                         "unknown PNG filter " + std::to_string(filter));
            }
            cur[i] = static_cast<uint8_t>(v & 0xff);
        }
        for (int x = 0; x < w; ++x) {
            if (channels == 1) {
                img.at(x, y) = cur[x];
            } else {
                uint8_t r = cur[x * 3 + 0], g = cur[x * 3 + 1], b2 = cur[x * 3 + 2];
                if (r != g || g != b2)
                    fail(ErrorCode::UnsupportedFormat, "PNG pixel is not gray");
                img.at(x, y) = r;
            }
        }
        std::swap(prev, cur);
    }
    return img;
}

std::vector<uint8_t> encode_png(const GrayImage& img) {
    std::vector<uint8_t> raw;
    raw.reserve((static_cast<size_t>(img.width) + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter type none
        for (int x = 0; x < img.width; ++x) raw.push_back(img.at(x, y));
    }
    std::vector<uint8_t> compressed = zlib_deflate(raw);

    std::vector<uint8_t> out;
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    out.insert(out.end(), sig, sig + 8);
    std::vector<uint8_t> ihdr;
    wr_u32be(ihdr, static_cast<uint32_t>(img.width));
    wr_u32be(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    png_append_chunk(out, "IHDR", ihdr);
    png_append_chunk(out, "IDAT", compressed);
    png_append_chunk(out, "IEND", {});
    return out;
}

GrayImage load_image(const std::filesystem::path& path) {
    std::vector<uint8_t> bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes);
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') return decode_png(bytes);
    fail(ErrorCode::UnsupportedFormat, "unrecognized image format: " + path.string());
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::vector<uint8_t> bytes;
    if (ext == ".pgm") {
        bytes = encode_pgm(img);
    } else if (ext == ".bmp") {
        bytes = encode_bmp(img);
    } else if (ext == ".png") {
        bytes = encode_png(img);
    } else {
        fail(ErrorCode::UnsupportedFormat, "unknown output extension " + ext);
    }
    write_file(path, bytes);
}

} // namespace io
} // namespace irisct
