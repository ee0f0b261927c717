#include "irisct/store.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>

#include "irisct/error.hpp"

namespace irisct {

namespace {

struct PayloadShape {
    size_t n_codes = 0;
    size_t n_reals = 0;
    bool has_indices = false;

    size_t n_bytes() const {
        return (n_codes + 3) / 4 + n_reals * 8 + (has_indices ? n_codes * 4 : 0);
    }
};

PayloadShape shape_for(FeatureMethod m, size_t length) {
    switch (m) {
        case FeatureMethod::Local:
        case FeatureMethod::Binary:
        case FeatureMethod::Ga600:
            return {length, 0, false};
        case FeatureMethod::Nlac:
            return {length, 0, true};
        case FeatureMethod::Combined:
            if (length < size_t(kGlobalLength))
                fail(ErrorCode::BadRecord, "combined template shorter than its real tail");
            return {length - kGlobalLength, size_t(kGlobalLength), false};
        case FeatureMethod::Glcm21:
        case FeatureMethod::Glcm56:
        case FeatureMethod::Global:
        case FeatureMethod::Aad:
        case FeatureMethod::Pca:
        case FeatureMethod::Ica:
            return {0, length, false};
    }
    fail(ErrorCode::BadRecord, "unhandled method");
}

void check_id(const std::string& id, const char* what) {
    if (id.empty()) fail(ErrorCode::BadRecord, std::string(what) + " is empty");
    for (char c : id)
        if (c == '\t' || c == '\n' || c == '\r')
            fail(ErrorCode::BadRecord, std::string(what) + " contains a separator character");
}

void push_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(uint8_t(v >> (8 * b)));
}

void push_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(uint8_t(v >> (8 * b)));
}

uint64_t pull_u64(std::span<const uint8_t> in, size_t at) {
    uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= uint64_t(in[at + b]) << (8 * b);
    return v;
}

uint32_t pull_u32(std::span<const uint8_t> in, size_t at) {
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= uint32_t(in[at + b]) << (8 * b);
    return v;
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::vector<uint8_t> from_hex(std::string_view s, const char* what) {
    if (s.size() % 2 != 0)
        fail(ErrorCode::BadRecord, std::string(what) + " hex has odd length");
    std::vector<uint8_t> bytes(s.size() / 2);
    for (size_t k = 0; k < bytes.size(); ++k) {
        const int hi = hex_nibble(s[2 * k]), lo = hex_nibble(s[2 * k + 1]);
        if (hi < 0 || lo < 0)
            fail(ErrorCode::BadRecord, std::string(what) + " contains a non-hex character");
        bytes[k] = uint8_t(hi << 4 | lo);
    }
    return bytes;
}

std::vector<uint8_t> pack_codes(std::span<const int8_t> codes) {
    std::vector<uint8_t> bytes((codes.size() + 3) / 4, 0);
    for (size_t k = 0; k < codes.size(); ++k) {
        uint8_t t;
        switch (codes[k]) {
            case 0: t = 0; break;
            case 1: t = 1; break;
            case -1: t = 2; break;
            default: fail(ErrorCode::BadRecord, "code entry outside {-1, 0, 1}");
        }
        bytes[k / 4] |= uint8_t(t << (2 * (k % 4)));
    }
    return bytes;
}

std::vector<int8_t> unpack_codes(std::span<const uint8_t> bytes, size_t n) {
    std::vector<int8_t> codes(n);
    for (size_t k = 0; k < n; ++k) {
        switch (bytes[k / 4] >> (2 * (k % 4)) & 3) {
            case 0: codes[k] = 0; break;
            case 1: codes[k] = 1; break;
            case 2: codes[k] = -1; break;
            default: fail(ErrorCode::BadRecord, "code payload holds the reserved bit pair");
        }
    }
    for (size_t k = n; k < bytes.size() * 4; ++k)
        if (bytes[k / 4] >> (2 * (k % 4)) & 3)
            fail(ErrorCode::BadRecord, "code payload has nonzero pad bits");
    return codes;
}

std::vector<uint8_t> pack_mask(std::span<const uint8_t> mask) {
    std::vector<uint8_t> bytes((mask.size() + 7) / 8, 0);
    for (size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) bytes[k / 8] |= uint8_t(1u << (k % 8));
    return bytes;
}

std::vector<uint8_t> unpack_mask(std::span<const uint8_t> bytes, size_t n) {
    std::vector<uint8_t> mask(n);
    for (size_t k = 0; k < n; ++k) mask[k] = bytes[k / 8] >> (k % 8) & 1;
    for (size_t k = n; k < bytes.size() * 8; ++k)
        if (bytes[k / 8] >> (k % 8) & 1)
            fail(ErrorCode::BadRecord, "mask has nonzero pad bits");
    return mask;
}

size_t parse_count(std::string_view text) {
    if (text.empty() || (text.size() > 1 && text[0] == '0'))
        fail(ErrorCode::BadRecord, "count field is not a canonical decimal");
    size_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            fail(ErrorCode::BadRecord, "count field is not a canonical decimal");
        if (value > (std::numeric_limits<size_t>::max() - size_t(c - '0')) / 10)
            fail(ErrorCode::BadRecord, "count field overflows");
        value = value * 10 + size_t(c - '0');
    }
    return value;
}

} // namespace

std::string encode_record(const TemplateRecord& rec) {
    check_id(rec.subject_id, "subject id");
    check_id(rec.sample_id, "sample id");
    const FeatureVector& f = rec.features;
    const PayloadShape shape = shape_for(f.method, f.length());
    if (f.codes.size() != shape.n_codes || f.reals.size() != shape.n_reals)
        fail(ErrorCode::BadRecord, "code/real split does not match the method");
    if (shape.has_indices) {
        if (f.indices.size() != f.codes.size())
            fail(ErrorCode::BadRecord, "sparse template needs one position per code entry");
    } else if (!f.indices.empty()) {
        fail(ErrorCode::BadRecord, "positions are only meaningful for sparse templates");
    }
    if (!f.mask.empty() && f.mask.size() != f.codes.size())
        fail(ErrorCode::BadRecord, "mask must parallel the code entries");

    std::vector<uint8_t> payload = pack_codes(f.codes);
    payload.reserve(shape.n_bytes());
    for (double d : f.reals) push_u64(payload, std::bit_cast<uint64_t>(d));
    for (int32_t i : f.indices) push_u32(payload, std::bit_cast<uint32_t>(i));

    std::string line = rec.subject_id;
    line += '\t';
    line += rec.sample_id;
    line += '\t';
    line += to_string(f.method);
    line += '\t';
    line += std::to_string(f.length());
    line += '\t';
    line += to_hex(payload);
    line += '\t';
    line += f.mask.empty() ? "-" : to_hex(pack_mask(f.mask));
    return line;
}

TemplateRecord decode_record(std::string_view line) {
    std::string_view fields[6];
    size_t start = 0;
    for (int k = 0; k < 6; ++k) {
        const size_t tab = line.find('\t', start);
        if (k < 5) {
            if (tab == std::string_view::npos)
                fail(ErrorCode::BadRecord, "expected six tab-separated fields");
            fields[k] = line.substr(start, tab - start);
            start = tab + 1;
        } else {
            if (tab != std::string_view::npos)
                fail(ErrorCode::BadRecord, "expected six tab-separated fields");
            fields[k] = line.substr(start);
        }
    }

    TemplateRecord rec;
    rec.subject_id = std::string(fields[0]);
    rec.sample_id = std::string(fields[1]);
    check_id(rec.subject_id, "subject id");
    check_id(rec.sample_id, "sample id");

    const auto method = method_from_tag(fields[2]);
    if (!method) fail(ErrorCode::BadRecord, "unknown method tag '" + std::string(fields[2]) + "'");
    rec.features.method = *method;

    const size_t length = parse_count(fields[3]);
    const PayloadShape shape = shape_for(*method, length);

    const std::vector<uint8_t> payload = from_hex(fields[4], "payload");
    if (payload.size() != shape.n_bytes())
        fail(ErrorCode::BadRecord, "payload size does not match the method and count");

    const size_t code_bytes = (shape.n_codes + 3) / 4;
    rec.features.codes = unpack_codes(std::span(payload).first(code_bytes), shape.n_codes);
    rec.features.reals.resize(shape.n_reals);
    for (size_t k = 0; k < shape.n_reals; ++k)
        rec.features.reals[k] = std::bit_cast<double>(pull_u64(payload, code_bytes + 8 * k));
    if (shape.has_indices) {
        const size_t at = code_bytes + 8 * shape.n_reals;
        rec.features.indices.resize(shape.n_codes);
        for (size_t k = 0; k < shape.n_codes; ++k)
            rec.features.indices[k] = std::bit_cast<int32_t>(pull_u32(payload, at + 4 * k));
    }

    if (fields[5] != "-") {
        if (shape.n_codes == 0)
            fail(ErrorCode::BadRecord, "mask given for a method without code entries");
        const std::vector<uint8_t> mask_bytes = from_hex(fields[5], "mask");
        if (mask_bytes.size() != (shape.n_codes + 7) / 8)
            fail(ErrorCode::BadRecord, "mask size does not match the code entries");
        rec.features.mask = unpack_mask(mask_bytes, shape.n_codes);
    }
    return rec;
}

void append_records(const std::string& path, std::span<const TemplateRecord> recs) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) fail(ErrorCode::FileNotFound, "cannot open store " + path);
    for (const TemplateRecord& rec : recs) out << encode_record(rec) << '\n';
    out.flush();
    if (!out) fail(ErrorCode::BadRecord, "write to store " + path + " failed");
}

std::vector<TemplateRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileNotFound, "cannot open store " + path);
    std::vector<TemplateRecord> recs;
    std::string line;
    for (size_t line_no = 1; std::getline(in, line); ++line_no) {
        try {
            recs.push_back(decode_record(line));
        } catch (const Error& e) {
            fail(e.code(), path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return recs;
}

} // namespace irisct
