// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/lightfield.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "sflf/error.hpp"

namespace sflf {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'L', 'P', 'L', 'F'};

void put_u32(std::uint8_t *out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out[k] = static_cast<std::uint8_t>(v >> (8 * k));
}
void put_f64(std::uint8_t *out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) out[k] = static_cast<std::uint8_t>(bits >> (8 * k));
}
std::uint32_t get_u32(const std::uint8_t *in) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t{in[k]} << (8 * k);
    return v;
}
double get_f64(const std::uint8_t *in) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= std::uint64_t{in[k]} << (8 * k);
    return std::bit_cast<double>(bits);
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    constexpr std::size_t kChunk = std::size_t{1} << 30;
    for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
        const std::size_t len = std::min(kChunk, bytes.size() - off);
        crc = crc32(crc, bytes.data() + off, static_cast<uInt>(len));
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

Texel quantize(const Rgb &linear) {
    auto q = [](double v) {
        if (!(v > 0.0)) return std::uint8_t{0};
        if (v >= 1.0) return std::uint8_t{255};
        return static_cast<std::uint8_t>(std::lround(v * 255.0));
    };
    return {q(linear.r), q(linear.g), q(linear.b), 255};
}

Rgb dequantize(const Texel &t) { return {t.r / 255.0, t.g / 255.0, t.b / 255.0}; }

void FieldGeometry::validate() const {
    SFLF_REQUIRE(m >= 2, "origin cardinality M must be >= 2");
    SFLF_REQUIRE(n >= 2, "direction cardinality N must be >= 2");
    SFLF_REQUIRE(std::isfinite(radius) && radius > 0.0, "sphere radius must be finite and > 0");
    SFLF_REQUIRE(is_finite(center), "sphere center must be finite");
}

LightField::LightField(const FieldGeometry &geometry, std::vector<Texel> texels)
    : geometry_(geometry), texels_(std::move(texels)) {
    geometry_.validate();
    if (texels_.size() != geometry_.texel_count())
        throw ContractViolation("light field expects " + std::to_string(geometry_.texel_count()) + " texels, got " +
                                std::to_string(texels_.size()));
}

std::uint64_t lplf_payload_bytes(std::uint32_t m, std::uint32_t n, bool hemisphere_only, TexelFormat format) {
    const std::uint64_t rows = hemisphere_only ? m / 2 : m;
    const std::uint64_t texel_bytes = format == TexelFormat::Rgba8 ? 4 : 16;
    return rows * n * texel_bytes;
}

std::uint64_t LplfHeader::payload_bytes() const {
    return lplf_payload_bytes(geometry.m, geometry.n, geometry.hemisphere_only, format);
}

std::array<std::uint8_t, kLplfHeaderBytes> LplfHeader::encode() const {
    std::array<std::uint8_t, kLplfHeaderBytes> out{};
    std::memcpy(out.data(), kMagic.data(), 4);
    put_u32(out.data() + 4, kLplfVersion);
    put_u32(out.data() + 8, geometry.hemisphere_only ? 1u : 0u);
    put_u32(out.data() + 12, geometry.m);
    put_u32(out.data() + 16, geometry.n);
    put_f64(out.data() + 20, geometry.radius);
    put_f64(out.data() + 28, geometry.center.x);
    put_f64(out.data() + 36, geometry.center.y);
    put_f64(out.data() + 44, geometry.center.z);
    put_u32(out.data() + 52, static_cast<std::uint32_t>(format));
    return out;
}

LplfHeader LplfHeader::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kLplfHeaderBytes)
        throw ParseError(bytes.size(), "truncated LPLF header: expected " + std::to_string(kLplfHeaderBytes) +
                                           " bytes, got " + std::to_string(bytes.size()));
    if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0) throw ParseError(0, "bad magic, not an LPLF file");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kLplfVersion) throw ParseError(4, "unsupported LPLF version " + std::to_string(version));
    const std::uint32_t flags = get_u32(bytes.data() + 8);
    if (flags & ~1u) throw ParseError(8, "unknown LPLF flag bits " + std::to_string(flags));

    LplfHeader h;
    h.geometry.hemisphere_only = (flags & 1u) != 0;
    h.geometry.m = get_u32(bytes.data() + 12);
    h.geometry.n = get_u32(bytes.data() + 16);
    h.geometry.radius = get_f64(bytes.data() + 20);
    h.geometry.center = {get_f64(bytes.data() + 28), get_f64(bytes.data() + 36), get_f64(bytes.data() + 44)};
    const std::uint32_t format = get_u32(bytes.data() + 52);

    if (h.geometry.m < 2) throw ParseError(12, "M must be >= 2");
    if (h.geometry.n < 2) throw ParseError(16, "N must be >= 2");
    if (!(std::isfinite(h.geometry.radius) && h.geometry.radius > 0.0)) throw ParseError(20, "radius must be > 0");
    if (!is_finite(h.geometry.center)) throw ParseError(28, "center must be finite");
    if (format != static_cast<std::uint32_t>(TexelFormat::Rgba8))
        throw ParseError(52, "unsupported texel format " + std::to_string(format));
    h.format = TexelFormat::Rgba8;
    return h;
}

std::vector<std::uint8_t> serialize(const LightField &field) {
    const LplfHeader header{field.geometry(), TexelFormat::Rgba8};
    const auto head = header.encode();
    const std::uint64_t payload = field.payload_bytes();
    std::vector<std::uint8_t> out(kLplfHeaderBytes + payload + kLplfTrailerBytes);
    std::memcpy(out.data(), head.data(), head.size());
    std::memcpy(out.data() + kLplfHeaderBytes, field.texels().data(), payload);
    const auto crc = crc32_of({out.data() + kLplfHeaderBytes, payload});
    put_u32(out.data() + kLplfHeaderBytes + payload, crc);
    return out;
}

LightField deserialize(std::span<const std::uint8_t> bytes) {
    const LplfHeader header = LplfHeader::decode(bytes);
    const std::uint64_t payload = header.payload_bytes();
    const std::uint64_t available = bytes.size() - kLplfHeaderBytes;
    if (available < payload + kLplfTrailerBytes) {
        const std::uint64_t got = std::min<std::uint64_t>(available, payload);
        if (available < payload)
            throw ParseError(bytes.size(), "truncated LPLF payload: expected " + std::to_string(payload) +
                                                " bytes, got " + std::to_string(got));
        throw ParseError(bytes.size(), "truncated LPLF trailer: expected 4 CRC bytes, got " +
                                            std::to_string(available - payload));
    }
    if (available > payload + kLplfTrailerBytes)
        throw ParseError(kLplfHeaderBytes + payload + kLplfTrailerBytes,
                         "trailing bytes after LPLF checksum: expected file length " +
                             std::to_string(kLplfHeaderBytes + payload + kLplfTrailerBytes) + ", got " +
                             std::to_string(bytes.size()));

    const std::span<const std::uint8_t> body = bytes.subspan(kLplfHeaderBytes, payload);
    const std::uint32_t stored = get_u32(bytes.data() + kLplfHeaderBytes + payload);
    const std::uint32_t actual = crc32_of(body);
    if (stored != actual)
        throw ParseError(kLplfHeaderBytes + payload, "LPLF payload checksum mismatch: stored " +
                                                         std::to_string(stored) + ", computed " +
                                                         std::to_string(actual));

    std::vector<Texel> texels(payload / sizeof(Texel));
    std::memcpy(texels.data(), body.data(), payload);
    return LightField(header.geometry, std::move(texels));
}

std::uint64_t save(const LightField &field, const std::filesystem::path &path) {
    const auto bytes = serialize(field);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
    return bytes.size();
}

LightField load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace sflf
