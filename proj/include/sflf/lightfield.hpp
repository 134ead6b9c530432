// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_LIGHTFIELD_HPP
#define SFLF_LIGHTFIELD_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sflf/vec.hpp"

namespace sflf {

enum class TexelFormat : std::uint32_t {
    Rgba8 = 0,
    Rgba32F = 1,  // reserved; not readable or writable yet
};

// One stored radiance sample: linear RGB quantised to 8 bits, alpha = 255
// for a valid texel and 0 for a texel the bake could not produce.
struct Texel {
    std::uint8_t r = 0, g = 0, b = 0, a = 0;
    friend constexpr bool operator==(const Texel &, const Texel &) = default;
};

Texel quantize(const Rgb &linear);
Rgb dequantize(const Texel &t);

// Sphere and lattice parameters shared by the baker and the light field.
struct FieldGeometry {
    std::uint32_t m = 0;  // origin lattice cardinality
    std::uint32_t n = 0;  // direction lattice cardinality
    double radius = 1.0;
    Vec3 center{};
    bool hemisphere_only = false;

    // Origins with z > 0 are exactly indices [0, m/2) since z_i is strictly
    // decreasing; a hemisphere field stores only those rows.
    std::uint32_t stored_rows() const { return hemisphere_only ? m / 2 : m; }
    std::uint64_t texel_count() const { return std::uint64_t{stored_rows()} * n; }
    void validate() const;
};

// Baked two-index radiance table L(i, j): i over stored origin lattice
// points, j over direction lattice points. Immutable after construction.
class LightField {
  public:
    LightField(const FieldGeometry &geometry, std::vector<Texel> texels);

    const FieldGeometry &geometry() const { return geometry_; }
    std::uint32_t m() const { return geometry_.m; }
    std::uint32_t n() const { return geometry_.n; }
    double radius() const { return geometry_.radius; }
    const Vec3 &center() const { return geometry_.center; }
    bool hemisphere_only() const { return geometry_.hemisphere_only; }
    std::uint32_t stored_rows() const { return geometry_.stored_rows(); }
    bool row_stored(std::uint32_t i) const { return i < geometry_.stored_rows(); }

    // Direct access; i must be a stored row and j < n.
    const Texel &texel(std::uint32_t i, std::uint32_t j) const {
        return texels_[std::size_t{i} * geometry_.n + j];
    }
    // Texture-style lookup: rows that were not baked read as empty.
    std::optional<Texel> fetch(std::uint32_t i, std::uint32_t j) const {
        if (!row_stored(i)) return std::nullopt;
        return texel(i, j);
    }

    std::span<const Texel> texels() const { return texels_; }
    std::uint64_t payload_bytes() const { return texels_.size() * sizeof(Texel); }

  private:
    FieldGeometry geometry_;
    std::vector<Texel> texels_;
};

// --- LPLF container --------------------------------------------------------
//
// Little-endian:
//   offset  0  magic "LPLF"
//           4  u32 version (1)
//           8  u32 flags (bit 0: hemisphere_only)
//          12  u32 M
//          16  u32 N
//          20  f64 R
//          28  f64 O.x, O.y, O.z
//          52  u32 texel format (0: RGBA8)
//          56  payload, stored_rows * N * 4 bytes, origin-major
//     56 + P   u32 CRC-32 (zlib polynomial) of the payload

inline constexpr std::uint32_t kLplfVersion = 1;
inline constexpr std::size_t kLplfHeaderBytes = 56;
inline constexpr std::size_t kLplfTrailerBytes = 4;

struct LplfHeader {
    FieldGeometry geometry;
    TexelFormat format = TexelFormat::Rgba8;

    std::uint64_t payload_bytes() const;
    std::array<std::uint8_t, kLplfHeaderBytes> encode() const;
    // Throws ParseError naming the offending offset.
    static LplfHeader decode(std::span<const std::uint8_t> bytes);
};

// Payload length of a field with the given shape.
std::uint64_t lplf_payload_bytes(std::uint32_t m, std::uint32_t n, bool hemisphere_only,
                                 TexelFormat format = TexelFormat::Rgba8);

std::vector<std::uint8_t> serialize(const LightField &field);
LightField deserialize(std::span<const std::uint8_t> bytes);

// Returns the number of bytes written.
std::uint64_t save(const LightField &field, const std::filesystem::path &path);
LightField load(const std::filesystem::path &path);

}  // namespace sflf

#endif  // SFLF_LIGHTFIELD_HPP
