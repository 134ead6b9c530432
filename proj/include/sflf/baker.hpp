// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_BAKER_HPP
#define SFLF_BAKER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sflf/lightfield.hpp"
#include "sflf/ray.hpp"
#include "sflf/rng.hpp"
#include "sflf/scene.hpp"

namespace sflf {

struct BakeConfig {
    std::uint32_t m = 1024;  // origins
    std::uint32_t n = 2048;  // directions
    double radius = 1.0;
    Vec3 center{};
    bool hemisphere_only = false;
    std::uint32_t spp = 64;
    std::uint32_t max_depth = 5;  // diffuse bounces
    std::uint64_t seed = 0;
    // Geometry must lie inside the sphere for radiance to be constant along
    // rays outside it. Closed enclosures around the sphere (furnace setups)
    // opt out.
    bool require_containment = true;

    void validate() const;
    FieldGeometry geometry() const { return {m, n, radius, center, hemisphere_only}; }
    // Jitter disk radius: a disk of area 4 pi R^2 / M.
    double disk_radius() const;
};

// A point in the unit disk, used to jitter ray origins.
struct DiskSample {
    double x = 0.0, y = 0.0;
};

// Uniform unit-disk sample from two uniforms (concentric mapping).
DiskSample concentric_disk(double u1, double u2);

// Camera ray of texel (i, j): origin O + R p_i (M-set) displaced by
// disk_radius * jitter in the tangent plane at p_i, direction toward p_j
// (N-set) from the unjittered origin. Returns nullopt when p_i == p_j.
// Throws ContractViolation for out-of-range indices or, for hemisphere
// bakes, a lower-hemisphere origin.
std::optional<Ray> ray_for(std::uint32_t i, std::uint32_t j, const BakeConfig &cfg, const DiskSample &jitter);

struct TraceStats {
    std::uint64_t nonfinite = 0;  // samples clamped to zero
};

// Unidirectional path tracer: Lambertian surfaces, cosine-weighted bounces,
// fixed bounce limit. Direct light at each bounce vertex combines one
// emitter area sample with the bounce ray by the power heuristic. Emission
// seen directly by `ray` is included unweighted. Escaping rays return the
// environment.
Rgb trace(const Ray &ray, const SceneAccel &accel, Pcg32 &rng, std::uint32_t max_depth,
          TraceStats *stats = nullptr);

struct BakeDiagnostics {
    std::uint64_t texels = 0;
    std::uint64_t samples = 0;
    std::uint64_t nonfinite_samples = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> degenerate_texels;  // written as zero, alpha 0
};

struct BakeOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    // Called with (rows done, total rows); may be invoked from any worker,
    // calls are serialised.
    std::function<void(std::uint64_t, std::uint64_t)> progress;
};

class BakeError : public std::runtime_error {
  public:
    BakeError(const std::string &what, std::uint64_t required_bytes = 0)
        : std::runtime_error(what), required_bytes_(required_bytes) {}
    std::uint64_t required_bytes() const noexcept { return required_bytes_; }

  private:
    std::uint64_t required_bytes_;
};

// Texel (i, j) is the mean of cfg.spp traced samples, each with its own
// origin jitter. Sample s of texel (i, j) draws from a stream keyed by
// (seed, i, j, s), so results do not depend on the thread count.
LightField bake(const Scene &scene, const BakeConfig &cfg, const BakeOptions &options = {},
                BakeDiagnostics *diagnostics = nullptr);

}  // namespace sflf

#endif  // SFLF_BAKER_HPP
