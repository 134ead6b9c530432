// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/baker.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <new>
#include <string>

#include "sflf/error.hpp"
#include "sflf/parallel.hpp"
#include "sflf/sf_core.hpp"

namespace sflf {

namespace {

constexpr double kInvPi = 1.0 / sf::kPi;

Vec3 cosine_hemisphere(const Vec3 &normal, double u1, double u2) {
    const DiskSample d = concentric_disk(u1, u2);
    const double z = std::sqrt(std::max(0.0, 1.0 - d.x * d.x - d.y * d.y));
    Vec3 t1, t2;
    tangent_frame(normal, t1, t2);
    return normalize(t1 * d.x + t2 * d.y + normal * z);
}

double power_heuristic(double pdf_a, double pdf_b) {
    const double a2 = pdf_a * pdf_a, b2 = pdf_b * pdf_b;
    return a2 + b2 > 0.0 ? a2 / (a2 + b2) : 0.0;
}

double spawn_offset(const Vec3 &p) {
    return 1e-7 * (1.0 + std::max(std::abs(p.x), std::max(std::abs(p.y), std::abs(p.z))));
}

}  // namespace

void BakeConfig::validate() const {
    geometry().validate();
    SFLF_REQUIRE(spp >= 1, "spp must be >= 1");
    SFLF_REQUIRE(max_depth >= 1, "max_depth must be >= 1");
}

double BakeConfig::disk_radius() const { return 2.0 * radius / std::sqrt(static_cast<double>(m)); }

DiskSample concentric_disk(double u1, double u2) {
    const double a = 2.0 * u1 - 1.0, b = 2.0 * u2 - 1.0;
    if (a == 0.0 && b == 0.0) return {};
    double r, theta;
    if (std::abs(a) > std::abs(b)) {
        r = a;
        theta = (sf::kPi / 4.0) * (b / a);
    } else {
        r = b;
        theta = (sf::kPi / 2.0) - (sf::kPi / 4.0) * (a / b);
    }
    return {r * std::cos(theta), r * std::sin(theta)};
}

std::optional<Ray> ray_for(std::uint32_t i, std::uint32_t j, const BakeConfig &cfg, const DiskSample &jitter) {
    if (i >= cfg.m) throw ContractViolation("origin index " + std::to_string(i) + " >= M");
    if (j >= cfg.n) throw ContractViolation("direction index " + std::to_string(j) + " >= N");
    if (cfg.hemisphere_only && !(sf::sf_z(i, cfg.m) > 0.0))
        throw ContractViolation("origin " + std::to_string(i) + " lies outside the upper hemisphere");

    const Vec3 po = sf::sf_point(i, cfg.m);
    const Vec3 pd = sf::sf_point(j, cfg.n);
    const Vec3 chord = pd - po;
    const double len = length(chord);
    if (!(len > 1e-12)) return std::nullopt;

    Vec3 origin = cfg.center + po * cfg.radius;
    if (jitter.x != 0.0 || jitter.y != 0.0) {
        Vec3 t1, t2;
        tangent_frame(po, t1, t2);
        origin += (t1 * jitter.x + t2 * jitter.y) * cfg.disk_radius();
    }
    return Ray{origin, chord / len};
}

Rgb trace(const Ray &ray, const SceneAccel &accel, Pcg32 &rng, std::uint32_t max_depth, TraceStats *stats) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const Scene &scene = accel.scene();

    auto hit = accel.intersect(ray, kInf);
    if (!hit) return scene.environment;

    Rgb radiance = scene.materials[scene.triangles[hit->triangle].material].emission;
    Rgb throughput{1.0, 1.0, 1.0};
    Ray current = ray;

    for (std::uint32_t bounce = 1; bounce <= max_depth; ++bounce) {
        const Material &mat = scene.materials[scene.triangles[hit->triangle].material];
        if (mat.albedo.is_black()) break;

        const Vec3 p = current.at(hit->t);
        Vec3 normal = hit->normal;
        if (dot(normal, current.direction) > 0.0) normal = -normal;
        const Vec3 origin = p + normal * spawn_offset(p);

        // Next-event estimation: one area sample on the emitters, combined
        // with the bounce below by the power heuristic.
        const double ul = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform();
        if (accel.has_emitters()) {
            const auto light = accel.sample_emitter(ul, u1, u2);
            const Vec3 to_light = light.point - origin;
            const double dist2 = length_squared(to_light);
            const double dist = std::sqrt(dist2);
            if (dist > 0.0) {
                const Vec3 wi = to_light / dist;
                const double cos_x = dot(normal, wi);
                const double cos_y = std::abs(dot(light.normal, wi));
                if (cos_x > 0.0 && cos_y > 0.0 &&
                    !accel.occluded(Ray{origin, wi}, dist * (1.0 - 1e-6) - spawn_offset(light.point))) {
                    const double pdf_light = light.pdf_area * dist2 / cos_y;  // solid angle
                    const double pdf_bounce = cos_x * kInvPi;
                    const double f_cos = cos_x * kInvPi;
                    radiance += throughput * mat.albedo * light.emission *
                                (f_cos / pdf_light * power_heuristic(pdf_light, pdf_bounce));
                }
            }
        }

        // Cosine-weighted bounce: f cos / pdf == albedo.
        const Vec3 wi = cosine_hemisphere(normal, rng.uniform(), rng.uniform());
        throughput = throughput * mat.albedo;
        current = Ray{origin, wi};
        hit = accel.intersect(current, kInf);
        if (!hit) {
            radiance += throughput * scene.environment;
            break;
        }
        // Emitter reached by the bounce: the other half of the light estimate.
        const Rgb &emission = scene.materials[scene.triangles[hit->triangle].material].emission;
        if (!emission.is_black()) {
            const double cos_y = std::abs(dot(hit->normal, wi));
            if (cos_y > 0.0) {
                const double pdf_light = accel.emitter_pdf_area() * hit->t * hit->t / cos_y;
                const double pdf_bounce = std::max(0.0, dot(normal, wi)) * kInvPi;
                radiance += throughput * emission * power_heuristic(pdf_bounce, pdf_light);
            }
        }
    }

    if (!is_finite(radiance) || radiance.r < 0.0 || radiance.g < 0.0 || radiance.b < 0.0) {
        if (stats) ++stats->nonfinite;
        return {};
    }
    return radiance;
}

LightField bake(const Scene &scene, const BakeConfig &cfg, const BakeOptions &options,
                BakeDiagnostics *diagnostics) {
    cfg.validate();
    scene.validate();
    if (cfg.require_containment) {
        const double reach = scene.max_distance_from(cfg.center);
        if (reach > cfg.radius * (1.0 + 1e-9))
            throw BakeError("scene extends to distance " + std::to_string(reach) +
                            " from the center, outside the bounding sphere of radius " +
                            std::to_string(cfg.radius));
    }

    const FieldGeometry geometry = cfg.geometry();
    const std::uint32_t rows = geometry.stored_rows();
    const std::uint64_t count = geometry.texel_count();
    const std::uint64_t bytes = count * sizeof(Texel);
    std::vector<Texel> texels;
    try {
        if (count > texels.max_size()) throw std::bad_alloc();
        texels.resize(count);
    } catch (const std::bad_alloc &) {
        throw BakeError("cannot allocate light field texture of " + std::to_string(bytes) + " bytes", bytes);
    }

    const SceneAccel accel(scene);
    BakeDiagnostics diag;
    diag.texels = count;
    diag.samples = count * cfg.spp;
    std::mutex mutex;
    std::uint64_t rows_done = 0;

    parallel_for(rows, options.threads, [&](unsigned, std::uint64_t row) {
        const auto i = static_cast<std::uint32_t>(row);
        TraceStats stats;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> degenerate;
        Texel *out = texels.data() + row * cfg.n;
        for (std::uint32_t j = 0; j < cfg.n; ++j) {
            if (!ray_for(i, j, cfg, {})) {
                out[j] = Texel{};
                degenerate.emplace_back(i, j);
                continue;
            }
            Rgb sum{};
            for (std::uint32_t s = 0; s < cfg.spp; ++s) {
                Pcg32 rng(hash_counters({cfg.seed, i, j, s}));
                const double u1 = rng.uniform(), u2 = rng.uniform();
                const auto ray = ray_for(i, j, cfg, concentric_disk(u1, u2));
                sum += trace(*ray, accel, rng, cfg.max_depth, &stats);
            }
            out[j] = quantize(sum / static_cast<double>(cfg.spp));
        }
        std::lock_guard lock(mutex);
        diag.nonfinite_samples += stats.nonfinite;
        diag.degenerate_texels.insert(diag.degenerate_texels.end(), degenerate.begin(), degenerate.end());
        ++rows_done;
        if (options.progress) options.progress(rows_done, rows);
    });

    std::sort(diag.degenerate_texels.begin(), diag.degenerate_texels.end());
    if (diagnostics) *diagnostics = std::move(diag);
    return LightField(geometry, std::move(texels));
}

}  // namespace sflf
