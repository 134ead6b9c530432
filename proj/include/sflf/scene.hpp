// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_SCENE_HPP
#define SFLF_SCENE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sflf/ray.hpp"
#include "sflf/vec.hpp"

namespace sflf {

// Lambertian reflector with optional (two-sided) emission.
struct Material {
    Rgb albedo{0.8, 0.8, 0.8};
    Rgb emission{};
};

struct Triangle {
    std::array<Vec3, 3> v;
    std::uint32_t material = 0;

    Vec3 normal() const { return normalize(cross(v[1] - v[0], v[2] - v[0])); }
    double area() const { return 0.5 * length(cross(v[1] - v[0], v[2] - v[0])); }
};

struct Scene {
    std::vector<Triangle> triangles;
    std::vector<Material> materials;
    Rgb environment{};  // radiance returned by escaping rays

    // Throws ContractViolation on non-finite vertices, dangling material
    // indices, albedo outside [0,1] or negative emission/environment.
    void validate() const;

    // Largest distance from `center` to any vertex (0 for an empty scene).
    double max_distance_from(const Vec3 &center) const;

    bool has_emitters() const;
};

// Wavefront-style mesh: `v x y z`, `f a b c ...` (1-based or negative
// indices, `a/b/c` forms accepted, polygons fan-triangulated) and
// `usemtl <idx>` selecting an integer material index. Other statements are
// ignored. Throws ParseError with the 1-based line number.
void parse_obj(std::istream &in, Scene &scene);

// Material sidecar, one statement per line:
//   material <idx> albedo r g b emission r g b
//   environment r g b
// Blank lines and `#` comments are ignored.
void parse_materials(std::istream &in, Scene &scene);

// Loads `mesh` and its sidecar. When `materials` is not given, the sidecar
// is looked up next to the mesh with the extension `.materials`; if none
// exists a single grey material and a white environment are used.
Scene load_scene(const std::filesystem::path &mesh,
                 const std::optional<std::filesystem::path> &materials = std::nullopt);

void write_obj(std::ostream &out, const Scene &scene);
void write_materials(std::ostream &out, const Scene &scene);

// Procedural meshes for tests and sample assets.
namespace meshes {

// Torus around the z axis. Faces wind outward.
std::vector<Triangle> torus(const Vec3 &center, double major_radius, double minor_radius, int rings,
                            int sides, std::uint32_t material);

// Subdivided icosahedron projected onto a sphere; 20 * 4^subdivisions faces.
std::vector<Triangle> icosphere(const Vec3 &center, double radius, int subdivisions, std::uint32_t material);

}  // namespace meshes

struct Hit {
    double t = 0.0;
    std::uint32_t triangle = 0;
    Vec3 normal;  // geometric, unit length, unoriented
};

// Bounding-volume hierarchy over a scene's triangles plus an area-weighted
// emitter table for light sampling. Keeps a reference to the scene.
class SceneAccel {
  public:
    explicit SceneAccel(const Scene &scene);

    const Scene &scene() const { return scene_; }

    std::optional<Hit> intersect(const Ray &ray, double t_max) const;
    bool occluded(const Ray &ray, double t_max) const;

    struct EmitterSample {
        Vec3 point;
        Vec3 normal;
        Rgb emission;
        double pdf_area;
    };
    bool has_emitters() const { return !emitters_.empty(); }
    // Area density of sample_emitter on any emissive point.
    double emitter_pdf_area() const { return emitters_.empty() ? 0.0 : 1.0 / emitter_area_; }
    // u selects the triangle, (u1, u2) the point on it.
    EmitterSample sample_emitter(double u, double u1, double u2) const;

  private:
    struct Node {
        Vec3 lo, hi;
        std::uint32_t first = 0;  // left child (inner) or first primitive (leaf)
        std::uint32_t right = 0;  // right child (inner)
        std::uint32_t count = 0;  // 0 for inner nodes
    };

    std::uint32_t build(std::uint32_t first, std::uint32_t count, int depth);
    template <bool AnyHit>
    bool traverse(const Ray &ray, double t_max, Hit *hit) const;

    const Scene &scene_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> emitters_;
    std::vector<double> emitter_cdf_;
    double emitter_area_ = 0.0;
};

}  // namespace sflf

#endif  // SFLF_SCENE_HPP
