// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "sflf/error.hpp"

namespace sflf {

namespace {

bool in_unit_range(const Rgb &c) {
    return c.r >= 0.0 && c.r <= 1.0 && c.g >= 0.0 && c.g <= 1.0 && c.b >= 0.0 && c.b <= 1.0;
}
bool non_negative(const Rgb &c) {
    return is_finite(c) && c.r >= 0.0 && c.g >= 0.0 && c.b >= 0.0;
}

std::string strip_comment(const std::string &line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

Rgb read_rgb(std::istringstream &ss, std::uint64_t line_no, const char *what) {
    Rgb c;
    if (!(ss >> c.r >> c.g >> c.b)) throw ParseError(line_no, std::string("expected three numbers after '") + what + "'");
    return c;
}

}  // namespace

void Scene::validate() const {
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto &tri = triangles[t];
        for (const auto &v : tri.v)
            if (!is_finite(v)) throw ContractViolation("triangle " + std::to_string(t) + " has a non-finite vertex");
        if (tri.material >= materials.size())
            throw ContractViolation("triangle " + std::to_string(t) + " references undefined material " +
                                    std::to_string(tri.material));
    }
    for (std::size_t m = 0; m < materials.size(); ++m) {
        if (!in_unit_range(materials[m].albedo))
            throw ContractViolation("material " + std::to_string(m) + " albedo outside [0,1]");
        if (!non_negative(materials[m].emission))
            throw ContractViolation("material " + std::to_string(m) + " has negative or non-finite emission");
    }
    if (!non_negative(environment)) throw ContractViolation("environment radiance must be finite and >= 0");
}

double Scene::max_distance_from(const Vec3 &center) const {
    double d = 0.0;
    for (const auto &tri : triangles)
        for (const auto &v : tri.v) d = std::max(d, length(v - center));
    return d;
}

bool Scene::has_emitters() const {
    for (const auto &tri : triangles)
        if (tri.material < materials.size() && !materials[tri.material].emission.is_black()) return true;
    return false;
}

void parse_obj(std::istream &in, Scene &scene) {
    std::vector<Vec3> vertices;
    std::uint32_t material = 0;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(strip_comment(line));
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z)) throw ParseError(line_no, "malformed vertex");
            vertices.push_back(v);
        } else if (keyword == "f") {
            std::vector<std::size_t> face;
            std::string token;
            while (ss >> token) {
                const std::string head = token.substr(0, token.find('/'));
                long long idx = 0;
                try {
                    std::size_t used = 0;
                    idx = std::stoll(head, &used);
                    if (used != head.size()) throw std::invalid_argument(head);
                } catch (const std::exception &) {
                    throw ParseError(line_no, "malformed face index '" + token + "'");
                }
                const long long resolved = idx < 0 ? static_cast<long long>(vertices.size()) + idx : idx - 1;
                if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(vertices.size()))
                    throw ParseError(line_no, "face index " + std::to_string(idx) + " out of range");
                face.push_back(static_cast<std::size_t>(resolved));
            }
            if (face.size() < 3) throw ParseError(line_no, "face with fewer than three vertices");
            for (std::size_t k = 1; k + 1 < face.size(); ++k)
                scene.triangles.push_back({{vertices[face[0]], vertices[face[k]], vertices[face[k + 1]]}, material});
        } else if (keyword == "usemtl") {
            std::string name;
            ss >> name;
            try {
                std::size_t used = 0;
                const unsigned long idx = std::stoul(name, &used);
                if (used != name.size()) throw std::invalid_argument(name);
                material = static_cast<std::uint32_t>(idx);
            } catch (const std::exception &) {
                throw ParseError(line_no, "usemtl expects an integer material index, got '" + name + "'");
            }
        }
        // vt, vn, o, g, s, mtllib and friends carry nothing we use.
    }
}

void parse_materials(std::istream &in, Scene &scene) {
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(strip_comment(line));
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword == "material") {
            long long idx = -1;
            std::string tag;
            if (!(ss >> idx) || idx < 0) throw ParseError(line_no, "material index must be a non-negative integer");
            Material m;
            if (!(ss >> tag) || tag != "albedo") throw ParseError(line_no, "expected 'albedo'");
            m.albedo = read_rgb(ss, line_no, "albedo");
            if (!(ss >> tag) || tag != "emission") throw ParseError(line_no, "expected 'emission'");
            m.emission = read_rgb(ss, line_no, "emission");
            if (scene.materials.size() <= static_cast<std::size_t>(idx)) scene.materials.resize(idx + 1);
            scene.materials[idx] = m;
        } else if (keyword == "environment") {
            scene.environment = read_rgb(ss, line_no, "environment");
        } else {
            throw ParseError(line_no, "unknown statement '" + keyword + "'");
        }
    }
}

Scene load_scene(const std::filesystem::path &mesh, const std::optional<std::filesystem::path> &materials) {
    Scene scene;
    std::ifstream obj(mesh);
    if (!obj) throw std::runtime_error("cannot open mesh " + mesh.string());
    parse_obj(obj, scene);

    auto sidecar = materials.value_or(std::filesystem::path(mesh).replace_extension(".materials"));
    if (std::ifstream mats(sidecar); mats) {
        parse_materials(mats, scene);
    } else if (materials) {
        throw std::runtime_error("cannot open material table " + sidecar.string());
    } else {
        scene.materials = {Material{}};
        scene.environment = {1.0, 1.0, 1.0};
    }
    scene.validate();
    return scene;
}

void write_obj(std::ostream &out, const Scene &scene) {
    out.precision(17);
    std::uint32_t current = std::numeric_limits<std::uint32_t>::max();
    std::size_t next_vertex = 1;
    for (const auto &tri : scene.triangles) {
        if (tri.material != current) {
            current = tri.material;
            out << "usemtl " << current << '\n';
        }
        for (const auto &v : tri.v) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
        out << "f " << next_vertex << ' ' << next_vertex + 1 << ' ' << next_vertex + 2 << '\n';
        next_vertex += 3;
    }
}

void write_materials(std::ostream &out, const Scene &scene) {
    out.precision(17);
    for (std::size_t m = 0; m < scene.materials.size(); ++m) {
        const auto &mat = scene.materials[m];
        out << "material " << m << " albedo " << mat.albedo.r << ' ' << mat.albedo.g << ' ' << mat.albedo.b
            << " emission " << mat.emission.r << ' ' << mat.emission.g << ' ' << mat.emission.b << '\n';
    }
    out << "environment " << scene.environment.r << ' ' << scene.environment.g << ' ' << scene.environment.b
        << '\n';
}

namespace meshes {

std::vector<Triangle> torus(const Vec3 &center, double major_radius, double minor_radius, int rings, int sides,
                            std::uint32_t material) {
    constexpr double kTwoPi = 6.28318530717958647692;
    auto point = [&](int r, int s) {
        const double u = kTwoPi * (r % rings) / rings;
        const double v = kTwoPi * (s % sides) / sides;
        const double w = major_radius + minor_radius * std::cos(v);
        return center + Vec3{w * std::cos(u), w * std::sin(u), minor_radius * std::sin(v)};
    };
    std::vector<Triangle> tris;
    tris.reserve(static_cast<std::size_t>(2 * rings * sides));
    for (int r = 0; r < rings; ++r) {
        for (int s = 0; s < sides; ++s) {
            const Vec3 a = point(r, s), b = point(r + 1, s), c = point(r + 1, s + 1), d = point(r, s + 1);
            tris.push_back({{a, b, c}, material});
            tris.push_back({{a, c, d}, material});
        }
    }
    return tris;
}

std::vector<Triangle> icosphere(const Vec3 &center, double radius, int subdivisions, std::uint32_t material) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<Vec3, 3>> faces;
    const int idx[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                            {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                            {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (const auto &f : idx) faces.push_back({normalize(v[f[0]]), normalize(v[f[1]]), normalize(v[f[2]])});
    for (int s = 0; s < subdivisions; ++s) {
        std::vector<std::array<Vec3, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto &f : faces) {
            const Vec3 ab = normalize(f[0] + f[1]), bc = normalize(f[1] + f[2]), ca = normalize(f[2] + f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    std::vector<Triangle> tris;
    tris.reserve(faces.size());
    for (const auto &f : faces)
        tris.push_back({{center + f[0] * radius, center + f[1] * radius, center + f[2] * radius}, material});
    return tris;
}

}  // namespace meshes

// --- SceneAccel ----------------------------------------------------------

namespace {

constexpr int kBins = 12;
constexpr std::uint32_t kLeafSize = 4;

struct Bounds {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void grow(const Vec3 &p) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
    void grow(const Bounds &b) {
        lo = min(lo, b.lo);
        hi = max(hi, b.hi);
    }
    double area() const {
        const Vec3 d = hi - lo;
        if (d.x < 0.0) return 0.0;
        return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
    }
};

Bounds triangle_bounds(const Triangle &t) {
    Bounds b;
    for (const auto &v : t.v) b.grow(v);
    return b;
}

Vec3 centroid(const Triangle &t) { return (t.v[0] + t.v[1] + t.v[2]) / 3.0; }

bool hit_box(const Vec3 &lo, const Vec3 &hi, const Vec3 &origin, const Vec3 &inv_dir, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double tn = (lo[a] - origin[a]) * inv_dir[a];
        double tf = (hi[a] - origin[a]) * inv_dir[a];
        if (tn > tf) std::swap(tn, tf);
        // NaN from 0 * inf keeps the current interval.
        t0 = tn > t0 ? tn : t0;
        t1 = tf < t1 ? tf : t1;
        if (t0 > t1) return false;
    }
    return true;
}

// Moller-Trumbore. Returns t or a negative value on miss.
double hit_triangle(const Triangle &tri, const Ray &ray, double t_max) {
    constexpr double kEps = 1e-12;
    const Vec3 e1 = tri.v[1] - tri.v[0];
    const Vec3 e2 = tri.v[2] - tri.v[0];
    const Vec3 pv = cross(ray.direction, e2);
    const double det = dot(e1, pv);
    if (std::abs(det) < kEps) return -1.0;
    const double inv = 1.0 / det;
    const Vec3 tv = ray.origin - tri.v[0];
    const double u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return -1.0;
    const Vec3 qv = cross(tv, e1);
    const double v = dot(ray.direction, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return -1.0;
    const double t = dot(e2, qv) * inv;
    return (t > 0.0 && t < t_max) ? t : -1.0;
}

}  // namespace

SceneAccel::SceneAccel(const Scene &scene) : scene_(scene) {
    order_.resize(scene.triangles.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!order_.empty()) {
        nodes_.reserve(2 * order_.size());
        build(0, static_cast<std::uint32_t>(order_.size()), 0);
    }

    for (std::uint32_t t = 0; t < scene.triangles.size(); ++t) {
        const auto &tri = scene.triangles[t];
        if (tri.material >= scene.materials.size() || scene.materials[tri.material].emission.is_black()) continue;
        const double a = tri.area();
        if (!(a > 0.0)) continue;
        emitters_.push_back(t);
        emitter_area_ += a;
        emitter_cdf_.push_back(emitter_area_);
    }
    for (auto &c : emitter_cdf_) c /= emitter_area_;
}

std::uint32_t SceneAccel::build(std::uint32_t first, std::uint32_t count, int depth) {
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});

    Bounds bounds, centroids;
    for (std::uint32_t k = first; k < first + count; ++k) {
        const auto &tri = scene_.triangles[order_[k]];
        bounds.grow(triangle_bounds(tri));
        centroids.grow(centroid(tri));
    }
    nodes_[node_index].lo = bounds.lo;
    nodes_[node_index].hi = bounds.hi;

    auto make_leaf = [&] {
        nodes_[node_index].first = first;
        nodes_[node_index].count = count;
        return node_index;
    };
    if (count <= kLeafSize || depth > 60) return make_leaf();

    // Binned SAH over the widest centroid axis.
    const Vec3 extent = centroids.hi - centroids.lo;
    int axis = 0;
    if (extent.y > extent[axis]) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    if (!(extent[axis] > 0.0)) return make_leaf();

    struct Bin {
        Bounds b;
        std::uint32_t n = 0;
    };
    std::array<Bin, kBins> bins{};
    const double scale = kBins / extent[axis];
    auto bin_of = [&](std::uint32_t tri) {
        const int b = static_cast<int>((centroid(scene_.triangles[tri])[axis] - centroids.lo[axis]) * scale);
        return std::clamp(b, 0, kBins - 1);
    };
    for (std::uint32_t k = first; k < first + count; ++k) {
        auto &bin = bins[bin_of(order_[k])];
        bin.b.grow(triangle_bounds(scene_.triangles[order_[k]]));
        ++bin.n;
    }
    double best_cost = std::numeric_limits<double>::infinity();
    int best_split = -1;
    for (int split = 1; split < kBins; ++split) {
        Bounds left, right;
        std::uint32_t nl = 0, nr = 0;
        for (int b = 0; b < split; ++b) {
            left.grow(bins[b].b);
            nl += bins[b].n;
        }
        for (int b = split; b < kBins; ++b) {
            right.grow(bins[b].b);
            nr += bins[b].n;
        }
        if (nl == 0 || nr == 0) continue;
        const double cost = left.area() * nl + right.area() * nr;
        if (cost < best_cost) {
            best_cost = cost;
            best_split = split;
        }
    }
    if (best_split < 0 || best_cost >= bounds.area() * count) {
        if (count <= 4 * kLeafSize || best_split < 0) return make_leaf();
    }

    auto mid_it = std::partition(order_.begin() + first, order_.begin() + first + count,
                                 [&](std::uint32_t tri) { return bin_of(tri) < best_split; });
    const auto mid = static_cast<std::uint32_t>(mid_it - order_.begin());
    const std::uint32_t left = build(first, mid - first, depth + 1);
    const std::uint32_t right = build(mid, first + count - mid, depth + 1);
    nodes_[node_index].first = left;
    nodes_[node_index].right = right;
    nodes_[node_index].count = 0;
    return node_index;
}

template <bool AnyHit>
bool SceneAccel::traverse(const Ray &ray, double t_max, Hit *hit) const {
    if (nodes_.empty()) return false;
    const Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    std::array<std::uint32_t, 128> stack;
    int top = 0;
    stack[top++] = 0;
    bool found = false;
    while (top > 0) {
        const Node &node = nodes_[stack[--top]];
        if (!hit_box(node.lo, node.hi, ray.origin, inv_dir, t_max)) continue;
        if (node.count == 0) {
            stack[top++] = node.right;
            stack[top++] = node.first;
            continue;
        }
        for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
            const double t = hit_triangle(scene_.triangles[order_[k]], ray, t_max);
            if (t < 0.0) continue;
            if constexpr (AnyHit) return true;
            found = true;
            t_max = t;
            hit->t = t;
            hit->triangle = order_[k];
        }
    }
    if (found) hit->normal = scene_.triangles[hit->triangle].normal();
    return found;
}

std::optional<Hit> SceneAccel::intersect(const Ray &ray, double t_max) const {
    Hit hit;
    if (!traverse<false>(ray, t_max, &hit)) return std::nullopt;
    return hit;
}

bool SceneAccel::occluded(const Ray &ray, double t_max) const { return traverse<true>(ray, t_max, nullptr); }

SceneAccel::EmitterSample SceneAccel::sample_emitter(double u, double u1, double u2) const {
    const auto it = std::lower_bound(emitter_cdf_.begin(), emitter_cdf_.end(), u);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - emitter_cdf_.begin()), emitters_.size() - 1);
    const Triangle &tri = scene_.triangles[emitters_[k]];
    // Uniform point on the triangle.
    const double su = std::sqrt(u1);
    const double b0 = 1.0 - su, b1 = u2 * su;
    const Vec3 p = tri.v[0] * b0 + tri.v[1] * b1 + tri.v[2] * (1.0 - b0 - b1);
    return {p, tri.normal(), scene_.materials[tri.material].emission, 1.0 / emitter_area_};
}

}  // namespace sflf
