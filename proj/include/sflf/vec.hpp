// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_VEC_HPP
#define SFLF_VEC_HPP

#include <algorithm>
#include <cmath>

namespace sflf {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 &operator+=(const Vec3 &o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s) {
        x *= s; y *= s; z *= s;
        return *this;
    }
    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(const Vec3 &a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr Vec3 operator*(double s, const Vec3 &a) { return a * s; }
constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3 &a) { return std::sqrt(dot(a, a)); }
constexpr double length_squared(const Vec3 &a) { return dot(a, a); }
inline Vec3 normalize(const Vec3 &a) { return a / length(a); }

constexpr Vec3 min(const Vec3 &a, const Vec3 &b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr Vec3 max(const Vec3 &a, const Vec3 &b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline bool is_finite(const Vec3 &a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Orthonormal tangent frame around a unit normal (Duff et al. 2017).
inline void tangent_frame(const Vec3 &n, Vec3 &t1, Vec3 &t2) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double b = n.x * n.y * a;
    t1 = {1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x};
    t2 = {b, sign + n.y * n.y * a, -n.y};
}

// Linear RGB radiance / reflectance triple.
struct Rgb {
    double r = 0.0, g = 0.0, b = 0.0;

    constexpr Rgb() = default;
    constexpr Rgb(double r_, double g_, double b_) : r(r_), g(g_), b(b_) {}

    constexpr Rgb &operator+=(const Rgb &o) {
        r += o.r; g += o.g; b += o.b;
        return *this;
    }
    friend constexpr bool operator==(const Rgb &, const Rgb &) = default;
    constexpr bool is_black() const { return r == 0.0 && g == 0.0 && b == 0.0; }
    constexpr double max_component() const { return std::max(r, std::max(g, b)); }
};

constexpr Rgb operator+(const Rgb &a, const Rgb &b) { return {a.r + b.r, a.g + b.g, a.b + b.b}; }
constexpr Rgb operator-(const Rgb &a, const Rgb &b) { return {a.r - b.r, a.g - b.g, a.b - b.b}; }
constexpr Rgb operator*(const Rgb &a, const Rgb &b) { return {a.r * b.r, a.g * b.g, a.b * b.b}; }
constexpr Rgb operator*(const Rgb &a, double s) { return {a.r * s, a.g * s, a.b * s}; }
constexpr Rgb operator*(double s, const Rgb &a) { return a * s; }
constexpr Rgb operator/(const Rgb &a, double s) { return {a.r / s, a.g / s, a.b / s}; }

inline bool is_finite(const Rgb &c) {
    return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b);
}

}  // namespace sflf

#endif  // SFLF_VEC_HPP
