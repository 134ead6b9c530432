// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_SF_CORE_HPP
#define SFLF_SF_CORE_HPP

#include <algorithm>
#include <array>
#include <cstdint>

#include "sflf/vec.hpp"

// Spherical Fibonacci point sets.
//
// Point i of an n-point set sits at
//
//     phi_i = 2 pi frac(i / Phi),   z_i = 1 - (2 i + 1) / n
//
// and is never stored: every query recomputes the handful of points it
// touches from (i, n). Nearest-neighbour queries locate the local Fibonacci
// lattice cell of the query direction and scan a fixed-size window of
// lattice points around it, so a query costs the same for n = 10^3 and
// n = 10^7. Distances are chordal (Euclidean in R^3).
namespace sflf::sf {

inline constexpr double kGoldenRatio = 1.61803398874989484820458683436563812;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Largest k accepted by neighbors_k.
inline constexpr int kMaxNeighbors = 9;

// Tolerance on |p| - 1 for query directions.
inline constexpr double kUnitTolerance = 1e-6;

struct Neighbor {
    std::uint32_t index = 0;
    double distance = 0.0;  // chordal
};

// Fixed-capacity, ascending-by-distance neighbour list (ties: smaller index
// first). Never allocates.
class NeighborList {
  public:
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    const Neighbor &operator[](std::size_t k) const { return items_[k]; }
    const Neighbor *begin() const { return items_.data(); }
    const Neighbor *end() const { return items_.data() + count_; }

    void push_back(const Neighbor &nb) { items_[count_++] = nb; }

  private:
    std::array<Neighbor, kMaxNeighbors> items_{};
    std::size_t count_ = 0;
};

// i-th point of the n-point set. Throws ContractViolation unless i < n.
Vec3 sf_point(std::uint32_t i, std::uint32_t n);

// z-coordinate of point i, 1 - (2i+1)/n.
double sf_z(std::uint32_t i, std::uint32_t n);

// Index of the lattice point closest to the unit vector p (ties: smallest
// index). Throws ContractViolation if n == 0 or | |p| - 1 | > 1e-6.
std::uint32_t inverse_nearest(const Vec3 &p, std::uint32_t n);

// The k nearest lattice points to p, 1 <= k <= 9. If n < k, all n points
// are returned.
NeighborList neighbors_k(const Vec3 &p, std::uint32_t n, int k);

// Filter support radius R * 5^(1/4) * sqrt(4 pi / (sqrt(5) n)), which is the
// typical lattice spacing of an n-point set on a sphere of radius R.
double kernel_radius(std::uint32_t n, double radius);

// Tent kernel max(0, 1 - d/h): 1 at d = 0, 0 for d >= h.
inline double kernel_weight(double distance, double support) {
    return std::max(0.0, 1.0 - distance / support);
}

// Value wrapper for a point set of fixed cardinality.
class SfPointSet {
  public:
    explicit SfPointSet(std::uint32_t n);

    std::uint32_t size() const { return n_; }
    Vec3 point(std::uint32_t i) const { return sf_point(i, n_); }
    std::uint32_t nearest(const Vec3 &p) const { return inverse_nearest(p, n_); }
    NeighborList neighbors(const Vec3 &p, int k) const { return neighbors_k(p, n_, k); }
    double kernel_radius(double radius) const { return sf::kernel_radius(n_, radius); }

  private:
    std::uint32_t n_;
};

}  // namespace sflf::sf

#endif  // SFLF_SF_CORE_HPP
