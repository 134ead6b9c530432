// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/sf_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sflf/error.hpp"

namespace sflf::sf {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInvPhi = kGoldenRatio - 1.0;  // 1/Phi == Phi - 1
const double kSqrt5 = std::sqrt(5.0);
const double kLogPhiSquared = std::log(kGoldenRatio * kGoldenRatio);

// Half-width W of the lattice window scanned around the query cell. The
// window covers lattice coordinates floor(c) - W .. floor(c) + 1 + W in both
// basis directions, so it holds every lattice point whose offset from the
// query is below W + 1 in each coordinate. Over 1.5e7 probes (random, near
// lattice points, at level switches and at the pole band edge, n from 100 to
// 3e6) the k-th neighbour's largest offset was 0.73 for k = 1, 1.77 for
// k <= 5 and 2.49 for k <= 9.
constexpr int window_for(int k) { return k == 1 ? 0 : k <= 5 ? 1 : 2; }
constexpr int kMaxWindow = 2;

// Queries whose continuous band index (1 - z) n / 2 - 1/2 lies within
// kPoleBand of either end of the index range are answered by a linear scan
// over the kPoleScan points nearest to that pole. Near the poles the local
// lattice basis degenerates, but a polar cap holds only O(1) points.
constexpr double kPoleBand = 24.0;
constexpr std::uint32_t kPoleScan = 160;

constexpr int kFibCount = 64;
constexpr std::array<std::int64_t, kFibCount> make_fibonacci() {
    std::array<std::int64_t, kFibCount> f{};
    f[0] = 0;
    f[1] = 1;
    for (int k = 2; k < kFibCount; ++k) f[k] = f[k - 1] + f[k - 2];
    return f;
}
constexpr auto kFibonacci = make_fibonacci();

double fractional(double x) { return x - std::floor(x); }

// Azimuth of lattice index i (any integer; the lattice extends past [0, n)).
double azimuth(std::int64_t i) { return kTwoPi * fractional(static_cast<double>(i) * kInvPhi); }

double z_of(std::int64_t i, std::uint32_t n) {
    return 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
}

struct Candidate {
    std::uint32_t index;
    double d2;
};

constexpr bool precedes(double d2, std::uint32_t index, const Candidate &c) {
    return d2 < c.d2 || (d2 == c.d2 && index < c.index);
}

// Sorted buffer of the best k candidates seen so far.
class TopK {
  public:
    explicit TopK(int k) : k_(k) {}

    void offer(std::uint32_t index, double d2) {
        if (count_ == k_ && !precedes(d2, index, items_[k_ - 1])) return;
        int pos = count_ < k_ ? count_++ : k_ - 1;
        while (pos > 0 && precedes(d2, index, items_[pos - 1])) {
            items_[pos] = items_[pos - 1];
            --pos;
        }
        items_[pos] = {index, d2};
    }

    int size() const { return count_; }
    int capacity() const { return k_; }
    const Candidate &operator[](int k) const { return items_[k]; }

    // True if no point at squared distance >= d2 can enter the buffer. A
    // tie with the current worst can still win on index, so the test is
    // strict.
    bool excludes(double d2) const { return count_ == k_ && d2 > items_[k_ - 1].d2; }

  private:
    std::array<Candidate, kMaxNeighbors> items_{};
    int k_;
    int count_ = 0;
};

struct Rotation {
    double c = 1.0, s = 0.0;
};
constexpr Rotation compose(const Rotation &a, const Rotation &b) {
    return {a.c * b.c - a.s * b.s, a.s * b.c + a.c * b.s};
}

// Points [first, first + count) of one polar cap. Like lattice windows they
// depend only on n, so each thread keeps the caps it used last.
struct CapPoints {
    std::uint32_t n = 0, first = 0, count = 0;
    std::array<double, kPoleScan> x{}, y{}, z{};
};

const CapPoints &cap_points(std::uint32_t n, std::uint32_t first, std::uint32_t count) {
    thread_local std::array<CapPoints, 4> slots;
    thread_local std::size_t next = 0;
    for (const CapPoints &cap : slots)
        if (cap.n == n && cap.first == first && cap.count == count) return cap;
    CapPoints &cap = slots[next];
    next = (next + 1) % slots.size();
    cap.n = n;
    cap.first = first;
    cap.count = count;
    const double phi0 = azimuth(first);
    Rotation rot{std::cos(phi0), std::sin(phi0)};
    const Rotation step{std::cos(kTwoPi * kInvPhi), std::sin(kTwoPi * kInvPhi)};
    for (std::uint32_t c = 0; c < count; ++c) {
        const double z = z_of(first + c, n);
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - z * z));
        cap.x[c] = sin_theta * rot.c;
        cap.y[c] = sin_theta * rot.s;
        cap.z[c] = z;
        rot = compose(rot, step);
    }
    return cap;
}

// Linear scan over a polar cap. Heights fall with the index, so once a point
// below the query is ruled out by its height difference alone, so is every
// later one. Since fl(a + b) >= b for a >= 0, a point whose dz * dz already
// exceeds the k-th best squared distance cannot enter the buffer.
void scan_cap(const Vec3 &p, std::uint32_t n, std::uint32_t first, std::uint32_t count, TopK &best) {
    const CapPoints &cap = cap_points(n, first, count);
    for (std::uint32_t c = 0; c < count; ++c) {
        const double dz = cap.z[c] - p.z;
        const double dz2 = dz * dz;
        if (best.excludes(dz2)) {
            if (dz < 0.0) break;
            continue;
        }
        const double dx = cap.x[c] - p.x;
        const double dy = cap.y[c] - p.y;
        best.offer(first + c, dx * dx + dy * dy + dz2);
    }
}

constexpr int span_of(int window) { return 2 * window + 2; }
constexpr int kMaxSpan = span_of(kMaxWindow);

// Cells of a window sorted by distance from its centre.
template <int Window>
constexpr auto window_order() {
    constexpr int span = span_of(Window);
    std::array<std::pair<int, int>, span * span> cells{};
    int count = 0;
    for (int a = 0; a < span; ++a)
        for (int b = 0; b < span; ++b) cells[count++] = {a, b};
    const auto ring = [](const std::pair<int, int> &c) {
        const int da = 2 * c.first - (span - 1), db = 2 * c.second - (span - 1);
        return da * da + db * db;
    };
    for (int k = 1; k < count; ++k)
        for (int m = k; m > 0 && ring(cells[m]) < ring(cells[m - 1]); --m) std::swap(cells[m], cells[m - 1]);
    return cells;
}

// Per-level lattice data that depends only on the Fibonacci level k.
struct LatticeLevel {
    double b00 = 0.0, b01 = 0.0;
    Rotation unit0;
    std::array<Rotation, kMaxSpan> step1{};
};

const std::array<LatticeLevel, kFibCount> &lattice_levels() {
    static const auto levels = [] {
        std::array<LatticeLevel, kFibCount> out{};
        for (int k = 2; k < kFibCount - 1; ++k) {
            // F_k / Phi - F_{k-1} = (-1)^(k+1) Phi^-k exactly; this is the
            // signed azimuth offset (in turns) of an index step of F_k.
            const double turn0 = ((k % 2) ? 1.0 : -1.0) * std::pow(kGoldenRatio, -k);
            const double turn1 = -turn0 * kInvPhi;
            LatticeLevel &level = out[k];
            level.b00 = kTwoPi * turn0;
            level.b01 = kTwoPi * turn1;
            const Rotation unit1{std::cos(level.b01), std::sin(level.b01)};
            level.step1[0] = Rotation{1.0, 0.0};
            for (int b = 1; b < kMaxSpan; ++b) level.step1[b] = compose(level.step1[b - 1], unit1);
            level.unit0 = {std::cos(level.b00), std::sin(level.b00)};
        }
        return out;
    }();
    return levels;
}

// Points of one lattice window in centre-first order, out-of-range indices
// dropped. Depends only on (n, level, window, base), never on the query.
struct WindowPoints {
    std::uint32_t n = 0;
    int level = -1;
    int window = -1;
    std::int64_t base = 0;
    int count = 0;
    std::array<std::uint32_t, kMaxSpan * kMaxSpan> index{};
    std::array<double, kMaxSpan * kMaxSpan> x{}, y{}, z{};
};

template <int Window>
void fill_window(WindowPoints &w, std::int64_t f0, std::int64_t f1, const LatticeLevel &level) {
    constexpr int span = span_of(Window);
    static constexpr auto order = window_order<Window>();
    const double phi_base = azimuth(w.base);
    std::array<Rotation, span> rows;
    std::array<std::int64_t, span> row_start, column_step;
    rows[0] = {std::cos(phi_base), std::sin(phi_base)};
    for (int a = 1; a < span; ++a) rows[a] = compose(rows[a - 1], level.unit0);
    for (int a = 0; a < span; ++a) {
        row_start[a] = w.base + a * f0;
        column_step[a] = a * f1;
    }
    w.count = 0;
    for (const auto &[a, b] : order) {
        const std::int64_t i = row_start[a] + column_step[b];
        if (i < 0 || i >= static_cast<std::int64_t>(w.n)) continue;
        const double z = z_of(i, w.n);
        const Rotation rot = compose(rows[a], level.step1[b]);
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - z * z));
        w.index[w.count] = static_cast<std::uint32_t>(i);
        w.x[w.count] = sin_theta * rot.c;
        w.y[w.count] = sin_theta * rot.s;
        w.z[w.count] = z;
        ++w.count;
    }
}

// Neighbouring pixels almost always fall in the same window, so each thread
// keeps the last two windows it built (one per point set when a renderer
// alternates origin and direction queries). Reusing them gives the same
// values as rebuilding them.
const WindowPoints &window_points(std::uint32_t n, int k, int window, std::int64_t base, std::int64_t f0,
                                  std::int64_t f1, const LatticeLevel &level) {
    thread_local std::array<WindowPoints, 2> slots;
    thread_local int recent = 0;
    for (int slot = 0; slot < 2; ++slot) {
        const WindowPoints &w = slots[slot];
        if (w.n == n && w.level == k && w.window == window && w.base == base) {
            recent = slot;
            return w;
        }
    }
    recent = 1 - recent;
    WindowPoints &w = slots[recent];
    w.n = n;
    w.level = k;
    w.window = window;
    w.base = base;
    switch (window) {
        case 0: fill_window<0>(w, f0, f1, level); break;
        case 1: fill_window<1>(w, f0, f1, level); break;
        default: fill_window<2>(w, f0, f1, level); break;
    }
    return w;
}

// Fibonacci-lattice window scan. In (phi, z) the points form the lattice
// generated by (2 pi / Phi, -2/n) and (2 pi, 0). Index steps F_k and F_{k+1}
// (consecutive Fibonacci numbers) give a unimodular basis whose shape best
// matches the sphere metric at height z for the k chosen below.
void scan_lattice(const Vec3 &p, std::uint32_t n, TopK &best) {
    const double z = std::clamp(p.z, -1.0, 1.0);
    const double nd = static_cast<double>(n);
    const double sin2 = std::max(1.0 - z * z, std::numeric_limits<double>::min());

    int k = static_cast<int>(std::floor(std::log(nd * kPi * kSqrt5 * sin2) / kLogPhiSquared));
    k = std::clamp(k, 2, kFibCount - 2);
    const std::int64_t f0 = kFibonacci[k];
    const std::int64_t f1 = kFibonacci[k + 1];
    const LatticeLevel &level = lattice_levels()[k];

    const double b00 = level.b00, b01 = level.b01;
    const double b10 = -2.0 * static_cast<double>(f0) / nd, b11 = -2.0 * static_cast<double>(f1) / nd;
    const double det = b00 * b11 - b01 * b10;

    double phi = std::atan2(p.y, p.x);
    if (phi < 0.0) phi += kTwoPi;
    const double rz = z - z_of(0, n);
    const double c0 = (b11 * phi - b01 * rz) / det;
    const double c1 = (-b10 * phi + b00 * rz) / det;

    const int window = window_for(best.capacity());
    const std::int64_t lo0 = static_cast<std::int64_t>(std::floor(c0)) - window;
    const std::int64_t lo1 = static_cast<std::int64_t>(std::floor(c1)) - window;
    const std::int64_t base = lo0 * f0 + lo1 * f1;
    const WindowPoints &w = window_points(n, k, window, base, f0, f1, level);

    // Distances first, offers second: the arithmetic stays free of branches.
    // Cells come centre first, so most of the rim is rejected by a single
    // comparison.
    std::array<double, kMaxSpan * kMaxSpan> d2;
    for (int c = 0; c < w.count; ++c) {
        const double dx = w.x[c] - p.x;
        const double dy = w.y[c] - p.y;
        const double dz = w.z[c] - p.z;
        d2[c] = dx * dx + dy * dy + dz * dz;
    }
    for (int c = 0; c < w.count; ++c) best.offer(w.index[c], d2[c]);
}

void check_query(const Vec3 &p, std::uint32_t n) {
    SFLF_REQUIRE(n >= 1, "SF point set cardinality must be >= 1");
    const double len = length(p);
    if (!(std::abs(len - 1.0) <= kUnitTolerance))
        throw ContractViolation("query direction is not unit length (|p| = " + std::to_string(len) + ")");
}

void collect(const Vec3 &p, std::uint32_t n, TopK &best) {
    const double band = (1.0 - p.z) * 0.5 * static_cast<double>(n) - 0.5;
    const std::uint32_t scan = std::min(n, kPoleScan);
    if (band < kPoleBand) {
        scan_cap(p, n, 0, scan, best);
    } else if (band > static_cast<double>(n) - 1.0 - kPoleBand) {
        scan_cap(p, n, n - scan, scan, best);
    } else {
        scan_lattice(p, n, best);
    }
}

}  // namespace

double sf_z(std::uint32_t i, std::uint32_t n) {
    SFLF_REQUIRE(i < n, "SF index out of range");
    return z_of(i, n);
}

Vec3 sf_point(std::uint32_t i, std::uint32_t n) {
    if (i >= n)
        throw ContractViolation("SF index " + std::to_string(i) + " out of range for n = " + std::to_string(n));
    const double z = z_of(i, n);
    const double phi = azimuth(i);
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {std::cos(phi) * sin_theta, std::sin(phi) * sin_theta, z};
}

std::uint32_t inverse_nearest(const Vec3 &p, std::uint32_t n) {
    check_query(p, n);
    TopK best(1);
    collect(p, n, best);
    return best[0].index;
}

NeighborList neighbors_k(const Vec3 &p, std::uint32_t n, int k) {
    if (k < 1 || k > kMaxNeighbors)
        throw ContractViolation("neighbour count k = " + std::to_string(k) + " outside [1, 9]");
    check_query(p, n);
    TopK best(k);
    collect(p, n, best);
    NeighborList out;
    for (int m = 0; m < best.size(); ++m) out.push_back({best[m].index, std::sqrt(best[m].d2)});
    return out;
}

double kernel_radius(std::uint32_t n, double radius) {
    SFLF_REQUIRE(n >= 1, "kernel_radius: n must be >= 1");
    SFLF_REQUIRE(radius > 0.0, "kernel_radius: radius must be > 0");
    return radius * std::pow(5.0, 0.25) * std::sqrt(4.0 * kPi / (kSqrt5 * static_cast<double>(n)));
}

SfPointSet::SfPointSet(std::uint32_t n) : n_(n) {
    SFLF_REQUIRE(n >= 1, "SF point set cardinality must be >= 1");
}

}  // namespace sflf::sf
