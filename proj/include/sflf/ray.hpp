// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_RAY_HPP
#define SFLF_RAY_HPP

#include "sflf/vec.hpp"

namespace sflf {

// Half-line origin + t * direction, t >= 0. direction is unit length.
struct Ray {
    Vec3 origin;
    Vec3 direction;

    Vec3 at(double t) const { return origin + direction * t; }
};

}  // namespace sflf

#endif  // SFLF_RAY_HPP
