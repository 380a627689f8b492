#pragma once

#include "proxpen/types.hpp"

namespace proxpen {

// Euclidean projection onto the unit simplex {z >= 0, sum z = 1} by
// sort-and-threshold, O(n log n).
Vector project_simplex(const Vector& x);

// Membership test with slack for rounding: entries >= -1e-12 and
// |sum - 1| <= 1e-9.
bool in_simplex(const Vector& z);

} // namespace proxpen
