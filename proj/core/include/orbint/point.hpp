#pragma once

#include <vector>

namespace orbint {

/// A point of a measured space: torus/real coordinates, an affine pair
/// (a, b), or a truncated cylinder word of 0.0/1.0 bits.
using Point = std::vector<double>;

}  // namespace orbint
