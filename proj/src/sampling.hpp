#pragma once

#include <vector>

#include "hdtk/grid.hpp"

namespace hdtk::detail {

/// Deterministic, roughly uniform unit vectors: +-1 in 1D, equispaced angles
/// in 2D, a Fibonacci lattice in 3D.
std::vector<Vec> sample_directions(int dim, int count);

Vec scaled(const Vec& v, double s);

/// exp(-2 pi i y.xi) - 1 without cancellation for small phases.
Complex shift_factor(double phase);

}  // namespace hdtk::detail
