#pragma once

#include <cstdint>

#include "hdch/field.hpp"

namespace hdch::cli {

/// Smooth trigonometric vector field with Gaussian-damped random coefficients on
/// integer modes |k_i| <= max_mode (in units of 2 pi / S), drawn from a fixed
/// seed in an order independent of N. The same seed therefore gives the same
/// continuous field on every grid. Scaled so that max |u_i| = amplitude, then
/// dealiased.
VectorField trig_fixture(const GridPtr& grid, std::uint64_t seed, int max_mode, double amplitude);

/// (amplitude sin x_1, 0, ..., 0).
VectorField sine_fixture(const GridPtr& grid, double amplitude);

}  // namespace hdch::cli
