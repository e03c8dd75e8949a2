#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "hdch/field.hpp"

namespace hdch::testing {

GridPtr make_grid(int d, int n, double side = 2.0 * std::numbers::pi, double dealias_fraction = 2.0 / 3.0);

/// Real field with random Fourier coefficients on |k_i| <= max_mode, fixed seed.
ScalarField random_field(const GridPtr& grid, int max_mode, std::uint64_t seed, double amplitude = 1.0);
VectorField random_vector_field(const GridPtr& grid, int max_mode, std::uint64_t seed, double amplitude = 1.0);

/// Full (not half) unnormalized DFT by direct summation; row-major N^d output.
std::vector<std::complex<double>> direct_dft(std::span<const double> values, int n, int d);

/// Fourth-order centered difference along `axis` in physical space.
std::vector<double> fd4_derivative(const ScalarField& f, int axis);

double max_abs(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// Maximum pointwise difference relative to the largest |b|.
double rel_max_diff(const ScalarField& a, const ScalarField& b);
double rel_max_diff(const VectorField& a, const VectorField& b);

}  // namespace hdch::testing
