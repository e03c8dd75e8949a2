#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "hdch/buffer.hpp"

namespace hdch {

/// Uniform periodic grid on the box [0, side_length)^dimension.
///
/// The frequency lattice is {2 pi k / side_length : k in [-N/2, N/2)} per axis,
/// so multipliers act on physical wavenumbers, not integer mode indices.
struct GridSpec {
    int dimension = 2;
    int points_per_axis = 64;
    double side_length = 2.0 * std::numbers::pi;
    double dealias_fraction = 2.0 / 3.0;

    double spacing() const { return side_length / points_per_axis; }
    double wavenumber_unit() const { return 2.0 * std::numbers::pi / side_length; }
    double nyquist() const { return std::numbers::pi * points_per_axis / side_length; }
    /// Largest retained per-axis |xi| after dealiasing.
    double dealias_cutoff() const { return dealias_fraction * nyquist(); }

    /// Throws ConfigError unless N is a power of two >= 2, d >= 1, S > 0 and
    /// the dealias fraction lies in (0, 1].
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Index ranges of one axis inside a row-major array: the array is viewed as
/// [outer][extent][inner].
struct AxisLayout {
    std::size_t outer;
    std::size_t extent;
    std::size_t inner;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Immutable grid plus transform plans and frequency tables, shared by every
/// field defined on it.
///
/// Physical arrays are row-major with N points per axis (axis 0 slowest).
/// Spectral arrays hold the real-to-complex half spectrum: the last axis keeps
/// indices 0..N/2. Forward transforms are unnormalized, inverse transforms
/// divide by N^d. Index N/2 on any axis is the Nyquist mode k = -N/2.
class Grid {
public:
    /// Returns a shared grid for `spec`; identical specs share plans and tables.
    static GridPtr create(const GridSpec& spec);

    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const GridSpec& spec() const { return spec_; }
    int dimension() const { return spec_.dimension; }
    int points_per_axis() const { return spec_.points_per_axis; }
    double side_length() const { return spec_.side_length; }
    double spacing() const { return spec_.spacing(); }
    double cell_volume() const { return cell_volume_; }

    std::size_t point_count() const { return point_count_; }
    std::size_t spectral_count() const { return spectral_count_; }

    /// Physical wavenumbers along `axis` of the spectral layout (the last axis
    /// has N/2+1 entries). The Nyquist entry carries -pi N / S.
    std::span<const double> wavenumbers(int axis) const;
    /// Signed integer mode index k for position `index` on `axis`.
    int mode_index(std::size_t index) const;
    bool is_nyquist(std::size_t index) const;

    /// |xi|^2 for every spectral coefficient.
    std::span<const double> radius_squared() const { return radius_squared_; }
    /// 1 where a coefficient survives dealiasing, 0 otherwise.
    std::span<const unsigned char> dealias_keep() const { return dealias_keep_; }
    /// max_i |k_i| (integer mode indices) for every spectral coefficient.
    std::span<const int> max_mode() const { return max_mode_; }
    /// Number of full-spectrum coefficients represented by a half-spectrum entry (1 or 2).
    double multiplicity(std::size_t flat) const {
        const std::size_t last = flat % last_extent_;
        return (last == 0 || (points_per_axis() % 2 == 0 && last == last_extent_ - 1)) ? 1.0 : 2.0;
    }

    AxisLayout spectral_axis(int axis) const;
    AxisLayout physical_axis(int axis) const;

    /// Unnormalized forward DFT of a real array (length point_count()).
    void forward(std::span<const double> values, std::span<Complex> spectral) const;
    /// Inverse DFT including the 1/N^d factor. The input is left untouched.
    void inverse(std::span<const Complex> spectral, std::span<double> values) const;

    /// Coordinate x = index * h along any axis.
    double coordinate(std::size_t index) const { return static_cast<double>(index) * spacing(); }

private:
    explicit Grid(const GridSpec& spec);

    GridSpec spec_;
    std::size_t point_count_ = 0;
    std::size_t spectral_count_ = 0;
    std::size_t last_extent_ = 0;
    double cell_volume_ = 0.0;
    std::vector<std::size_t> physical_shape_;
    std::vector<std::size_t> spectral_shape_;
    std::vector<std::vector<double>> wavenumbers_;
    std::vector<double> radius_squared_;
    std::vector<unsigned char> dealias_keep_;
    std::vector<int> max_mode_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace hdch
