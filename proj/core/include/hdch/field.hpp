#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hdch/buffer.hpp"
#include "hdch/grid.hpp"

namespace hdch {

/// Real scalar field on a periodic grid with both physical and spectral views.
///
/// A field is immutable once built. It is created from one representation and
/// the other is computed on first access (thread-safe), so copies are cheap
/// and share storage.
class ScalarField {
public:
    static ScalarField zeros(GridPtr grid);
    static ScalarField from_values(GridPtr grid, RealBuffer values);
    static ScalarField from_spectral(GridPtr grid, ComplexBuffer spectral);
    /// Samples f(x) at every grid point; x has one coordinate per axis.
    static ScalarField sample(GridPtr grid, const std::function<double(std::span<const double>)>& f);

    std::span<const double> values() const;
    std::span<const Complex> spectral() const;

    bool has_values() const;
    bool has_spectral() const;

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

private:
    struct Storage;
    ScalarField(GridPtr grid, std::shared_ptr<Storage> storage);

    GridPtr grid_;
    std::shared_ptr<Storage> storage_;
};

/// d-component field; every component lives on the same grid.
class VectorField {
public:
    explicit VectorField(std::vector<ScalarField> components);
    static VectorField zeros(GridPtr grid, int components);
    static VectorField zeros(GridPtr grid) { return zeros(grid, grid->dimension()); }

    int size() const { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarField>& components() const { return components_; }
    const Grid& grid() const { return components_.front().grid(); }
    const GridPtr& grid_ptr() const { return components_.front().grid_ptr(); }

private:
    std::vector<ScalarField> components_;
};

// ---- transforms and Fourier multipliers ------------------------------------

/// Unnormalized DFT coefficients in the half-spectrum layout of Grid.
std::vector<Complex> forward_transform(const ScalarField& f);
ScalarField inverse_transform(GridPtr grid, std::span<const Complex> spectral);

/// Spectral derivative along `axis` (multiplier i xi_axis; Nyquist mode dropped).
ScalarField partial_derivative(const ScalarField& f, int axis);
/// (1 - Laplacian)^{-1}, the multiplier 1 / (1 + |xi|^2).
ScalarField helmholtz_inverse(const ScalarField& f);
VectorField helmholtz_inverse(const VectorField& u);
/// (1 - Laplacian), the multiplier 1 + |xi|^2.
ScalarField helmholtz_apply(const ScalarField& f);
VectorField helmholtz_apply(const VectorField& u);
/// Zeroes every coefficient with some |xi_i| above dealias_fraction * Nyquist.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& u);
/// Multiplies the spectrum by a real table indexed like Grid::radius_squared().
ScalarField apply_multiplier(const ScalarField& f, std::span<const double> table);

// ---- norms and diagnostics --------------------------------------------------

/// Rectangle-rule L^p norm over the box; p = infinity is the grid maximum.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const ScalarField& f, double p);
/// Same with the pointwise Euclidean magnitude of the vector.
double lp_norm(const VectorField& u, double p);
/// L^2 norm evaluated from the spectrum (Parseval).
double l2_norm_spectral(const ScalarField& f);
double l2_norm_spectral(const VectorField& u);
/// Spectral energy removed by dealias() divided by the total (0 for the zero field).
double spectral_tail_fraction(const ScalarField& f);
double spectral_tail_fraction(const VectorField& u);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& u);

// ---- arithmetic ---------------------------------------------------------------

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
ScalarField operator-(const ScalarField& a);
/// Pointwise product in physical space (aliased; follow with dealias()).
ScalarField multiply(const ScalarField& a, const ScalarField& b);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);

/// Sum of c_k * f_k, formed in spectral space. All fields share one grid.
ScalarField linear_combination(std::span<const double> coefficients,
                               std::span<const ScalarField* const> fields);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace hdch
