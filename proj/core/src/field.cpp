#include "hdch/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hdch {

struct ScalarField::Storage {
    RealBuffer values;
    ComplexBuffer spectral;
    std::once_flag values_once;
    std::once_flag spectral_once;
};

ScalarField::ScalarField(GridPtr grid, std::shared_ptr<Storage> storage)
    : grid_(std::move(grid)), storage_(std::move(storage)) {}

ScalarField ScalarField::zeros(GridPtr grid) {
    return from_spectral(grid, ComplexBuffer::zeros(grid->spectral_count()));
}

ScalarField ScalarField::from_values(GridPtr grid, RealBuffer values) {
    if (values.size() != grid->point_count()) {
        throw std::invalid_argument("field values do not match grid size");
    }
    auto s = std::make_shared<Storage>();
    s->values = std::move(values);
    std::call_once(s->values_once, [] {});
    return ScalarField(std::move(grid), std::move(s));
}

ScalarField ScalarField::from_spectral(GridPtr grid, ComplexBuffer spectral) {
    if (spectral.size() != grid->spectral_count()) {
        throw std::invalid_argument("field spectrum does not match grid size");
    }
    auto s = std::make_shared<Storage>();
    s->spectral = std::move(spectral);
    std::call_once(s->spectral_once, [] {});
    return ScalarField(std::move(grid), std::move(s));
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(std::span<const double>)>& f) {
    const int d = grid->dimension();
    const auto n = static_cast<std::size_t>(grid->points_per_axis());
    RealBuffer out(grid->point_count());
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        for (int a = 0; a < d; ++a) x[a] = grid->coordinate(idx[a]);
        out[flat] = f(x);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return from_values(std::move(grid), std::move(out));
}

std::span<const double> ScalarField::values() const {
    std::call_once(storage_->values_once, [this] {
        storage_->values = RealBuffer(grid_->point_count());
        grid_->inverse(storage_->spectral.span(), storage_->values.span());
    });
    return storage_->values.span();
}

std::span<const Complex> ScalarField::spectral() const {
    std::call_once(storage_->spectral_once, [this] {
        storage_->spectral = ComplexBuffer(grid_->spectral_count());
        grid_->forward(storage_->values.span(), storage_->spectral.span());
    });
    return storage_->spectral.span();
}

bool ScalarField::has_values() const { return !storage_->values.empty(); }
bool ScalarField::has_spectral() const { return !storage_->spectral.empty(); }

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("vector field needs at least one component");
    for (const auto& c : components_) require_same_grid(c.grid(), components_.front().grid(), "VectorField");
}

VectorField VectorField::zeros(GridPtr grid, int components) {
    std::vector<ScalarField> c;
    for (int i = 0; i < components; ++i) c.push_back(ScalarField::zeros(grid));
    return VectorField(std::move(c));
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (&a != &b && !(a.spec() == b.spec())) {
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
    }
}

namespace {

template <class Fn>
ScalarField map_spectrum(const ScalarField& f, Fn&& fn) {
    const auto in = f.spectral();
    ComplexBuffer out(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = fn(k, in[k]);
    return ScalarField::from_spectral(f.grid_ptr(), std::move(out));
}

template <class Fn>
VectorField map_components(const VectorField& u, Fn&& fn) {
    std::vector<ScalarField> c;
    c.reserve(u.components().size());
    for (const auto& x : u.components()) c.push_back(fn(x));
    return VectorField(std::move(c));
}

template <class Fn>
ScalarField zip_values(const ScalarField& a, const ScalarField& b, Fn&& fn) {
    require_same_grid(a.grid(), b.grid(), "pointwise operation");
    const auto x = a.values();
    const auto y = b.values();
    RealBuffer out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i], y[i]);
    return ScalarField::from_values(a.grid_ptr(), std::move(out));
}

}  // namespace

std::vector<Complex> forward_transform(const ScalarField& f) {
    const auto s = f.spectral();
    return {s.begin(), s.end()};
}

ScalarField inverse_transform(GridPtr grid, std::span<const Complex> spectral) {
    return ScalarField::from_spectral(std::move(grid), ComplexBuffer::copy_of(spectral));
}

ScalarField partial_derivative(const ScalarField& f, int axis) {
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.dimension()) throw std::invalid_argument("derivative axis out of range");
    const auto in = f.spectral();
    const auto xi = g.wavenumbers(axis);
    const AxisLayout l = g.spectral_axis(axis);
    std::vector<double> factor(l.extent);
    for (std::size_t k = 0; k < l.extent; ++k) factor[k] = g.is_nyquist(k) ? 0.0 : xi[k];
    ComplexBuffer out(in.size());
    // Spelled-out (0 + i w) * c; std::complex multiplication goes through __muldc3.
    for (std::size_t o = 0; o < l.outer; ++o) {
        for (std::size_t k = 0; k < l.extent; ++k) {
            const double w = factor[k];
            const std::size_t base = (o * l.extent + k) * l.inner;
            for (std::size_t i = 0; i < l.inner; ++i) {
                const Complex c = in[base + i];
                out[base + i] = Complex{0.0 * c.real() - w * c.imag(), 0.0 * c.imag() + w * c.real()};
            }
        }
    }
    return ScalarField::from_spectral(f.grid_ptr(), std::move(out));
}

ScalarField helmholtz_inverse(const ScalarField& f) {
    const auto r2 = f.grid().radius_squared();
    return map_spectrum(f, [&](std::size_t k, Complex c) { return c / (1.0 + r2[k]); });
}

VectorField helmholtz_inverse(const VectorField& u) {
    return map_components(u, [](const ScalarField& f) { return helmholtz_inverse(f); });
}

ScalarField helmholtz_apply(const ScalarField& f) {
    const auto r2 = f.grid().radius_squared();
    return map_spectrum(f, [&](std::size_t k, Complex c) { return c * (1.0 + r2[k]); });
}

VectorField helmholtz_apply(const VectorField& u) {
    return map_components(u, [](const ScalarField& f) { return helmholtz_apply(f); });
}

ScalarField dealias(const ScalarField& f) {
    const auto keep = f.grid().dealias_keep();
    return map_spectrum(f, [&](std::size_t k, Complex c) { return keep[k] ? c : Complex{}; });
}

VectorField dealias(const VectorField& u) {
    return map_components(u, [](const ScalarField& f) { return dealias(f); });
}

ScalarField apply_multiplier(const ScalarField& f, std::span<const double> table) {
    if (table.size() != f.grid().spectral_count()) {
        throw std::invalid_argument("multiplier table does not match grid");
    }
    return map_spectrum(f, [&](std::size_t k, Complex c) { return c * table[k]; });
}

namespace {

double lp_of_magnitudes(std::span<const double> mag, double p, double cell_volume) {
    if (std::isnan(p) || p < 1.0) throw std::invalid_argument("L^p norm requires p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : mag) m = std::max(m, std::abs(v));
        return m;
    }
    // Scale by the maximum so large p does not overflow.
    double scale = 0.0;
    for (double v : mag) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    if (p == 2.0) {
        for (double v : mag) sum += (v / scale) * (v / scale);
        return scale * std::sqrt(sum * cell_volume);
    }
    for (double v : mag) sum += std::pow(std::abs(v) / scale, p);
    return scale * std::pow(sum * cell_volume, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
    return lp_of_magnitudes(f.values(), p, f.grid().cell_volume());
}

double lp_norm(const VectorField& u, double p) {
    if (u.size() == 1) return lp_norm(u[0], p);
    const std::size_t n = u.grid().point_count();
    std::vector<double> mag(n, 0.0);
    for (const auto& c : u.components()) {
        const auto v = c.values();
        for (std::size_t i = 0; i < n; ++i) mag[i] += v[i] * v[i];
    }
    for (double& m : mag) m = std::sqrt(m);
    return lp_of_magnitudes(mag, p, u.grid().cell_volume());
}

namespace {

double spectral_energy(const ScalarField& f, bool tail_only) {
    const Grid& g = f.grid();
    const auto s = f.spectral();
    const auto keep = g.dealias_keep();
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (tail_only && keep[k]) continue;
        sum += g.multiplicity(k) * std::norm(s[k]);
    }
    return sum;
}

}  // namespace

double l2_norm_spectral(const ScalarField& f) {
    const Grid& g = f.grid();
    return std::sqrt(spectral_energy(f, false) * g.cell_volume() / static_cast<double>(g.point_count()));
}

double l2_norm_spectral(const VectorField& u) {
    double sum = 0.0;
    for (const auto& c : u.components()) sum += spectral_energy(c, false);
    const Grid& g = u.grid();
    return std::sqrt(sum * g.cell_volume() / static_cast<double>(g.point_count()));
}

double spectral_tail_fraction(const ScalarField& f) {
    const double total = spectral_energy(f, false);
    return total > 0.0 ? spectral_energy(f, true) / total : 0.0;
}

double spectral_tail_fraction(const VectorField& u) {
    double total = 0.0, tail = 0.0;
    for (const auto& c : u.components()) {
        total += spectral_energy(c, false);
        tail += spectral_energy(c, true);
    }
    return total > 0.0 ? tail / total : 0.0;
}

bool all_finite(const ScalarField& f) {
    if (f.has_values()) {
        for (double v : f.values()) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
    for (const Complex& c : f.spectral()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

bool all_finite(const VectorField& u) {
    return std::all_of(u.components().begin(), u.components().end(),
                       [](const ScalarField& f) { return all_finite(f); });
}

ScalarField linear_combination(std::span<const double> coefficients,
                               std::span<const ScalarField* const> fields) {
    if (coefficients.size() != fields.size() || fields.empty()) {
        throw std::invalid_argument("linear_combination: mismatched or empty inputs");
    }
    const ScalarField& first = *fields.front();
    ComplexBuffer out = ComplexBuffer::zeros(first.grid().spectral_count());
    for (std::size_t j = 0; j < fields.size(); ++j) {
        require_same_grid(fields[j]->grid(), first.grid(), "linear_combination");
        const double c = coefficients[j];
        if (c == 0.0) continue;
        const auto s = fields[j]->spectral();
        for (std::size_t k = 0; k < s.size(); ++k) out[k] += c * s[k];
    }
    return ScalarField::from_spectral(first.grid_ptr(), std::move(out));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    const double c[] = {1.0, 1.0};
    const ScalarField* f[] = {&a, &b};
    return linear_combination(c, f);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    const double c[] = {1.0, -1.0};
    const ScalarField* f[] = {&a, &b};
    return linear_combination(c, f);
}

ScalarField operator*(double c, const ScalarField& a) {
    return map_spectrum(a, [c](std::size_t, Complex z) { return c * z; });
}

ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    return zip_values(a, b, [](double x, double y) { return x * y; });
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector fields differ in component count");
    std::vector<ScalarField> c;
    for (int i = 0; i < a.size(); ++i) c.push_back(a[i] + b[i]);
    return VectorField(std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector fields differ in component count");
    std::vector<ScalarField> c;
    for (int i = 0; i < a.size(); ++i) c.push_back(a[i] - b[i]);
    return VectorField(std::move(c));
}

VectorField operator*(double c, const VectorField& a) {
    return map_components(a, [c](const ScalarField& f) { return c * f; });
}

}  // namespace hdch
