#include "hdch/dynamics.hpp"

#include <stdexcept>

namespace hdch {

namespace {

using Values = std::span<const double>;

void require_compatible(const VectorField& u, const VectorField& v, const char* where) {
    require_same_grid(u.grid(), v.grid(), where);
    const int d = u.grid().dimension();
    if (u.size() != d || v.size() != d) {
        throw std::invalid_argument(std::string(where) + ": vector fields need one component per axis");
    }
}

std::vector<std::vector<Values>> values_of(const GradientTensor& g) {
    std::vector<std::vector<Values>> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (const auto& f : g[i]) out[i].push_back(f.values());
    }
    return out;
}

/// -(1 - Lap)^{-1} applied to the (optionally dealiased) sum of spectra.
ScalarField smoothed_negative_sum(const GridPtr& grid, std::span<const ScalarField> terms, Dealiasing dealias) {
    const auto r2 = grid->radius_squared();
    const auto keep = grid->dealias_keep();
    ComplexBuffer out = ComplexBuffer::zeros(grid->spectral_count());
    for (const auto& t : terms) {
        const auto s = t.spectral();
        for (std::size_t k = 0; k < s.size(); ++k) out[k] += s[k];
    }
    const bool mask = dealias == Dealiasing::on;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (mask && !keep[k]) ? Complex{} : out[k] * (-1.0 / (1.0 + r2[k]));
    }
    return ScalarField::from_spectral(grid, std::move(out));
}

ScalarField maybe_dealias(const ScalarField& f, Dealiasing dealias) {
    return dealias == Dealiasing::on ? hdch::dealias(f) : f;
}

/// Physical-space M_ij for the Q operator.
std::vector<std::vector<ScalarField>> q_matrix(const GridPtr& grid, const GradientTensor& gu, const GradientTensor& gv) {
    const int d = grid->dimension();
    const std::size_t n = grid->point_count();
    const auto a = values_of(gu);
    const auto b = values_of(gv);

    RealBuffer div = RealBuffer::zeros(n);
    RealBuffer contraction = RealBuffer::zeros(n);
    for (int i = 0; i < d; ++i) {
        for (std::size_t x = 0; x < n; ++x) div[x] += a[i][i][x];
        for (int j = 0; j < d; ++j) {
            for (std::size_t x = 0; x < n; ++x) contraction[x] += a[i][j][x] * b[i][j][x];
        }
    }

    std::vector<std::vector<ScalarField>> m(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            RealBuffer out(n);
            double* __restrict acc = out.data();
            const double* __restrict bij = b[i][j].data();
            for (std::size_t x = 0; x < n; ++x) acc[x] = -div[x] * bij[x];
            for (int k = 0; k < d; ++k) {
                const double* __restrict aik = a[i][k].data();
                const double* __restrict aki = a[k][i].data();
                const double* __restrict bkj = b[k][j].data();
                const double* __restrict bjk = b[j][k].data();
                for (std::size_t x = 0; x < n; ++x) {
                    acc[x] += aik[x] * bkj[x] + aik[x] * bjk[x] - aki[x] * bkj[x];
                }
            }
            if (i == j) {
                for (std::size_t x = 0; x < n; ++x) acc[x] += 0.5 * contraction[x];
            }
            m[i].push_back(ScalarField::from_values(grid, std::move(out)));
        }
    }
    return m;
}

VectorField q_from_gradients(const GridPtr& grid, const GradientTensor& gu, const GradientTensor& gv,
                             Dealiasing dealias) {
    const int d = grid->dimension();
    const auto m = q_matrix(grid, gu, gv);
    std::vector<ScalarField> out;
    for (int i = 0; i < d; ++i) {
        std::vector<ScalarField> terms;
        for (int j = 0; j < d; ++j) terms.push_back(partial_derivative(m[i][j], j));
        out.push_back(smoothed_negative_sum(grid, terms, dealias));
    }
    return VectorField(std::move(out));
}

/// Physical-space (div u) v_i + sum_k u_k d_i v_k for each i.
std::vector<ScalarField> r_source(const GridPtr& grid, const VectorField& u, const GradientTensor& gu,
                                  const VectorField& v, const GradientTensor& gv) {
    const int d = grid->dimension();
    const std::size_t n = grid->point_count();
    RealBuffer div = RealBuffer::zeros(n);
    for (int i = 0; i < d; ++i) {
        const auto g = gu[i][i].values();
        for (std::size_t x = 0; x < n; ++x) div[x] += g[x];
    }
    std::vector<ScalarField> out;
    for (int i = 0; i < d; ++i) {
        const auto vi = v[i].values();
        RealBuffer s(n);
        for (std::size_t x = 0; x < n; ++x) s[x] = div[x] * vi[x];
        for (int k = 0; k < d; ++k) {
            const auto uk = u[k].values();
            const auto dv = gv[k][i].values();
            for (std::size_t x = 0; x < n; ++x) s[x] += uk[x] * dv[x];
        }
        out.push_back(ScalarField::from_values(grid, std::move(s)));
    }
    return out;
}

VectorField r_from_gradients(const GridPtr& grid, const VectorField& u, const GradientTensor& gu,
                             const VectorField& v, const GradientTensor& gv, Dealiasing dealias) {
    const auto src = r_source(grid, u, gu, v, gv);
    std::vector<ScalarField> out;
    for (const auto& s : src) out.push_back(smoothed_negative_sum(grid, std::span(&s, 1), dealias));
    return VectorField(std::move(out));
}

/// Physical-space sum_k u_k d_k v_i.
RealBuffer advection_values(const VectorField& u, const GradientTensor& gv, int i) {
    const std::size_t n = u.grid().point_count();
    RealBuffer s = RealBuffer::zeros(n);
    for (int k = 0; k < u.size(); ++k) {
        const auto uk = u[k].values();
        const auto dv = gv[i][k].values();
        for (std::size_t x = 0; x < n; ++x) s[x] += uk[x] * dv[x];
    }
    return s;
}

}  // namespace

GradientTensor gradient_tensor(const VectorField& u) {
    const int d = u.grid().dimension();
    GradientTensor g(static_cast<std::size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) {
        for (int j = 0; j < d; ++j) g[i].push_back(partial_derivative(u[i], j));
    }
    return g;
}

VectorField q_bilinear(const VectorField& u, const VectorField& v, Dealiasing dealias) {
    require_compatible(u, v, "q_bilinear");
    const auto gu = gradient_tensor(u);
    const auto gv = gradient_tensor(v);
    return q_from_gradients(u.grid_ptr(), gu, gv, dealias);
}

VectorField r_bilinear(const VectorField& u, const VectorField& v, Dealiasing dealias) {
    require_compatible(u, v, "r_bilinear");
    return r_from_gradients(u.grid_ptr(), u, gradient_tensor(u), v, gradient_tensor(v), dealias);
}

VectorField advection(const VectorField& u, const VectorField& v, Dealiasing dealias) {
    require_compatible(u, v, "advection");
    const auto gv = gradient_tensor(v);
    std::vector<ScalarField> out;
    for (int i = 0; i < v.size(); ++i) {
        out.push_back(maybe_dealias(ScalarField::from_values(u.grid_ptr(), advection_values(u, gv, i)), dealias));
    }
    return VectorField(std::move(out));
}

VectorField rhs_velocity(const VectorField& u, Dealiasing dealias) {
    require_compatible(u, u, "rhs_velocity");
    const GridPtr& grid = u.grid_ptr();
    const auto g = gradient_tensor(u);
    const VectorField q = q_from_gradients(grid, g, g, dealias);
    const VectorField r = r_from_gradients(grid, u, g, u, g, dealias);

    const auto keep = grid->dealias_keep();
    const bool mask = dealias == Dealiasing::on;
    std::vector<ScalarField> out;
    for (int i = 0; i < u.size(); ++i) {
        const ScalarField adv = ScalarField::from_values(grid, advection_values(u, g, i));
        const auto a = adv.spectral();
        const auto qs = q[i].spectral();
        const auto rs = r[i].spectral();
        ComplexBuffer s(a.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            s[k] = (mask && !keep[k]) ? Complex{} : qs[k] + rs[k] - a[k];
        }
        out.push_back(ScalarField::from_spectral(grid, std::move(s)));
    }
    return VectorField(std::move(out));
}

VectorField rhs_momentum(const VectorField& m, Dealiasing dealias) {
    require_compatible(m, m, "rhs_momentum");
    const GridPtr& grid = m.grid_ptr();
    const int d = grid->dimension();
    const std::size_t n = grid->point_count();
    const VectorField u = helmholtz_inverse(m);
    const auto gu = gradient_tensor(u);
    const auto gm = gradient_tensor(m);

    RealBuffer div = RealBuffer::zeros(n);
    for (int i = 0; i < d; ++i) {
        const auto g = gu[i][i].values();
        for (std::size_t x = 0; x < n; ++x) div[x] += g[x];
    }

    std::vector<ScalarField> out;
    for (int i = 0; i < d; ++i) {
        RealBuffer s = advection_values(u, gm, i);
        const auto mi = m[i].values();
        for (std::size_t x = 0; x < n; ++x) s[x] += div[x] * mi[x];
        for (int j = 0; j < d; ++j) {
            const auto mj = m[j].values();
            const auto du = gu[j][i].values();
            for (std::size_t x = 0; x < n; ++x) s[x] += du[x] * mj[x];
        }
        for (std::size_t x = 0; x < n; ++x) s[x] = -s[x];
        out.push_back(maybe_dealias(ScalarField::from_values(grid, std::move(s)), dealias));
    }
    return VectorField(std::move(out));
}

double h1_energy(const VectorField& u) {
    const Grid& g = u.grid();
    const auto r2 = g.radius_squared();
    double sum = 0.0;
    for (const auto& c : u.components()) {
        const auto s = c.spectral();
        for (std::size_t k = 0; k < s.size(); ++k) sum += g.multiplicity(k) * (1.0 + r2[k]) * std::norm(s[k]);
    }
    return sum * g.cell_volume() / static_cast<double>(g.point_count());
}

}  // namespace hdch
