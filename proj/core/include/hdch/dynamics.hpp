#pragma once

#include <vector>

#include "hdch/field.hpp"

namespace hdch {

enum class Dealiasing { off, on };

/// G[i][j] = d u_i / d x_j.
using GradientTensor = std::vector<std::vector<ScalarField>>;

GradientTensor gradient_tensor(const VectorField& u);

/// Q(u, v) = -(1 - Lap)^{-1} div M with
/// M = Gu Gv + Gu Gv^T - Gu^T Gv - (div u) Gv + 1/2 (Gu : Gv) I
/// and (div M)_i = sum_j d_j M_ij.
VectorField q_bilinear(const VectorField& u, const VectorField& v, Dealiasing dealias = Dealiasing::on);

/// R(u, v)_i = -(1 - Lap)^{-1} [ (div u) v_i + sum_k u_k d_i v_k ].
VectorField r_bilinear(const VectorField& u, const VectorField& v, Dealiasing dealias = Dealiasing::on);

/// (u . grad) v, i.e. sum_k u_k d_k v_i.
VectorField advection(const VectorField& u, const VectorField& v, Dealiasing dealias = Dealiasing::on);

/// du/dt = -(u . grad) u + Q(u, u) + R(u, u).
VectorField rhs_velocity(const VectorField& u, Dealiasing dealias = Dealiasing::on);

/// dm/dt = -[(u . grad) m + (grad u)^T m + (div u) m] with u = (1 - Lap)^{-1} m.
VectorField rhs_momentum(const VectorField& m, Dealiasing dealias = Dealiasing::on);

/// Integral of |u|^2 + |grad u|^2 over the box, evaluated from the spectrum.
double h1_energy(const VectorField& u);

}  // namespace hdch
