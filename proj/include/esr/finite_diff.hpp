#pragma once

#include "esr/objective.hpp"

namespace esr {

/// 1e-5 * max(1, ||x||_inf).
double default_fd_step(const Vector& x);

/// Central differences (phi(x + h e_i) - phi(x - h e_i)) / (2h), h = step.
/// Throws NonFiniteError naming the failing coordinate.
Vector fd_gradient(const Objective& obj, const Vector& x, double step);

/// (grad(x + h v) - grad(x - h v)) / (2h) with h = step / ||v||.
/// Throws std::invalid_argument for a zero direction.
Vector fd_hvp(const Objective& obj, const Vector& x, const Vector& v, double step);

/// ||a - b|| / max(||b||, floor). With the default floor a zero reference
/// falls back to absolute error.
double relative_error(const Vector& a, const Vector& b, double floor = 1e-12);

}  // namespace esr
