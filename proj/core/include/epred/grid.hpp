#pragma once

#include <Eigen/Dense>

namespace epred::grid {

// Uniform periodic grid on [0, 2pi): x_j = j * dx, dx = 2pi/N.
// Vector-valued fields are stored site-major: index comps*j + c.

double spacing(int grid_size);

/// Samples x_j of the grid.
Eigen::VectorXd nodes(int grid_size);

/// 4th-order periodic central difference
/// (-f_{j+2} + 8 f_{j+1} - 8 f_{j-1} + f_{j-2}) / (12 dx), per component.
/// The stencil is exactly antisymmetric: sum_j (Df)_j g_j = -sum_j f_j (Dg)_j.
Eigen::VectorXd derivative(const Eigen::VectorXd& f, int grid_size, int comps = 1);

/// Samples of the band-limited trigonometric interpolant at x_j - s.
/// Exact circular roll when s is a multiple of the spacing; the Nyquist
/// mode (even N) is shifted with the symmetric cosine convention.
Eigen::VectorXd trig_shift(const Eigen::VectorXd& f, int grid_size, double s, int comps = 1);

/// Discrete L^2 quadrature sum_j f_j dx.
double quadrature(const Eigen::VectorXd& f, int grid_size);

} // namespace epred::grid
