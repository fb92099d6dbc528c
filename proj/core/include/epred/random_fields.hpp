#pragma once

#include "epred/actions.hpp"
#include "epred/algebra.hpp"
#include "epred/dynamics.hpp"

#include <random>

namespace epred {

struct SystemBundle;

// Seeded generators for the randomized verification suites. Lattice fields
// are band-limited trigonometric polynomials so that shifts and products stay
// below the Nyquist mode.

struct FieldShape {
    int max_mode = 3;
    double amplitude = 1.0;
    /// amplitude of mode k scales like 1 / k^decay
    double decay = 0.0;
    bool with_mean = false;
};

using Rng = std::mt19937_64;

/// Scalar trigonometric polynomial sampled on the grid.
Eigen::VectorXd random_scalar_field(Rng& rng, int grid_size, const FieldShape& shape);

/// Random element of the algebra (a 3-vector, a VectS1 field, a site-major
/// gauge field, or blocks for a product).
AlgElem random_alg_elem(Rng& rng, const AlgebraDescriptor& desc, const FieldShape& shape);

DualElem random_dual_elem(Rng& rng, const AlgebraDescriptor& desc, const FieldShape& shape);

/// Uniform random rotation (axis uniform on S^2, angle uniform in [0, pi]).
GroupElem random_rotation(Rng& rng);

/// Smooth lattice gauge map g_j = exp(phi(x_j)^) with a band-limited R^3
/// field phi.
GroupElem random_gauge_map(Rng& rng, const AlgebraDescriptor& gauge, const FieldShape& shape);

Eigen::Vector3d random_unit_vector(Rng& rng);

/// Random advected state compatible with the system (positive density,
/// unit-norm sphere point, band-limited connection).
AdvectedState random_advected_state(Rng& rng, const ActionDescriptor& desc,
                                    const FieldShape& shape);

/// Analytic random smooth curve t -> (xi(t), a(t)) for a system; not a
/// solution of anything. Time dependence is a small set of harmonics.
CurvePair random_smooth_curve(Rng& rng, const SystemBundle& system, const FieldShape& shape);

} // namespace epred
