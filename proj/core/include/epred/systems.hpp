#pragma once

#include "epred/dynamics.hpp"
#include "epred/invariance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epred {

/// Named constants of the example systems. Fields are read by the systems
/// that use them and ignored otherwise.
struct SystemParams {
    // heavy top
    Eigen::Vector3d inertia{1.0, 2.0, 3.0};
    Eigen::Vector3d lambda_vec{0.0, 0.0, 1.0};
    // nematic
    double j = 1.0;
    double lambda_nem = 1.0;
    Eigen::Vector3d k_axis{0.0, 0.0, 1.0};
    // lattices
    int grid_size = 128;
    double rho_min = 1e-6;
    // spin Lagrangian selector (1, 2, 3); only 3 is integrable
    int spin_ell = 3;
    /// sign of the R^3/sphere infinitesimal action
    double sigma = +1.0;
};

/// A fully wired example system: algebra, action, Lagrangian, equation
/// family, the analytic H-path families its Lagrangian admits, declared
/// conserved quantities, and (where the underlying equation is stated in
/// closed form) an independent reference right-hand side.
struct SystemBundle {
    std::string name;
    AlgebraDescriptor algebra = AlgebraDescriptor::so3();
    std::optional<ActionDescriptor> action;
    EquationFamily family;
    ReducedLagrangian lagrangian;
    std::vector<HPath> h_paths;
    std::vector<std::string> conserved;
    SystemParams params;
    bool has_reference = false;

    /// Default initial condition (xi0, a0) at desk scale.
    AlgElem default_xi0() const;
    std::optional<AdvectedState> default_a0() const;
};

/// Build one of {heavy_top, nematic, nematic_projected, hs1d, density_hs1d,
/// spin_lattice} with validated parameters.
SystemBundle build_system(const std::string& name, const SystemParams& params = {});

/// Independent discretization of the system's explicit equation (same
/// stencil, coded separately from the generic family residual), returned as
/// time derivatives (mu_dot, a_dot) of the integrated variables. Throws for
/// systems without a declared reference.
std::pair<Eigen::VectorXd, Eigen::VectorXd> reference_rhs(const SystemBundle& system,
                                                          const AlgElem& xi,
                                                          const AdvectedState* a);

} // namespace epred
