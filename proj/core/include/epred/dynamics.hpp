#pragma once

#include "epred/actions.hpp"
#include "epred/algebra.hpp"
#include "epred/lagrangian.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epred {

struct SystemBundle;

/// The four Euler-Poincare equation families:
///   Plain     d/dt d_xi + ad*_xi d_xi = 0
///   Advected  ... = d_a diamond a,                  da/dt = xi a
///   Breaking  ... = J(d_m),                         dm/dt = xi_M(m)
///   Affine    ... = d_a diamond a + dc^T(d_a),      da/dt = xi a + dc(xi)
enum class EquationFamily { Plain, Advected, Breaking, Affine };

/// Integrated variables: mu = d_xi and the advected parameter.
struct EPState {
    double t = 0.0;
    DualElem mu;
    std::optional<AdvectedState> a;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<EPState> states;
    std::vector<AlgElem> xi; // reconstructed xi = inertia_solve(mu, a)
    double dt = 0.0;
};

/// A smooth curve t -> (xi(t), a(t)); analytic closures or spline
/// interpolants of trajectories.
struct CurvePair {
    std::function<AlgElem(double)> xi;
    std::function<std::optional<AdvectedState>(double)> a; // may be null for Plain
    std::optional<AdvectedState> a_at(double t) const {
        return a ? a(t) : std::nullopt;
    }
};

/// Family forcing (the equation right-hand side): zero, d_a diamond a, J(d_m),
/// or d_a diamond a + dc^T(d_a).
DualElem ep_forcing(EquationFamily family, const ReducedLagrangian& l, const AlgElem& xi,
                    const AdvectedState* a);

/// LHS - RHS of the EP equation along a curve: the time derivative of
/// s -> d_xi(curve(s)) by the 4th-order stencil with step h, plus
/// ad*_{xi(t)} d_xi(t), minus the family forcing. Zero (to discretization
/// error) iff the curve solves the equation; the advection equation is
/// checked separately (advect_rhs).
DualElem ep_residual(EquationFamily family, const ReducedLagrangian& l, const CurvePair& curve,
                     double t, double h);

/// Advection right-hand side: act_infinitesimal(xi, a), plus dc(xi) for the
/// affine family.
Eigen::VectorXd advect_rhs(EquationFamily family, const AlgElem& xi, const AdvectedState& a);

struct IntegrateOptions {
    /// Abort threshold for the kernel component of mu along the run.
    double kernel_tol = 1e-6;
};

/// Classical fixed-step RK4 on (mu, a), with xi = inertia_solve(mu, a)
/// reconstructed at every stage; sphere parameters are renormalized after
/// each full step. Aborts (NumericalError) on kernel drift or non-finite
/// state. Deterministic; single-threaded.
Trajectory integrate(const SystemBundle& system, const AlgElem& xi0,
                     const std::optional<AdvectedState>& a0, double T, double dt,
                     const IntegrateOptions& opts = {});

/// The system's declared conserved quantities at a state. Always the energy
/// E = <mu, xi> - l; systems add their own (Casimir-type) functionals.
std::map<std::string, double> conserved_quantities(const SystemBundle& system,
                                                   const EPState& state);

} // namespace epred
