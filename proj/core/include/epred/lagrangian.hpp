#pragma once

#include "epred/actions.hpp"
#include "epred/algebra.hpp"

#include <functional>
#include <string>
#include <vector>

namespace epred {

/// Declared kernel of the inertia operator xi -> d_xi, identified with the
/// isotropy algebra h. Basis elements are normalized to pair-norm 1.
struct KernelSpec {
    std::vector<AlgElem> basis;
};

/// A reduced Lagrangian l(xi, a) with analytic functional derivatives and an
/// inertia solve mu -> xi. The advected-state pointer is null for
/// parameter-free Lagrangians. Values are immutable and evaluation is pure;
/// inertia factorizations are cached internally behind a mutex.
struct ReducedLagrangian {
    std::string name;
    bool integrable = true;
    bool has_parameter = true;

    std::function<double(const AlgElem&, const AdvectedState*)> eval;
    std::function<DualElem(const AlgElem&, const AdvectedState*)> d_xi;
    /// delta l / delta a as a V-side vector; empty function when there is no
    /// parameter.
    std::function<Eigen::VectorXd(const AlgElem&, const AdvectedState*)> d_a;
    /// Unique preimage of mu under the inertia operator with zero kernel
    /// component; throws NumericalError when mu has a kernel component above
    /// tol * (1 + |mu|).
    std::function<AlgElem(const DualElem&, const AdvectedState*, double)> solve;

    KernelSpec kernel;
};

/// Central-difference directional derivative of l in xi,
/// (l(xi + h eta, a) - l(xi - h eta, a)) / (2h), h = 1e-6 max(1, |xi|).
/// Oracle only; exact on quadratics.
double fd_d_xi(const ReducedLagrangian& l, const AlgElem& xi, const AdvectedState* a,
               const AlgElem& direction);

/// Same oracle in the parameter slot; the direction lives in V*.
double fd_d_a(const ReducedLagrangian& l, const AlgElem& xi, const AdvectedState* a,
              const Eigen::VectorXd& direction);

AlgElem inertia_solve(const ReducedLagrangian& l, const DualElem& mu, const AdvectedState* a,
                      double tol = 1e-8);

// --- builtin catalog ------------------------------------------------------

/// l(u) = 1/2 sum (Du)^2 dx on Vect(S^1); d_xi = -D^2 u, kernel = constants.
ReducedLagrangian hs1d_lagrangian(const AlgebraDescriptor& vect);

/// l(u, rho) = 1/2 sum rho (Du)^2 dx; d_xi = -D(rho Du), refactorized
/// whenever rho changes; kernel = constants.
ReducedLagrangian density_hs1d_lagrangian(const ActionDescriptor& density_action,
                                          double rho_min = 1e-6);

/// l(Omega, Gamma) = 1/2 I Omega . Omega - Gamma . lambda.
ReducedLagrangian heavy_top_lagrangian(const Eigen::Vector3d& inertia,
                                       const Eigen::Vector3d& lambda_vec,
                                       const ActionDescriptor& linear_action);

/// l(xi, m) = 1/2 j |xi|^2 - lambda/2 <m,k>^2, or with xi replaced by its
/// projection off the k-axis (projected = true; kernel = span k).
ReducedLagrangian nematic_lagrangian(double j, double lambda, const Eigen::Vector3d& k_axis,
                                     bool projected, const ActionDescriptor& sphere_action);

/// Spin-lattice Lagrangians on C(S^1, so(3)) x connections:
///   which = 1: 1/2 sum |Dxi x gamma|^2 dx        (invariance checks only)
///   which = 2: 1/2 sum (Dxi . gamma)^2 dx        (invariance checks only)
///   which = 3: sum (|Dxi|^2 - |gamma|^2) dx      (integrable; d_xi = -2 D^2 xi)
ReducedLagrangian spin_lagrangian(const ActionDescriptor& connection_action, int which);

/// All eight builtins at desk-scale defaults (lattices at grid_size).
std::vector<ReducedLagrangian> builtin_lagrangians(int grid_size = 128);

} // namespace epred
