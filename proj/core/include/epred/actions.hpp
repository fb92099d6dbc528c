#pragma once

#include "epred/algebra.hpp"

namespace epred {

// Group and infinitesimal actions on the parameter spaces of the example
// systems, the diamond operator dual to the infinitesimal action, gauge
// 1-cocycles, and cotangent momentum maps.
//
//   LinearR3         a in R^3 (heavy-top gravity vector), xi a = sigma xi x a.
//   DensityS1        density samples against the grid measure; rigid rotations
//                    act by circular shift (Jacobian of a rotation is 1).
//   ConnectionGauge  gamma_j in R^3, site-major; affine action
//                    gamma -> Ad_g gamma + c(g), c(g) = -(Dg) g^{-1}.
//   SphereSo3        unit vector m in R^3 (nematic director; RP^2 is
//                    represented on its double cover, all shipped Lagrangians
//                    are antipodally even).
//
// Every closed form here is pinned by the defining pairing
// <v diamond a, xi> = <xi a, v>, not by transcription; the tests rebuild each
// one from that pairing.

enum class ActionKind { LinearR3, DensityS1, ConnectionGauge, SphereSo3 };
enum class CocycleKind { None, GaugeLogDerivative };

struct ActionDescriptor {
    ActionKind kind;
    AlgebraDescriptor algebra;
    /// sign sigma of the infinitesimal R^3/sphere action, xi a = sigma (xi x a)
    double orientation = +1.0;
    CocycleKind cocycle = CocycleKind::None;

    ActionDescriptor(ActionKind k, AlgebraDescriptor alg, double sigma = +1.0,
                     CocycleKind c = CocycleKind::None);
    bool operator==(const ActionDescriptor& o) const;
    bool operator!=(const ActionDescriptor& o) const { return !(*this == o); }
};

/// Advected parameter: a in V* (gravity vector, density samples, connection
/// samples) or a manifold point m (unit vector for SphereSo3).
struct AdvectedState {
    AdvectedState(ActionDescriptor d, Eigen::VectorXd v);
    ActionDescriptor desc;
    Eigen::VectorXd value;
};

/// theta_g(a): the (affine, where a cocycle is declared) left action.
AdvectedState act_group(const GroupElem& g, const AdvectedState& a);

/// Infinitesimal linear action xi a (the dc(xi) part of an affine advection
/// is added by the dynamics layer). DensityS1: -D(rho u);
/// ConnectionGauge: pointwise [x, gamma].
Eigen::VectorXd act_infinitesimal(const AlgElem& x, const AdvectedState& a);

/// v diamond a, defined by pair(diamond(v,a), xi) = <xi a, v>_V.
DualElem diamond(const Eigen::VectorXd& v, const AdvectedState& a);

/// Group 1-cocycle c(g) = -(Dg) g^{-1} per site, un-hatted through the
/// antisymmetric part. GaugeLogDerivative only.
Eigen::VectorXd cocycle_eval(const ActionDescriptor& desc, const GroupElem& g);

/// Algebra 1-cocycle dc(x) = -Dx per component.
Eigen::VectorXd dc_eval(const ActionDescriptor& desc, const AlgElem& x);

/// dc^T(v) with <dc(xi), v>_V = pair(dc_transpose(v), xi); equals +Dv on the
/// periodic lattice (summation by parts is exact for the antisymmetric
/// stencil).
DualElem dc_transpose(const ActionDescriptor& desc, const Eigen::VectorXd& v);

/// Cotangent momentum map. SphereSo3: J(m,p) = sigma (m x p).
/// Affine ConnectionGauge: diamond(v, a) + dc_transpose(v).
DualElem momentum_map(const AdvectedState& a, const Eigen::VectorXd& v);

/// Pairing between V* (tangents to the parameter space) and V.
double param_pair(const ActionDescriptor& desc, const Eigen::VectorXd& vstar,
                  const Eigen::VectorXd& v);

/// Transport of a V-side vector by a group element (the rho_{g} linear action
/// on V realized for our kinds: rotation / shift / pointwise rotation).
/// Used by the functional-derivative equivariance checks.
Eigen::VectorXd act_dual_param(const GroupElem& g, const ActionDescriptor& desc,
                               const Eigen::VectorXd& v);

} // namespace epred
