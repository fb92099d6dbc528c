#pragma once

#include "epred/dynamics.hpp"

#include <functional>
#include <random>
#include <string>

namespace epred {

struct SystemBundle;

/// Analytic angle schedules for the H-path catalog.
struct ThetaSchedule {
    enum class Kind { Constant, Linear, Sinusoidal };
    Kind kind = Kind::Constant;
    double theta0 = 0.0; // Constant
    double omega = 0.0;  // Linear: theta = omega t
    double eps = 0.0;    // Sinusoidal: theta = eps sin(freq t)
    double freq = 1.0;

    static ThetaSchedule constant(double theta0);
    static ThetaSchedule linear(double omega);
    static ThetaSchedule sinusoidal(double eps, double freq);

    double theta(double t) const;
    double theta_dot(double t) const;
    std::string label() const;
};

/// An analytic path h(t) in the isotropy subgroup H, with closed forms for
/// h(t), Ad_{h(t)}, Ad*_{h(t)^{-1}}, the right logarithmic derivative, and
/// the action on the advected parameter. Never numerically integrated.
class HPath {
public:
    /// Rigid rotation of S^1 by theta(t), acting on VectS1 fields and
    /// densities by (trigonometric) shift; delta r h = theta_dot * const.
    static HPath rotation_s1(const AlgebraDescriptor& vect, ThetaSchedule schedule);
    /// h(t) = exp(theta(t) axis^) in SO(3); delta r h = theta_dot axis.
    static HPath so3(const Eigen::Vector3d& axis, ThetaSchedule schedule);
    /// Constant-in-space gauge transformation, SO3 path in time; the gauge
    /// cocycle of a space-constant map vanishes.
    static HPath const_gauge(const AlgebraDescriptor& gauge, const Eigen::Vector3d& axis,
                             ThetaSchedule schedule);

    const std::string& name() const { return name_; }

    GroupElem at(double t) const;
    AlgElem ad(double t, const AlgElem& x) const;
    DualElem coad_inv(double t, const DualElem& mu) const; // Ad*_{h(t)^{-1}}
    AlgElem delta_r(double t) const;
    AdvectedState act(double t, const AdvectedState& a) const;
    Eigen::VectorXd act_dual(double t, const ActionDescriptor& desc,
                             const Eigen::VectorXd& v) const;

    /// |analytic delta_r - finite difference of s -> h(s) h(t)^{-1}|
    /// at t; the HPath construction invariant (<= 1e-8).
    double self_check(double t) const;

private:
    HPath() = default;
    std::string name_;
    AlgebraDescriptor algebra_ = AlgebraDescriptor::so3();
    ThetaSchedule schedule_;
    enum class Family { RotationS1, So3Path, ConstGauge } family_ = Family::So3Path;
    Eigen::Vector3d axis_{0, 0, 1};

    GroupElem group_at(double t) const;
};

/// Pointwise-in-t transformed curve h . (xi, a) =
/// (Ad_h xi + delta_r h, theta_h(a)).
CurvePair act_on_curve(const HPath& h, const CurvePair& c);

struct CheckReport {
    std::string name;
    std::string detail;
    double max_defect = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string worst; // description of the worst sample
};

struct CheckOptions {
    int samples = 32;
    int curves = 16;
    std::uint64_t seed = 42;
    /// residual differentiation step; <= 0 picks 1e-3
    double fd_step = 1e-3;
};

/// max |l(h(t).(xi, a, + eta)) - l(xi, a)| over random samples with
/// eta in the declared kernel (h-shift directions).
CheckReport check_lagrangian_invariance(const SystemBundle& system, const HPath& h,
                                        const CheckOptions& opts = {});

/// Functional-derivative equivariance: d_xi(h.(xi,a)) = Ad*_{h^{-1}} d_xi and
/// d_a(h.(xi,a)) = (dual transport of) d_a, over random samples.
CheckReport check_derivative_equivariance(const SystemBundle& system, const HPath& h,
                                          const CheckOptions& opts = {});

/// Residual equivariance on arbitrary (non-solution) smooth random curves:
/// || ep_residual(h.c) - Ad*_{h^{-1}} ep_residual(c) || / (1 + ||ep_residual(c)||).
CheckReport check_residual_equivariance(const SystemBundle& system, const HPath& h,
                                        const CheckOptions& opts = {});

/// Integrates from the given (or default) initial data, transforms the
/// trajectory by h, and evaluates EP + advection residuals on the transformed
/// curve. PASS iff sup-norm <= 10 x untransformed residual + 1e-6.
CheckReport check_solution_transport(const SystemBundle& system, const HPath& h, double T,
                                     double dt, const CheckOptions& opts = {});

/// Generic family residual vs the independent reference discretization on
/// random smooth states, relative sup norm.
CheckReport check_reference_match(const SystemBundle& system, const CheckOptions& opts = {});

/// Conserved-quantity drifts along an integrated trajectory.
CheckReport check_conservation(const SystemBundle& system, double T, double dt,
                               const CheckOptions& opts = {});

} // namespace epred
