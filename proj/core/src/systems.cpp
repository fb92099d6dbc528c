#include "epred/systems.hpp"

#include "epred/grid.hpp"

#include <cmath>
#include <numbers>

namespace epred {

namespace {

void validate_common(const SystemParams& p) {
    if (p.grid_size < 8 || p.grid_size % 2 != 0)
        throw ConfigError("build_system: grid_size must be even and >= 8");
}

Eigen::VectorXd sine_field(int n, double amp, int mode = 1) {
    const Eigen::VectorXd x = grid::nodes(n);
    return (amp * (double(mode) * x.array()).sin()).matrix();
}

Eigen::VectorXd cosine_field(int n, double amp, int mode = 1) {
    const Eigen::VectorXd x = grid::nodes(n);
    return (amp * (double(mode) * x.array()).cos()).matrix();
}

/// Constant rotations about the axis that leave the inertia tensor fixed.
/// For a symmetric top (two equal moments, axis along the distinct one)
/// every angle qualifies; for a generic diagonal tensor only the half turn
/// survives.
std::vector<HPath> heavy_top_paths(const Eigen::Vector3d& inertia, const Eigen::Vector3d& axis) {
    std::vector<HPath> out;
    const Eigen::Vector3d a = axis.normalized();
    auto commutes = [&](double angle) {
        const Eigen::Matrix3d r =
            exp_so3(AlgElem{AlgebraDescriptor::so3(), Eigen::Vector3d(angle * a)}).matrix();
        const Eigen::Matrix3d i = inertia.asDiagonal();
        return (r * i * r.transpose() - i).cwiseAbs().maxCoeff() < 1e-12;
    };
    for (double angle : {0.6, 1.7, std::numbers::pi}) {
        if (commutes(angle)) out.push_back(HPath::so3(a, ThetaSchedule::constant(angle)));
    }
    return out;
}

} // namespace

AlgElem SystemBundle::default_xi0() const {
    if (name == "heavy_top") return AlgElem{algebra, Eigen::Vector3d(1.0, 0.0, 0.0)};
    if (name == "nematic" || name == "nematic_projected")
        return AlgElem{algebra, Eigen::Vector3d(0.4, 0.2, 0.3)};
    if (name == "hs1d") return AlgElem{algebra, sine_field(params.grid_size, 0.08)};
    if (name == "density_hs1d") return AlgElem{algebra, sine_field(params.grid_size, 0.1)};
    if (name == "spin_lattice") {
        const int n = params.grid_size;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
        const Eigen::VectorXd s = sine_field(n, 1.0), c = cosine_field(n, 0.3);
        for (int j = 0; j < n; ++j) {
            v[3 * j + 0] = s[j];
            v[3 * j + 1] = c[j];
        }
        return AlgElem{algebra, std::move(v)};
    }
    throw ConfigError("default_xi0: unknown system " + name);
}

std::optional<AdvectedState> SystemBundle::default_a0() const {
    if (!action) return std::nullopt;
    if (name == "heavy_top") return AdvectedState{*action, Eigen::Vector3d(0.0, 0.0, 1.0)};
    if (name == "nematic" || name == "nematic_projected")
        return AdvectedState{*action, Eigen::Vector3d(1.0, 0.0, 1.0).normalized()};
    if (name == "density_hs1d") {
        const int n = params.grid_size;
        return AdvectedState{*action,
                             Eigen::VectorXd(Eigen::VectorXd::Ones(n) + cosine_field(n, 0.2))};
    }
    if (name == "spin_lattice") {
        const int n = params.grid_size;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(3 * n);
        const Eigen::VectorXd c = cosine_field(n, 0.2);
        for (int j = 0; j < n; ++j) g[3 * j + 2] = c[j];
        return AdvectedState{*action, std::move(g)};
    }
    throw ConfigError("default_a0: unknown system " + name);
}

SystemBundle build_system(const std::string& name, const SystemParams& params) {
    SystemBundle sys;
    sys.name = name;
    sys.params = params;

    if (name == "heavy_top") {
        if (params.inertia.minCoeff() <= 0)
            throw ConfigError("heavy_top: inertia moments must be positive");
        sys.algebra = AlgebraDescriptor::so3();
        sys.action = ActionDescriptor{ActionKind::LinearR3, sys.algebra, params.sigma};
        sys.family = EquationFamily::Advected;
        sys.lagrangian = heavy_top_lagrangian(params.inertia, params.lambda_vec, *sys.action);
        sys.h_paths = heavy_top_paths(params.inertia, params.lambda_vec);
        sys.conserved = {"energy", "gamma_norm2", "mu_dot_gamma"};
        return sys;
    }

    if (name == "nematic" || name == "nematic_projected") {
        if (params.j <= 0) throw ConfigError("nematic: j must be positive");
        if (std::abs(params.k_axis.norm() - 1.0) > 1e-10)
            throw ConfigError("nematic: |k| must be 1");
        const bool projected = (name == "nematic_projected");
        sys.algebra = AlgebraDescriptor::so3();
        sys.action = ActionDescriptor{ActionKind::SphereSo3, sys.algebra, params.sigma};
        sys.family = EquationFamily::Breaking;
        sys.lagrangian =
            nematic_lagrangian(params.j, params.lambda_nem, params.k_axis, projected, *sys.action);
        if (projected) {
            // the projected kinetic term is invariant under the full
            // time-dependent rotation family about k
            sys.h_paths = {HPath::so3(params.k_axis, ThetaSchedule::constant(0.9)),
                           HPath::so3(params.k_axis, ThetaSchedule::linear(0.7)),
                           HPath::so3(params.k_axis, ThetaSchedule::sinusoidal(0.4, 1.3))};
        } else {
            // the unprojected Lagrangian admits only constant rotations about k
            sys.h_paths = {HPath::so3(params.k_axis, ThetaSchedule::constant(0.8)),
                           HPath::so3(params.k_axis, ThetaSchedule::constant(1.9)),
                           HPath::so3(params.k_axis, ThetaSchedule::constant(2.6))};
        }
        sys.conserved = {"energy", "m_norm"};
        return sys;
    }

    if (name == "hs1d") {
        validate_common(params);
        sys.algebra = AlgebraDescriptor::vect_s1(params.grid_size);
        sys.family = EquationFamily::Plain;
        sys.lagrangian = hs1d_lagrangian(sys.algebra);
        sys.h_paths = {HPath::rotation_s1(sys.algebra, ThetaSchedule::constant(0.9)),
                       HPath::rotation_s1(sys.algebra, ThetaSchedule::linear(0.7)),
                       HPath::rotation_s1(sys.algebra, ThetaSchedule::sinusoidal(0.3, 1.0))};
        sys.conserved = {"energy", "mu_mean"};
        sys.has_reference = true;
        return sys;
    }

    if (name == "density_hs1d") {
        validate_common(params);
        const auto vect = AlgebraDescriptor::vect_s1(params.grid_size);
        sys.algebra = vect;
        sys.action = ActionDescriptor{ActionKind::DensityS1, vect};
        sys.family = EquationFamily::Advected;
        sys.lagrangian = density_hs1d_lagrangian(*sys.action, params.rho_min);
        sys.h_paths = {HPath::rotation_s1(vect, ThetaSchedule::constant(0.9)),
                       HPath::rotation_s1(vect, ThetaSchedule::linear(0.7)),
                       HPath::rotation_s1(vect, ThetaSchedule::sinusoidal(0.3, 1.0))};
        sys.conserved = {"energy", "mu_mean"};
        sys.has_reference = true;
        return sys;
    }

    if (name == "spin_lattice") {
        validate_common(params);
        if (params.spin_ell < 1 || params.spin_ell > 3)
            throw ConfigError("spin_lattice: spin_ell must be 1, 2 or 3");
        const auto gauge = AlgebraDescriptor::gauge_so3(params.grid_size);
        sys.algebra = gauge;
        sys.action = ActionDescriptor{ActionKind::ConnectionGauge, gauge, +1.0,
                                      CocycleKind::GaugeLogDerivative};
        sys.family = EquationFamily::Affine;
        sys.lagrangian = spin_lagrangian(*sys.action, params.spin_ell);
        sys.h_paths = {
            HPath::const_gauge(gauge, Eigen::Vector3d(0, 0, 1), ThetaSchedule::constant(1.1)),
            HPath::const_gauge(gauge, Eigen::Vector3d(1, 1, 1).normalized(),
                               ThetaSchedule::linear(0.8)),
            HPath::const_gauge(gauge, Eigen::Vector3d(1, 0, 0),
                               ThetaSchedule::sinusoidal(0.5, 1.2))};
        sys.conserved = {"energy", "spin_compatibility"};
        sys.has_reference = (params.spin_ell == 3);
        return sys;
    }

    throw ConfigError("build_system: unknown system " + name);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> reference_rhs(const SystemBundle& system,
                                                          const AlgElem& xi,
                                                          const AdvectedState* a) {
    if (!system.has_reference)
        throw ConfigError("reference_rhs: no reference declared for " + system.name);
    if (xi.desc != system.algebra) throw ShapeError("reference_rhs: descriptor mismatch");

    if (system.name == "hs1d") {
        // d/dt u_xx = -2 u_x u_xx - u u_xxx with mu = -u_xx, same stencil,
        // composed independently of the generic operators.
        const int n = system.algebra.grid_size();
        const Eigen::VectorXd w1 = grid::derivative(xi.coords, n);
        const Eigen::VectorXd w2 = grid::derivative(w1, n);
        const Eigen::VectorXd w3 = grid::derivative(w2, n);
        Eigen::VectorXd mu_dot =
            (2.0 * w1.array() * w2.array() + xi.coords.array() * w3.array()).matrix();
        return {std::move(mu_dot), Eigen::VectorXd()};
    }

    if (system.name == "density_hs1d") {
        if (!a) throw ShapeError("reference_rhs: density state required");
        // d/dt d(rho div u) + d L_u (rho div u) + d(rho (div u)^2) = 0 and
        // d/dt rho + div(rho u) = 0, with m = rho u_x and mu = -m_x.
        const int n = system.algebra.grid_size();
        const Eigen::VectorXd ux = grid::derivative(xi.coords, n);
        const Eigen::VectorXd m = (a->value.array() * ux.array()).matrix();
        const Eigen::VectorXd mx = grid::derivative(m, n);
        const Eigen::VectorXd adv = (xi.coords.array() * mx.array()).matrix();
        const Eigen::VectorXd quad = (a->value.array() * ux.array() * ux.array()).matrix();
        Eigen::VectorXd mu_dot = grid::derivative(adv, n) + grid::derivative(quad, n);
        Eigen::VectorXd rho_dot =
            -grid::derivative((a->value.array() * xi.coords.array()).matrix(), n);
        return {std::move(mu_dot), std::move(rho_dot)};
    }

    if (system.name == "spin_lattice") {
        if (!a) throw ShapeError("reference_rhs: connection state required");
        // d/dt mu_j = -mu_j x xi_j - 2 (D gamma)_j with mu = -2 D(D xi), and
        // gamma_dot_j = xi_j x gamma_j - (D xi)_j.
        const int n = system.algebra.grid_size();
        const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
        const Eigen::VectorXd mu = -2.0 * grid::derivative(dxi, n, 3);
        const Eigen::VectorXd dgamma = grid::derivative(a->value, n, 3);
        Eigen::VectorXd mu_dot(3 * n), gamma_dot(3 * n);
        for (int j = 0; j < n; ++j) {
            const Eigen::Vector3d mj = mu.segment<3>(3 * j);
            const Eigen::Vector3d xj = xi.coords.segment<3>(3 * j);
            const Eigen::Vector3d gj = a->value.segment<3>(3 * j);
            mu_dot.segment<3>(3 * j) = -mj.cross(xj) - 2.0 * dgamma.segment<3>(3 * j);
            gamma_dot.segment<3>(3 * j) = xj.cross(gj) - dxi.segment<3>(3 * j);
        }
        return {std::move(mu_dot), std::move(gamma_dot)};
    }

    throw ConfigError("reference_rhs: no reference for " + system.name);
}

} // namespace epred
