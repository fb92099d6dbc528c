#include "epred/dynamics.hpp"

#include "epred/systems.hpp"

#include <cmath>
#include <sstream>

namespace epred {

namespace {

bool family_needs_parameter(EquationFamily family) { return family != EquationFamily::Plain; }

void require_family_state(EquationFamily family, const AdvectedState* a, const char* who) {
    if (family_needs_parameter(family) && a == nullptr)
        throw ShapeError(std::string(who) + ": family requires an advected parameter");
    if (family == EquationFamily::Affine && a &&
        a->desc.cocycle != CocycleKind::GaugeLogDerivative)
        throw ShapeError(std::string(who) + ": affine family requires a cocycle");
    if (family == EquationFamily::Breaking && a && a->desc.kind != ActionKind::SphereSo3)
        throw ShapeError(std::string(who) + ": breaking family requires a manifold parameter");
}

} // namespace

DualElem ep_forcing(EquationFamily family, const ReducedLagrangian& l, const AlgElem& xi,
                    const AdvectedState* a) {
    require_family_state(family, a, "ep_forcing");
    switch (family) {
        case EquationFamily::Plain:
            return DualElem::zero(xi.desc);
        case EquationFamily::Advected:
            return diamond(l.d_a(xi, a), *a);
        case EquationFamily::Breaking:
            return momentum_map(*a, l.d_a(xi, a));
        case EquationFamily::Affine: {
            const Eigen::VectorXd da = l.d_a(xi, a);
            DualElem f = diamond(da, *a);
            f.coords += dc_transpose(a->desc, da).coords;
            return f;
        }
    }
    throw ShapeError("ep_forcing: unknown family");
}

DualElem ep_residual(EquationFamily family, const ReducedLagrangian& l, const CurvePair& curve,
                     double t, double h) {
    const AlgElem xi_t = curve.xi(t);
    const auto a_t = curve.a_at(t);
    require_family_state(family, a_t ? &*a_t : nullptr, "ep_residual");

    const Eigen::VectorXd dmu = time_derivative(
        [&](double s) {
            const AlgElem xs = curve.xi(s);
            const auto as = curve.a_at(s);
            return l.d_xi(xs, as ? &*as : nullptr).coords;
        },
        t, h);

    const DualElem mu_t = l.d_xi(xi_t, a_t ? &*a_t : nullptr);
    const DualElem ad_term = ad_star(xi_t, mu_t);
    const DualElem force = ep_forcing(family, l, xi_t, a_t ? &*a_t : nullptr);
    return DualElem{xi_t.desc, dmu + ad_term.coords - force.coords};
}

Eigen::VectorXd advect_rhs(EquationFamily family, const AlgElem& xi, const AdvectedState& a) {
    require_family_state(family, &a, "advect_rhs");
    Eigen::VectorXd rhs = act_infinitesimal(xi, a);
    if (family == EquationFamily::Affine) rhs += dc_eval(a.desc, xi);
    return rhs;
}

Trajectory integrate(const SystemBundle& system, const AlgElem& xi0,
                     const std::optional<AdvectedState>& a0, double T, double dt,
                     const IntegrateOptions& opts) {
    if (!system.lagrangian.integrable)
        throw NumericalError("integrate: Lagrangian is not integrable");
    if (!(dt > 0) || !(T > 0)) throw ShapeError("integrate: T and dt must be positive");
    require_family_state(system.family, a0 ? &*a0 : nullptr, "integrate");
    if (xi0.desc != system.algebra) throw ShapeError("integrate: initial xi descriptor");

    const ReducedLagrangian& l = system.lagrangian;
    const int dim = system.algebra.dim();
    const int adim = a0 ? static_cast<int>(a0->value.size()) : 0;
    const bool sphere = a0 && a0->desc.kind == ActionKind::SphereSo3;

    // packed state y = [mu; a]
    auto rhs = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const DualElem mu{system.algebra, y.head(dim)};
        std::optional<AdvectedState> a;
        if (adim > 0) a.emplace(a0->desc, y.tail(adim));
        const AlgElem xi = l.solve(mu, a ? &*a : nullptr, opts.kernel_tol);
        Eigen::VectorXd dy(dim + adim);
        dy.head(dim) =
            -ad_star(xi, mu).coords + ep_forcing(system.family, l, xi, a ? &*a : nullptr).coords;
        if (adim > 0) dy.tail(adim) = advect_rhs(system.family, xi, *a);
        return dy;
    };

    const int nsteps = static_cast<int>(std::llround(T / dt));
    Eigen::VectorXd y(dim + adim);
    y.head(dim) = l.d_xi(xi0, a0 ? &*a0 : nullptr).coords;
    if (adim > 0) y.tail(adim) = a0->value;

    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(nsteps + 1);
    traj.states.reserve(nsteps + 1);
    traj.xi.reserve(nsteps + 1);

    auto record = [&](double t) {
        DualElem mu{system.algebra, y.head(dim)};
        std::optional<AdvectedState> a;
        if (adim > 0) a.emplace(a0->desc, y.tail(adim));
        traj.times.push_back(t);
        traj.xi.push_back(l.solve(mu, a ? &*a : nullptr, opts.kernel_tol));
        traj.states.push_back(EPState{t, std::move(mu), std::move(a)});
    };
    record(0.0);

    for (int k = 0; k < nsteps; ++k) {
        const Eigen::VectorXd k1 = rhs(y);
        const Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(y + dt * k3);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) {
            std::ostringstream os;
            os << "integrate: non-finite state at t = " << (k + 1) * dt;
            throw NumericalError(os.str());
        }
        if (sphere) y.tail(3).normalize();
        record((k + 1) * dt);
    }
    return traj;
}

std::map<std::string, double> conserved_quantities(const SystemBundle& system,
                                                   const EPState& state) {
    const ReducedLagrangian& l = system.lagrangian;
    const AdvectedState* a = state.a ? &*state.a : nullptr;
    const AlgElem xi = l.solve(state.mu, a, 1e-3);
    std::map<std::string, double> out;
    for (const auto& name : system.conserved) {
        if (name == "energy") {
            out[name] = pair(state.mu, xi) - l.eval(xi, a);
        } else if (name == "gamma_norm2") {
            out[name] = a ? a->value.squaredNorm() : 0.0;
        } else if (name == "mu_dot_gamma") {
            out[name] = a ? state.mu.coords.dot(a->value) : 0.0;
        } else if (name == "m_norm") {
            out[name] = a ? a->value.norm() : 0.0;
        } else if (name == "mu_mean") {
            out[name] = state.mu.coords.mean();
        } else if (name == "spin_compatibility") {
            // sum_j mu_j x xi_j dx; vanishes identically when mu = -2 Lap xi
            // by the symmetry of the squared stencil.
            const int n = system.algebra.grid_size();
            Eigen::Vector3d s = Eigen::Vector3d::Zero();
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector3d m = state.mu.coords.segment<3>(3 * j);
                const Eigen::Vector3d x = xi.coords.segment<3>(3 * j);
                s += m.cross(x);
            }
            out[name] = (s * system.algebra.spacing()).norm();
        } else {
            throw ConfigError("conserved_quantities: unknown quantity " + name);
        }
    }
    return out;
}

} // namespace epred
