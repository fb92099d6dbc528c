#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epred/dynamics.hpp"
#include "epred/grid.hpp"
#include "epred/random_fields.hpp"
#include "epred/systems.hpp"

#include <cmath>

using namespace epred;

namespace {

CurvePair constant_curve(const AlgElem& xi, const std::optional<AdvectedState>& a) {
    CurvePair c;
    c.xi = [xi](double) { return xi; };
    if (a) c.a = [a](double) { return a; };
    return c;
}

double max_drift(const SystemBundle& sys, const Trajectory& traj, const std::string& name) {
    const auto q0 = conserved_quantities(sys, traj.states.front());
    double worst = 0.0;
    const size_t stride = std::max<size_t>(1, traj.states.size() / 200);
    for (size_t i = 1; i < traj.states.size(); i += stride) {
        const auto q = conserved_quantities(sys, traj.states[i]);
        worst = std::max(worst, std::abs(q.at(name) - q0.at(name)));
    }
    return worst;
}

} // namespace

TEST_CASE("residual of equilibria") {
    SUBCASE("hs1d constant field in the kernel direction") {
        SystemParams p;
        p.grid_size = 64;
        const auto sys = build_system("hs1d", p);
        const AlgElem u{sys.algebra, Eigen::VectorXd::Constant(64, 0.7)};
        const CurvePair c = constant_curve(u, std::nullopt);
        const DualElem r = ep_residual(sys.family, sys.lagrangian, c, 1.0, 1e-3);
        CHECK(r.coords.cwiseAbs().maxCoeff() == 0.0); // d_xi vanishes identically
    }
    SUBCASE("sleeping heavy top") {
        const auto sys = build_system("heavy_top", {});
        const AlgElem om{sys.algebra, Eigen::Vector3d(0, 0, 2.0)};
        const AdvectedState gam{*sys.action, Eigen::Vector3d(0, 0, 1)};
        const CurvePair c = constant_curve(om, gam);
        const DualElem r = ep_residual(sys.family, sys.lagrangian, c, 1.0, 1e-3);
        CHECK(r.coords.cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(advect_rhs(sys.family, om, gam).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("advect_rhs examples") {
    SUBCASE("zero generator") {
        const auto sys = build_system("heavy_top", {});
        const AdvectedState gam{*sys.action, Eigen::Vector3d(0.2, -0.4, 0.8)};
        CHECK(advect_rhs(sys.family, AlgElem::zero(sys.algebra), gam).norm() == 0.0);
    }
    SUBCASE("affine family with zero generator") {
        SystemParams p;
        p.grid_size = 32;
        const auto sys = build_system("spin_lattice", p);
        const AdvectedState gamma = *sys.default_a0();
        CHECK(advect_rhs(sys.family, AlgElem::zero(sys.algebra), gamma).norm() == 0.0);
    }
    SUBCASE("sphere cross product") {
        const auto sys = build_system("nematic", {});
        const AlgElem e3{sys.algebra, Eigen::Vector3d(0, 0, 1)};
        const AdvectedState m{*sys.action, Eigen::Vector3d(1, 0, 0)};
        CHECK((advect_rhs(sys.family, e3, m) - Eigen::Vector3d(0, 1, 0)).norm() <= 1e-15);
    }
}

TEST_CASE("integrate basics") {
    SUBCASE("zero initial data stays zero") {
        SystemParams p;
        p.grid_size = 32;
        const auto sys = build_system("hs1d", p);
        const Trajectory traj =
            integrate(sys, AlgElem::zero(sys.algebra), std::nullopt, 0.1, 1e-2);
        CHECK(traj.states.size() == 11);
        for (const auto& s : traj.states) CHECK(s.mu.coords.norm() == 0.0);
    }
    SUBCASE("rejects non-integrable Lagrangians") {
        SystemParams p;
        p.grid_size = 32;
        p.spin_ell = 1;
        const auto sys = build_system("spin_lattice", p);
        CHECK_THROWS_AS(
            integrate(sys, sys.default_xi0(), sys.default_a0(), 0.1, 1e-2), NumericalError);
    }
}

TEST_CASE("heavy top conservation and order") {
    const auto sys = build_system("heavy_top", {});
    SUBCASE("energy and Casimirs over T = 10") {
        const Trajectory traj =
            integrate(sys, sys.default_xi0(), sys.default_a0(), 10.0, 1e-3);
        const auto q0 = conserved_quantities(sys, traj.states.front());
        CHECK(q0.at("energy") == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(max_drift(sys, traj, "energy") / std::abs(q0.at("energy")) <= 1e-8);
        CHECK(max_drift(sys, traj, "gamma_norm2") <= 1e-9);
        CHECK(max_drift(sys, traj, "mu_dot_gamma") <= 1e-9);
    }
    SUBCASE("temporal convergence order 4 against a fine reference") {
        // long enough horizon that the dt = 1e-3 error clears the rounding floor
        const double T = 10.0;
        auto final_state = [&](double dt) {
            const Trajectory t = integrate(sys, sys.default_xi0(), sys.default_a0(), T, dt);
            Eigen::VectorXd y(6);
            y.head(3) = t.states.back().mu.coords;
            y.tail(3) = t.states.back().a->value;
            return y;
        };
        // steps chosen so every error clears the reference's rounding noise
        const Eigen::VectorXd ref = final_state(1e-5);
        const double e1 = (final_state(8e-3) - ref).cwiseAbs().maxCoeff();
        const double e2 = (final_state(4e-3) - ref).cwiseAbs().maxCoeff();
        const double e3 = (final_state(2e-3) - ref).cwiseAbs().maxCoeff();
        const double p12 = std::log2(e1 / e2);
        const double p23 = std::log2(e2 / e3);
        CHECK(p12 == doctest::Approx(4.0).epsilon(0.05));
        CHECK(p23 == doctest::Approx(4.0).epsilon(0.05));
    }
    SUBCASE("residual of the integrated trajectory") {
        const double dt = 1e-3;
        const Trajectory traj = integrate(sys, sys.default_xi0(), sys.default_a0(), 1.0, dt);
        // curve through the recorded samples; stencil steps land on samples
        CurvePair c;
        c.xi = [&](double t) {
            const int i = static_cast<int>(std::llround(t / dt));
            return traj.xi[i];
        };
        c.a = [&](double t) -> std::optional<AdvectedState> {
            const int i = static_cast<int>(std::llround(t / dt));
            return traj.states[i].a;
        };
        double sup = 0.0;
        for (int i = 2; i + 2 < static_cast<int>(traj.states.size()); i += 37) {
            const DualElem r = ep_residual(sys.family, sys.lagrangian, c, traj.times[i], dt);
            sup = std::max(sup, r.coords.cwiseAbs().maxCoeff());
        }
        CHECK(sup <= 1e-6);
    }
}

TEST_CASE("nematic energy conservation and sphere norm") {
    for (const char* name : {"nematic", "nematic_projected"}) {
        const auto sys = build_system(name, {});
        const Trajectory traj = integrate(sys, sys.default_xi0(), sys.default_a0(), 10.0, 1e-3);
        const auto q0 = conserved_quantities(sys, traj.states.front());
        CHECK(max_drift(sys, traj, "energy") / std::abs(q0.at("energy")) <= 1e-8);
        for (size_t i = 0; i < traj.states.size(); i += 100)
            CHECK(std::abs(traj.states[i].a->value.norm() - 1.0) <= 1e-10);
    }
    // pre-renormalization defect of one raw RK4 step at dt = 1e-3, rebuilt
    // from the public operators
    const auto sys = build_system("nematic", {});
    const double dt = 1e-3;
    const AlgElem xi0 = sys.default_xi0();
    const AdvectedState m0 = *sys.default_a0();
    Eigen::VectorXd y(6);
    y.head(3) = sys.lagrangian.d_xi(xi0, &m0).coords;
    y.tail(3) = m0.value;
    auto rhs = [&](const Eigen::VectorXd& v) {
        const DualElem mu{sys.algebra, v.head(3)};
        const AdvectedState m{*sys.action, v.tail(3)};
        const AlgElem xi = sys.lagrangian.solve(mu, &m, 1e-6);
        Eigen::VectorXd dv(6);
        dv.head(3) =
            -ad_star(xi, mu).coords + ep_forcing(sys.family, sys.lagrangian, xi, &m).coords;
        dv.tail(3) = advect_rhs(sys.family, xi, m);
        return dv;
    };
    const Eigen::VectorXd k1 = rhs(y), k2 = rhs(y + 0.5 * dt * k1), k3 = rhs(y + 0.5 * dt * k2),
                          k4 = rhs(y + dt * k3);
    const Eigen::VectorXd y1 = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    CHECK(std::abs(y1.tail(3).norm() - 1.0) <= 1e-12);
}

TEST_CASE("lattice conservation and kernel compatibility") {
    SUBCASE("hs1d") {
        const auto sys = build_system("hs1d", {});
        const Trajectory traj = integrate(sys, sys.default_xi0(), std::nullopt, 1.0, 1e-3);
        const auto q0 = conserved_quantities(sys, traj.states.front());
        CHECK(max_drift(sys, traj, "energy") / std::abs(q0.at("energy")) <= 1e-7);
        // the h*-component of mu vanishes identically along the run
        CHECK(max_drift(sys, traj, "mu_mean") <= 1e-12);
        for (size_t i = 0; i < traj.states.size(); i += 200) {
            const double kernel_component =
                std::abs(traj.states[i].mu.coords.sum()) * sys.algebra.spacing();
            CHECK(kernel_component <= 1e-12);
        }
        // energy = l(u) for the quadratic Lagrangian
        const AlgElem u0 = sys.default_xi0();
        CHECK(conserved_quantities(sys, traj.states.front()).at("energy") ==
              doctest::Approx(sys.lagrangian.eval(u0, nullptr)).epsilon(1e-10));
    }
    SUBCASE("density_hs1d") {
        const auto sys = build_system("density_hs1d", {});
        const Trajectory traj =
            integrate(sys, sys.default_xi0(), sys.default_a0(), 1.0, 1e-3);
        const auto q0 = conserved_quantities(sys, traj.states.front());
        CHECK(max_drift(sys, traj, "energy") / std::abs(q0.at("energy")) <= 1e-7);
    }
    SUBCASE("spin l3") {
        const auto sys = build_system("spin_lattice", {});
        const Trajectory traj =
            integrate(sys, sys.default_xi0(), sys.default_a0(), 1.0, 1e-3);
        const auto q0 = conserved_quantities(sys, traj.states.front());
        CHECK(max_drift(sys, traj, "energy") / std::abs(q0.at("energy")) <= 1e-7);
        // compatibility functional is identically zero along the run
        for (size_t i = 0; i < traj.states.size(); i += 200) {
            const auto q = conserved_quantities(sys, traj.states[i]);
            CHECK(q.at("spin_compatibility") <= 1e-12);
        }
    }
}

TEST_CASE("conserved quantities of the zero state") {
    const auto sys = build_system("heavy_top", {});
    const AdvectedState gam{*sys.action, Eigen::Vector3d(0, 0, 1)};
    EPState s{0.0, DualElem::zero(sys.algebra), gam};
    const auto q = conserved_quantities(sys, s);
    // pure potential: E = -l(0, a) = Gamma . lambda
    CHECK(q.at("energy") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate aborts on kernel-violating momentum") {
    SystemParams p;
    p.grid_size = 32;
    const auto sys = build_system("hs1d", p);
    // force a kernel component through a doctored initial mu via the solve
    // entry point: the compatibility check in the solver is what integrate
    // relies on mid-run
    const DualElem bad{sys.algebra, Eigen::VectorXd::Constant(32, 0.5)};
    CHECK_THROWS_AS(inertia_solve(sys.lagrangian, bad, nullptr, 1e-6), NumericalError);
}

TEST_CASE("ep_forcing respects the family pairing cancellation") {
    // <forcing, xi> = <d_a, advection> is the structural identity behind
    // energy conservation; verify it directly on random states
    Rng rng(57);
    FieldShape shape;
    shape.max_mode = 2;
    shape.amplitude = 0.4;
    SystemParams p;
    p.grid_size = 64;
    for (const char* name : {"heavy_top", "nematic", "nematic_projected", "density_hs1d",
                             "spin_lattice"}) {
        const auto sys = build_system(name, p);
        for (int i = 0; i < 8; ++i) {
            const AlgElem xi = random_alg_elem(rng, sys.algebra, shape);
            const AdvectedState a = random_advected_state(rng, *sys.action, shape);
            const DualElem f = ep_forcing(sys.family, sys.lagrangian, xi, &a);
            const double lhs = pair(f, xi);
            const double rhs =
                param_pair(*sys.action, advect_rhs(sys.family, xi, a),
                           sys.lagrangian.d_a(xi, &a));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
        }
    }
}
