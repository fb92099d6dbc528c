#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epred/grid.hpp"
#include "epred/lagrangian.hpp"
#include "epred/random_fields.hpp"
#include "epred/systems.hpp"

#include <cmath>
#include <numbers>

using namespace epred;

namespace {

constexpr double kPi = std::numbers::pi;
const AlgebraDescriptor so3 = AlgebraDescriptor::so3();

Eigen::VectorXd sampled(int n, const std::function<double(double)>& f) {
    const Eigen::VectorXd x = grid::nodes(n);
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out[j] = f(x[j]);
    return out;
}

std::optional<AdvectedState> random_param(Rng& rng, const ReducedLagrangian& l,
                                          const SystemBundle& sys, const FieldShape& shape) {
    (void)l;
    if (!sys.action) return std::nullopt;
    return random_advected_state(rng, *sys.action, shape);
}

} // namespace

TEST_CASE("builtin catalog values") {
    SUBCASE("hs1d of sin x is pi/2 at the stencil budget") {
        for (int n : {128, 2048}) {
            const auto l = hs1d_lagrangian(AlgebraDescriptor::vect_s1(n));
            const AlgElem u{AlgebraDescriptor::vect_s1(n),
                            sampled(n, [](double x) { return std::sin(x); })};
            const double err = std::abs(l.eval(u, nullptr) - kPi / 2);
            const double dx = 2 * kPi / n;
            CHECK(err <= kPi * std::pow(dx, 4) / 30.0 + 1e-12);
            if (n == 2048) CHECK(err <= 1e-10);
        }
    }
    SUBCASE("heavy top direct substitution") {
        const ActionDescriptor lin{ActionKind::LinearR3, so3};
        const auto l = heavy_top_lagrangian({1, 2, 3}, {0, 0, 1}, lin);
        const AlgElem om{so3, Eigen::Vector3d(1, 0, 0)};
        const AdvectedState gam{lin, Eigen::Vector3d(0, 0, 1)};
        CHECK(l.eval(om, &gam) == doctest::Approx(-0.5).epsilon(1e-14));
    }
    SUBCASE("nematic vanishes for xi = 0, m perp k") {
        const ActionDescriptor sph{ActionKind::SphereSo3, so3};
        const auto l = nematic_lagrangian(1.0, 1.0, {0, 0, 1}, false, sph);
        const AdvectedState m{sph, Eigen::Vector3d(1, 0, 0)};
        CHECK(l.eval(AlgElem::zero(so3), &m) == 0.0);
    }
    SUBCASE("all eight builtins are constructible") {
        CHECK(builtin_lagrangians(64).size() == 8);
    }
}

TEST_CASE("fd oracles match analytic derivatives") {
    SUBCASE("quadratic is exact") {
        const ActionDescriptor lin{ActionKind::LinearR3, so3};
        const auto l = heavy_top_lagrangian({1, 1, 1}, {0, 0, 0}, lin);
        const AlgElem xi{so3, Eigen::Vector3d(0.7, -0.3, 1.1)};
        const AdvectedState a{lin, Eigen::Vector3d::Zero()};
        const AlgElem eta{so3, Eigen::Vector3d(0.2, 0.5, -0.4)};
        CHECK(std::abs(fd_d_xi(l, xi, &a, eta) - xi.coords.dot(eta.coords)) <= 1e-9);
    }
    SUBCASE("heavy top gradient") {
        const ActionDescriptor lin{ActionKind::LinearR3, so3};
        const auto l = heavy_top_lagrangian({1, 2, 3}, {0, 0, 1}, lin);
        Rng rng(31);
        FieldShape shape;
        const AlgElem om = random_alg_elem(rng, so3, shape);
        const AdvectedState gam{lin, random_unit_vector(rng)};
        for (int i = 0; i < 8; ++i) {
            const AlgElem eta = random_alg_elem(rng, so3, shape);
            const double analytic = pair(l.d_xi(om, &gam), eta);
            CHECK(std::abs(fd_d_xi(l, om, &gam, eta) - analytic) <= 1e-8);
        }
    }
    SUBCASE("nematic d_a along tangential directions") {
        const ActionDescriptor sph{ActionKind::SphereSo3, so3};
        const double lambda = 1.4;
        const auto l = nematic_lagrangian(1.0, lambda, {0, 0, 1}, false, sph);
        Rng rng(33);
        for (int i = 0; i < 8; ++i) {
            const Eigen::Vector3d m = random_unit_vector(rng);
            Eigen::Vector3d eta = random_unit_vector(rng);
            eta -= m * m.dot(eta); // tangential, keeps |m + h eta| = 1 + O(h^2)
            const AdvectedState ms{sph, m};
            const AlgElem xi{so3, Eigen::Vector3d(0.3, 0.1, -0.2)};
            const double expect = -lambda * m.z() * eta.z();
            CHECK(std::abs(fd_d_a(l, xi, &ms, eta) - expect) <= 1e-7);
        }
    }
    SUBCASE("all eight builtins, 16 random directions each") {
        const int n = 64;
        Rng rng(35);
        FieldShape shape;
        shape.max_mode = 3;
        shape.amplitude = 0.6;
        auto system_of = [](const std::string& lagrangian_name) -> std::string {
            if (lagrangian_name.rfind("spin", 0) == 0) return "spin_lattice";
            return lagrangian_name;
        };
        SystemParams params;
        params.grid_size = n;
        for (const auto& l : builtin_lagrangians(n)) {
            const SystemBundle sys = build_system(system_of(l.name), params);
            const AlgElem xi = random_alg_elem(rng, sys.algebra, shape);
            const auto a = random_param(rng, l, sys, shape);
            const AdvectedState* ap = a ? &*a : nullptr;
            for (int d = 0; d < 16; ++d) {
                const AlgElem eta = random_alg_elem(rng, sys.algebra, shape);
                const double analytic = pair(l.d_xi(xi, ap), eta);
                const double fd = fd_d_xi(l, xi, ap, eta);
                CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
                if (l.d_a && ap) {
                    Eigen::VectorXd dir =
                        random_alg_elem(rng, sys.algebra, shape).coords.head(ap->value.size());
                    if (ap->desc.kind == ActionKind::SphereSo3) {
                        Eigen::Vector3d d3 = dir.head<3>();
                        d3 -= ap->value.head<3>() * ap->value.head<3>().dot(d3);
                        dir = d3;
                    }
                    const double analytic_a = param_pair(ap->desc, dir, l.d_a(xi, ap));
                    const double fd_a = fd_d_a(l, xi, ap, dir);
                    CHECK(std::abs(fd_a - analytic_a) <=
                          1e-6 * std::max(1.0, std::abs(analytic_a)));
                }
            }
        }
    }
}

TEST_CASE("inertia solves") {
    SUBCASE("zero momentum") {
        const auto vect = AlgebraDescriptor::vect_s1(64);
        const auto l = hs1d_lagrangian(vect);
        CHECK(inertia_solve(l, DualElem::zero(vect), nullptr).coords.norm() == 0.0);
    }
    SUBCASE("hs1d eigenfunction round trips") {
        for (int n : {128, 2048}) {
            const auto vect = AlgebraDescriptor::vect_s1(n);
            const auto l = hs1d_lagrangian(vect);
            const AlgElem u{vect, sampled(n, [](double x) { return std::sin(x); })};
            // discrete round trip is exact to solver precision
            const AlgElem back = inertia_solve(l, l.d_xi(u, nullptr), nullptr);
            CHECK((back.coords - u.coords).cwiseAbs().maxCoeff() <= 1e-9);
            // and the analytic eigenvalue -d^2 sin = sin holds at the stencil budget
            const DualElem mu{vect, u.coords};
            const AlgElem xi = inertia_solve(l, mu, nullptr);
            const double dx = 2 * kPi / n;
            CHECK((xi.coords - u.coords).cwiseAbs().maxCoeff() <=
                  2.5 * std::pow(dx, 4) / 30.0 + 1e-9);
            if (n == 2048) CHECK((xi.coords - u.coords).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
    SUBCASE("heavy top componentwise division") {
        const ActionDescriptor lin{ActionKind::LinearR3, so3};
        const auto l = heavy_top_lagrangian({1, 2, 3}, {0, 0, 1}, lin);
        const DualElem mu{so3, Eigen::Vector3d(1, 2, 3)};
        CHECK((inertia_solve(l, mu, nullptr).coords - Eigen::Vector3d::Ones()).norm() <= 1e-15);
    }
    SUBCASE("density round trip with refactorization") {
        const int n = 128;
        const auto vect = AlgebraDescriptor::vect_s1(n);
        const ActionDescriptor dens{ActionKind::DensityS1, vect};
        const auto l = density_hs1d_lagrangian(dens);
        Rng rng(37);
        FieldShape shape;
        shape.max_mode = 3;
        for (int i = 0; i < 3; ++i) {
            const AdvectedState rho = random_advected_state(rng, dens, shape);
            Eigen::VectorXd u0 = random_scalar_field(rng, n, shape);
            u0.array() -= u0.mean();
            const AlgElem u{vect, u0};
            const AlgElem back = inertia_solve(l, l.d_xi(u, &rho), &rho);
            CHECK((back.coords - u.coords).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
    SUBCASE("spin l3 componentwise poisson") {
        const int n = 64;
        const auto gauge = AlgebraDescriptor::gauge_so3(n);
        const ActionDescriptor conn{ActionKind::ConnectionGauge, gauge, +1.0,
                                    CocycleKind::GaugeLogDerivative};
        const auto l = spin_lagrangian(conn, 3);
        Rng rng(39);
        FieldShape shape;
        shape.max_mode = 3;
        const AlgElem xi = random_alg_elem(rng, gauge, shape);
        const AdvectedState gamma = random_advected_state(rng, conn, shape);
        const AlgElem back = inertia_solve(l, l.d_xi(xi, &gamma), &gamma);
        // the preimage is fixed on the mean-zero complement
        Eigen::VectorXd expect = xi.coords;
        for (int c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (int j = 0; j < n; ++j) mean += xi.coords[3 * j + c];
            mean /= n;
            for (int j = 0; j < n; ++j) expect[3 * j + c] -= mean;
        }
        CHECK((back.coords - expect).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("kernel compatibility violation raises") {
        const auto vect = AlgebraDescriptor::vect_s1(64);
        const auto l = hs1d_lagrangian(vect);
        const DualElem bad{vect, Eigen::VectorXd::Ones(64)}; // pure kernel direction
        CHECK_THROWS_AS(inertia_solve(l, bad, nullptr, 1e-8), NumericalError);
    }
    SUBCASE("l1/l2 are not invertible") {
        const auto gauge = AlgebraDescriptor::gauge_so3(32);
        const ActionDescriptor conn{ActionKind::ConnectionGauge, gauge, +1.0,
                                    CocycleKind::GaugeLogDerivative};
        for (int which : {1, 2}) {
            const auto l = spin_lagrangian(conn, which);
            CHECK_FALSE(l.integrable);
            CHECK_THROWS_AS(inertia_solve(l, DualElem::zero(gauge), nullptr), NumericalError);
        }
    }
}

TEST_CASE("kernel annihilation: d_xi lands in the kernel annihilator") {
    Rng rng(41);
    FieldShape shape;
    shape.max_mode = 3;
    const int n = 64;
    for (const auto& l : builtin_lagrangians(n)) {
        if (l.kernel.basis.empty()) continue;
        const AlgebraDescriptor alg = l.kernel.basis.front().desc;
        const AlgElem xi = random_alg_elem(rng, alg, shape);
        std::optional<AdvectedState> a;
        if (l.name == "density_hs1d")
            a = random_advected_state(
                rng, ActionDescriptor{ActionKind::DensityS1, alg}, shape);
        else if (l.name.rfind("spin", 0) == 0)
            a = random_advected_state(
                rng,
                ActionDescriptor{ActionKind::ConnectionGauge, alg, +1.0,
                                 CocycleKind::GaugeLogDerivative},
                shape);
        else if (l.name == "nematic_projected")
            a = AdvectedState{ActionDescriptor{ActionKind::SphereSo3, alg},
                              random_unit_vector(rng)};
        const DualElem mu = l.d_xi(xi, a ? &*a : nullptr);
        for (const auto& k : l.kernel.basis) CHECK(std::abs(pair(mu, k)) <= 1e-12);
    }
}
