#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epred/algebra.hpp"
#include "epred/grid.hpp"
#include "epred/random_fields.hpp"

#include <cmath>
#include <numbers>

using namespace epred;

namespace {

const AlgebraDescriptor so3 = AlgebraDescriptor::so3();

AlgElem so3_elem(double x, double y, double z) {
    return AlgElem{so3, Eigen::Vector3d(x, y, z)};
}

Eigen::VectorXd sampled(int n, const std::function<double(double)>& f) {
    const Eigen::VectorXd x = grid::nodes(n);
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out[j] = f(x[j]);
    return out;
}

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("descriptor shapes and validation") {
    CHECK(so3.dim() == 3);
    CHECK(AlgebraDescriptor::vect_s1(128).dim() == 128);
    CHECK(AlgebraDescriptor::gauge_so3(64).dim() == 192);
    const auto prod = AlgebraDescriptor::product({so3, AlgebraDescriptor::vect_s1(16)});
    CHECK(prod.dim() == 19);
    CHECK_THROWS_AS(AlgebraDescriptor::vect_s1(6), ShapeError);   // too small
    CHECK_THROWS_AS(AlgebraDescriptor::vect_s1(33), ShapeError);  // odd
    CHECK_THROWS_AS((AlgElem{so3, Eigen::VectorXd::Zero(4)}), ShapeError);
    Eigen::VectorXd bad(3);
    bad << 1.0, std::nan(""), 0.0;
    CHECK_THROWS_AS((AlgElem{so3, bad}), NumericalError);
}

TEST_CASE("group element invariants") {
    Eigen::Matrix3d nonorth = Eigen::Matrix3d::Identity();
    nonorth(0, 1) = 1e-6;
    CHECK_THROWS_AS(GroupElem::rotation(nonorth), ShapeError);
    Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
    reflect(2, 2) = -1.0;
    CHECK_THROWS_AS(GroupElem::rotation(reflect), ShapeError);
}

TEST_CASE("so3 bracket is the cross product") {
    const AlgElem e1 = so3_elem(1, 0, 0), e2 = so3_elem(0, 1, 0);
    CHECK((bracket(e1, e2).coords - Eigen::Vector3d(0, 0, 1)).norm() == doctest::Approx(0.0));
    // antisymmetry on the nose
    const AlgElem x = so3_elem(0.3, -1.2, 0.7);
    CHECK(bracket(x, x).coords.norm() == 0.0);
}

TEST_CASE("vect_s1 bracket of sin and cos") {
    // ad_u v = u'v - uv' = cos^2 + sin^2 = 1; the 4th-order stencil realizes
    // it as d(1)^2-free combination with truncation |d(1) - 1| = dx^4/30.
    for (int n : {128, 512}) {
        const auto vect = AlgebraDescriptor::vect_s1(n);
        const AlgElem u{vect, sampled(n, [](double x) { return std::sin(x); })};
        const AlgElem v{vect, sampled(n, [](double x) { return std::cos(x); })};
        const Eigen::VectorXd br = bracket(u, v).coords;
        const double err = (br.array() - 1.0).abs().maxCoeff();
        const double dx = vect.spacing();
        CHECK(err <= std::pow(dx, 4) / 30.0 * 1.5 + 1e-14);
        if (n == 512) CHECK(err <= 1e-9);
    }
}

TEST_CASE("so3 ad_star examples") {
    const AlgElem e1 = so3_elem(1, 0, 0);
    const DualElem mu1{so3, Eigen::Vector3d(1, 0, 0)};
    CHECK(ad_star(e1, mu1).coords.norm() == doctest::Approx(0.0));
    const DualElem mu2{so3, Eigen::Vector3d(0, 1, 0)};
    CHECK((ad_star(e1, mu2).coords - Eigen::Vector3d(0, 0, -1)).norm() ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("vect_s1 ad_star of sin against constant momentum") {
    const int n = 128;
    const auto vect = AlgebraDescriptor::vect_s1(n);
    const AlgElem u{vect, sampled(n, [](double x) { return std::sin(x); })};
    const DualElem m{vect, Eigen::VectorXd::Ones(n)};
    // u m' + 2 u' m with m' = 0: 2 cos(x) up to the stencil symbol
    const Eigen::VectorXd expect = sampled(n, [](double x) { return 2.0 * std::cos(x); });
    CHECK((ad_star(u, m).coords - expect).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("group adjoint examples") {
    const AlgElem e1 = so3_elem(1, 0, 0);
    const GroupElem r = exp_so3(so3_elem(0, 0, kPi / 2));
    CHECK((group_ad(r, e1).coords - Eigen::Vector3d(0, 1, 0)).norm() <= 1e-12);
    const GroupElem id = GroupElem::identity(so3);
    CHECK((group_ad(id, e1).coords - e1.coords).norm() == 0.0);
}

TEST_CASE("exp_so3 basics") {
    CHECK((exp_so3(so3_elem(0, 0, 0)).matrix() - Eigen::Matrix3d::Identity()).norm() == 0.0);
    const GroupElem r = exp_so3(so3_elem(0, 0, kPi / 2));
    CHECK((r.matrix() * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(0, 1, 0)).norm() <= 1e-12);
    Rng rng(7);
    for (int i = 0; i < 32; ++i) {
        const Eigen::Vector3d w =
            random_unit_vector(rng) * std::uniform_real_distribution<double>(0.0, kPi)(rng);
        const GroupElem g = exp_so3(AlgElem{so3, w});
        const GroupElem ginv = exp_so3(AlgElem{so3, Eigen::Vector3d(-w)});
        CHECK(((g * ginv).matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    // tiny angles go through the series branch
    const GroupElem small = exp_so3(so3_elem(1e-6, 0, 0));
    CHECK((small.matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() ==
          doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("pair examples") {
    const DualElem mu{so3, Eigen::Vector3d(1, 2, 0)};
    CHECK(pair(mu, so3_elem(0, 1, 0)) == doctest::Approx(2.0));
    CHECK(pair(DualElem::zero(so3), so3_elem(1, 2, 3)) == 0.0);

    const int n = 128;
    const auto vect = AlgebraDescriptor::vect_s1(n);
    const DualElem s{vect, sampled(n, [](double x) { return std::sin(x); })};
    const AlgElem s2{vect, sampled(n, [](double x) { return std::sin(x); })};
    // trapezoid on the periodic grid is exact for band-limited integrands
    CHECK(pair(s, s2) == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("time_derivative stencil") {
    auto constant = [](double) { return Eigen::VectorXd::Constant(1, 4.2); };
    CHECK(time_derivative(constant, 0.5, 0.1)[0] == 0.0);
    auto cubic = [](double t) { return Eigen::VectorXd::Constant(1, t * t * t); };
    CHECK(time_derivative(cubic, 1.0, 0.2)[0] == doctest::Approx(3.0).epsilon(1e-13));
    auto sine = [](double t) { return Eigen::VectorXd::Constant(1, std::sin(t)); };
    CHECK(std::abs(time_derivative(sine, 0.3, 1e-2)[0] - std::cos(0.3)) <= 1e-8);
}

TEST_CASE("bracket antisymmetry across descriptors") {
    Rng rng(11);
    FieldShape shape;
    shape.max_mode = 3;
    const std::vector<AlgebraDescriptor> descs = {
        so3, AlgebraDescriptor::vect_s1(64), AlgebraDescriptor::gauge_so3(32),
        AlgebraDescriptor::product({so3, AlgebraDescriptor::vect_s1(16)})};
    for (const auto& d : descs) {
        for (int i = 0; i < 8; ++i) {
            const AlgElem x = random_alg_elem(rng, d, shape);
            const AlgElem y = random_alg_elem(rng, d, shape);
            const Eigen::VectorXd lhs = bracket(x, y).coords;
            const Eigen::VectorXd rhs = -bracket(y, x).coords;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("duality consistency pair(ad*, y) = pair(mu, [x,y])") {
    Rng rng(13);
    SUBCASE("so3 exact") {
        FieldShape shape;
        for (int i = 0; i < 32; ++i) {
            const AlgElem x = random_alg_elem(rng, so3, shape);
            const AlgElem y = random_alg_elem(rng, so3, shape);
            const DualElem mu = random_dual_elem(rng, so3, shape);
            CHECK(std::abs(pair(ad_star(x, mu), y) - pair(mu, bracket(x, y))) <= 1e-13);
        }
    }
    SUBCASE("vect_s1 single-harmonic fields are exact") {
        // mode-1 triads cannot alias onto the stencil defect
        const auto vect = AlgebraDescriptor::vect_s1(128);
        FieldShape shape;
        shape.max_mode = 1;
        for (int i = 0; i < 16; ++i) {
            const AlgElem x = random_alg_elem(rng, vect, shape);
            const AlgElem y = random_alg_elem(rng, vect, shape);
            const DualElem mu = random_dual_elem(rng, vect, shape);
            CHECK(std::abs(pair(ad_star(x, mu), y) - pair(mu, bracket(x, y))) <= 1e-12);
        }
    }
    SUBCASE("vect_s1 smooth fields at the stencil budget") {
        // product-rule defect scales like dx^4; verified on a fine grid
        const auto vect = AlgebraDescriptor::vect_s1(1024);
        FieldShape shape;
        shape.max_mode = 3;
        shape.amplitude = 0.4;
        shape.decay = 1.0;
        for (int i = 0; i < 8; ++i) {
            const AlgElem x = random_alg_elem(rng, vect, shape);
            const AlgElem y = random_alg_elem(rng, vect, shape);
            const DualElem mu = random_dual_elem(rng, vect, shape);
            CHECK(std::abs(pair(ad_star(x, mu), y) - pair(mu, bracket(x, y))) <= 1e-9);
        }
    }
    SUBCASE("gauge pointwise duality is exact") {
        const auto gauge = AlgebraDescriptor::gauge_so3(32);
        FieldShape shape;
        for (int i = 0; i < 8; ++i) {
            const AlgElem x = random_alg_elem(rng, gauge, shape);
            const AlgElem y = random_alg_elem(rng, gauge, shape);
            const DualElem mu = random_dual_elem(rng, gauge, shape);
            CHECK(std::abs(pair(ad_star(x, mu), y) - pair(mu, bracket(x, y))) <= 1e-12);
        }
    }
}

TEST_CASE("group pairing adjoint: pair(Ad*_g mu, xi) = pair(mu, Ad_g xi)") {
    Rng rng(17);
    FieldShape shape;
    SUBCASE("so3") {
        for (int i = 0; i < 32; ++i) {
            const GroupElem g = random_rotation(rng);
            const AlgElem x = random_alg_elem(rng, so3, shape);
            const DualElem mu = random_dual_elem(rng, so3, shape);
            CHECK(std::abs(pair(group_ad_star(g, mu), x) - pair(mu, group_ad(g, x))) <= 1e-12);
        }
    }
    SUBCASE("vect_s1 rotations, off-grid angles") {
        const auto vect = AlgebraDescriptor::vect_s1(128);
        shape.max_mode = 4;
        std::uniform_real_distribution<double> angle(-3.0, 3.0);
        for (int i = 0; i < 16; ++i) {
            const GroupElem g = GroupElem::circle_rotation(vect, angle(rng));
            const AlgElem x = random_alg_elem(rng, vect, shape);
            const DualElem mu = random_dual_elem(rng, vect, shape);
            CHECK(std::abs(pair(group_ad_star(g, mu), x) - pair(mu, group_ad(g, x))) <= 1e-12);
        }
    }
}

TEST_CASE("coadjoint equivariance ad*_{Ad_h xi} Ad*_{h^-1} = Ad*_{h^-1} ad*_xi") {
    Rng rng(19);
    FieldShape shape;
    SUBCASE("so3") {
        for (int i = 0; i < 32; ++i) {
            const GroupElem h = random_rotation(rng);
            const AlgElem x = random_alg_elem(rng, so3, shape);
            const DualElem a = random_dual_elem(rng, so3, shape);
            const DualElem lhs = ad_star(group_ad(h, x), group_ad_star(h.inverse(), a));
            const DualElem rhs = group_ad_star(h.inverse(), ad_star(x, a));
            CHECK((lhs.coords - rhs.coords).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("rotation on vect_s1") {
        const auto vect = AlgebraDescriptor::vect_s1(128);
        shape.max_mode = 3;
        std::uniform_real_distribution<double> angle(-3.0, 3.0);
        for (int i = 0; i < 16; ++i) {
            const GroupElem h = GroupElem::circle_rotation(vect, angle(rng));
            const AlgElem x = random_alg_elem(rng, vect, shape);
            const DualElem a = random_dual_elem(rng, vect, shape);
            const DualElem lhs = ad_star(group_ad(h, x), group_ad_star(h.inverse(), a));
            const DualElem rhs = group_ad_star(h.inverse(), ad_star(x, a));
            CHECK((lhs.coords - rhs.coords).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("transport identity d/dt Ad*_{h^-1} alpha = -ad*_{dr h} Ad*_{h^-1} alpha") {
    SUBCASE("so3 path") {
        const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, -1).normalized();
        const DualElem alpha{so3, Eigen::Vector3d(0.4, -0.7, 1.1)};
        auto theta = [](double t) { return 0.8 * std::sin(1.3 * t); };
        auto theta_dot = [](double t) { return 0.8 * 1.3 * std::cos(1.3 * t); };
        for (double t : {0.3, 1.1, 2.4}) {
            auto coad = [&](double s) {
                const GroupElem h = exp_so3(AlgElem{so3, Eigen::Vector3d(theta(s) * axis)});
                return group_ad_star(h.inverse(), alpha).coords;
            };
            const Eigen::VectorXd lhs = time_derivative(coad, t, 1e-3);
            const GroupElem ht = exp_so3(AlgElem{so3, Eigen::Vector3d(theta(t) * axis)});
            const AlgElem dr{so3, Eigen::Vector3d(theta_dot(t) * axis)};
            const Eigen::VectorXd rhs = -ad_star(dr, group_ad_star(ht.inverse(), alpha)).coords;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-7);
        }
    }
    SUBCASE("rotation path on vect_s1") {
        // the identity compares an exact time derivative of a shifted field
        // with the stencil derivative; the O(dx^4) symbol mismatch needs a
        // fine grid to sit inside 1e-7
        const int n = 512;
        const auto vect = AlgebraDescriptor::vect_s1(n);
        const DualElem alpha{vect, sampled(n, [](double x) {
                                 return std::sin(x) + 0.3 * std::cos(2 * x);
                             })};
        auto theta = [](double t) { return 0.5 * std::sin(t); };
        auto theta_dot = [](double t) { return 0.5 * std::cos(t); };
        for (double t : {0.4, 1.7}) {
            auto coad = [&](double s) {
                const GroupElem h = GroupElem::circle_rotation(vect, theta(s));
                return group_ad_star(h.inverse(), alpha).coords;
            };
            const Eigen::VectorXd lhs = time_derivative(coad, t, 1e-3);
            const GroupElem ht = GroupElem::circle_rotation(vect, theta(t));
            const AlgElem dr{vect, Eigen::VectorXd::Constant(n, theta_dot(t))};
            const Eigen::VectorXd rhs = -ad_star(dr, group_ad_star(ht.inverse(), alpha)).coords;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-7);
        }
    }
}

TEST_CASE("jacobi identity: exact pointwise, O(dx^4) on vect_s1") {
    Rng rng(23);
    FieldShape shape;
    auto jacobi = [](const AlgElem& x, const AlgElem& y, const AlgElem& z) {
        Eigen::VectorXd s = bracket(x, bracket(y, z)).coords;
        s += bracket(y, bracket(z, x)).coords;
        s += bracket(z, bracket(x, y)).coords;
        return s.cwiseAbs().maxCoeff();
    };
    SUBCASE("so3 and gauge exact") {
        for (const auto& d : {so3, AlgebraDescriptor::gauge_so3(16)}) {
            for (int i = 0; i < 8; ++i) {
                const AlgElem x = random_alg_elem(rng, d, shape);
                const AlgElem y = random_alg_elem(rng, d, shape);
                const AlgElem z = random_alg_elem(rng, d, shape);
                CHECK(jacobi(x, y, z) <= 1e-13);
            }
        }
    }
    SUBCASE("vect_s1 defect shrinks at 4th order") {
        shape.max_mode = 3;
        shape.amplitude = 0.5;
        double defects[2];
        for (int which = 0; which < 2; ++which) {
            const int n = which == 0 ? 64 : 128;
            const auto vect = AlgebraDescriptor::vect_s1(n);
            const Eigen::VectorXd x = grid::nodes(n);
            auto field = [&](double a1, double a2, double a3) {
                return AlgElem{vect, Eigen::VectorXd(a1 * x.array().sin() +
                                                     a2 * (2.0 * x.array()).cos() +
                                                     a3 * (3.0 * x.array()).sin())};
            };
            defects[which] = jacobi(field(0.7, 0.3, 0.1), field(-0.4, 0.5, 0.2),
                                    field(0.2, -0.6, 0.3));
        }
        CHECK(defects[1] <= 1e-3);
        const double order = std::log2(defects[0] / defects[1]);
        CHECK(order >= 3.0);
        CHECK(order <= 5.0);
    }
}

TEST_CASE("trig shift: integer rolls and band-limited exactness") {
    const int n = 64;
    const auto vect = AlgebraDescriptor::vect_s1(n);
    const Eigen::VectorXd f = sampled(n, [](double x) { return std::sin(3 * x) + 0.2 * std::cos(x); });
    const double dx = vect.spacing();
    // integer shift is a pure roll
    const Eigen::VectorXd rolled = grid::trig_shift(f, n, 5 * dx);
    for (int j = 0; j < n; ++j) CHECK(rolled[j] == f[(j + n - 5) % n]);
    // off-grid shift agrees with the analytic shift of the band-limited field
    const double s = 0.4321;
    const Eigen::VectorXd shifted = grid::trig_shift(f, n, s);
    const Eigen::VectorXd x = grid::nodes(n);
    for (int j = 0; j < n; ++j) {
        const double expect = std::sin(3 * (x[j] - s)) + 0.2 * std::cos(x[j] - s);
        CHECK(std::abs(shifted[j] - expect) <= 1e-12);
    }
}

TEST_CASE("product algebra blockwise operations") {
    Rng rng(29);
    FieldShape shape;
    shape.max_mode = 1; // single harmonics keep the lattice duality exact
    const auto prod = AlgebraDescriptor::product({so3, AlgebraDescriptor::vect_s1(32)});
    const AlgElem x = random_alg_elem(rng, prod, shape);
    const AlgElem y = random_alg_elem(rng, prod, shape);
    const AlgElem b = bracket(x, y);
    // blocks match the factor-wise brackets
    const AlgElem xs{so3, x.coords.head(3)}, ys{so3, y.coords.head(3)};
    CHECK((b.coords.head(3) - bracket(xs, ys).coords).norm() == 0.0);
    const DualElem mu = random_dual_elem(rng, prod, shape);
    CHECK(std::abs(pair(ad_star(x, mu), y) - pair(mu, bracket(x, y))) <= 1e-12);
}
