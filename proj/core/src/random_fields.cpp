#include "epred/random_fields.hpp"

#include "epred/grid.hpp"
#include "epred/systems.hpp"

#include <cmath>
#include <numbers>

namespace epred {

namespace {

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

Eigen::VectorXd random_scalar_field(Rng& rng, int grid_size, const FieldShape& shape) {
    const Eigen::VectorXd x = grid::nodes(grid_size);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid_size);
    if (shape.with_mean) f.array() += uniform(rng, -shape.amplitude, shape.amplitude);
    for (int k = 1; k <= shape.max_mode; ++k) {
        const double scale = shape.amplitude / std::pow(double(k), shape.decay);
        const double a = uniform(rng, -scale, scale);
        const double b = uniform(rng, -scale, scale);
        f += (a * (double(k) * x.array()).cos() + b * (double(k) * x.array()).sin()).matrix();
    }
    return f;
}

AlgElem random_alg_elem(Rng& rng, const AlgebraDescriptor& desc, const FieldShape& shape) {
    switch (desc.kind()) {
        case AlgebraKind::So3: {
            Eigen::Vector3d v;
            for (int i = 0; i < 3; ++i) v[i] = uniform(rng, -shape.amplitude, shape.amplitude);
            return AlgElem{desc, v};
        }
        case AlgebraKind::VectS1:
            return AlgElem{desc, random_scalar_field(rng, desc.grid_size(), shape)};
        case AlgebraKind::GaugeSo3: {
            const int n = desc.grid_size();
            Eigen::VectorXd v(3 * n);
            for (int c = 0; c < 3; ++c) {
                const Eigen::VectorXd f = random_scalar_field(rng, n, shape);
                for (int j = 0; j < n; ++j) v[3 * j + c] = f[j];
            }
            return AlgElem{desc, std::move(v)};
        }
        case AlgebraKind::Product: {
            Eigen::VectorXd v(desc.dim());
            int off = 0;
            for (const auto& f : desc.factors()) {
                v.segment(off, f.dim()) = random_alg_elem(rng, f, shape).coords;
                off += f.dim();
            }
            return AlgElem{desc, std::move(v)};
        }
    }
    throw ShapeError("random_alg_elem: unknown algebra kind");
}

DualElem random_dual_elem(Rng& rng, const AlgebraDescriptor& desc, const FieldShape& shape) {
    return DualElem{desc, random_alg_elem(rng, desc, shape).coords};
}

GroupElem random_rotation(Rng& rng) {
    const Eigen::Vector3d axis = random_unit_vector(rng);
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    return exp_so3(AlgElem{AlgebraDescriptor::so3(), angle * axis});
}

GroupElem random_gauge_map(Rng& rng, const AlgebraDescriptor& gauge, const FieldShape& shape) {
    if (gauge.kind() != AlgebraKind::GaugeSo3)
        throw ShapeError("random_gauge_map: GaugeSo3 required");
    const int n = gauge.grid_size();
    const AlgElem phi = random_alg_elem(rng, gauge, shape);
    std::vector<Eigen::Matrix3d> mats(n);
    const auto so3 = AlgebraDescriptor::so3();
    for (int j = 0; j < n; ++j)
        mats[j] = exp_so3(AlgElem{so3, Eigen::Vector3d(phi.coords.segment<3>(3 * j))}).matrix();
    return GroupElem::gauge(gauge, std::move(mats));
}

Eigen::Vector3d random_unit_vector(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-6);
    return v.normalized();
}

AdvectedState random_advected_state(Rng& rng, const ActionDescriptor& desc,
                                    const FieldShape& shape) {
    switch (desc.kind) {
        case ActionKind::LinearR3: {
            Eigen::Vector3d v;
            for (int i = 0; i < 3; ++i) v[i] = uniform(rng, -shape.amplitude, shape.amplitude);
            return AdvectedState{desc, v};
        }
        case ActionKind::SphereSo3:
            return AdvectedState{desc, random_unit_vector(rng)};
        case ActionKind::DensityS1: {
            // positive density: 1 + band-limited perturbation, rescaled to
            // keep min rho >= 0.4
            FieldShape s = shape;
            s.with_mean = false;
            Eigen::VectorXd pert = random_scalar_field(rng, desc.algebra.grid_size(), s);
            const double lo = pert.minCoeff();
            if (lo < -0.6) pert *= 0.6 / (-lo);
            return AdvectedState{desc,
                                 Eigen::VectorXd(Eigen::VectorXd::Ones(desc.algebra.grid_size()) +
                                                 pert)};
        }
        case ActionKind::ConnectionGauge:
            return AdvectedState{desc, random_alg_elem(rng, desc.algebra, shape).coords};
    }
    throw ShapeError("random_advected_state: unknown action kind");
}

CurvePair random_smooth_curve(Rng& rng, const SystemBundle& system, const FieldShape& shape) {
    const AlgebraDescriptor alg = system.algebra;

    // xi(t): two random algebra elements blended with independent harmonics
    const AlgElem base1 = random_alg_elem(rng, alg, shape);
    const AlgElem base2 = random_alg_elem(rng, alg, shape);
    const double w1 = uniform(rng, 0.5, 1.5), p1 = uniform(rng, 0.0, 6.28);
    const double w2 = uniform(rng, 0.5, 1.5), p2 = uniform(rng, 0.0, 6.28);
    auto xi_fn = [alg, base1, base2, w1, p1, w2, p2](double t) {
        return AlgElem{alg, std::cos(w1 * t + p1) * base1.coords +
                                std::sin(w2 * t + p2) * base2.coords};
    };

    CurvePair curve;
    curve.xi = xi_fn;
    if (!system.action) return curve;

    const ActionDescriptor adesc = *system.action;
    const double wa = uniform(rng, 0.5, 1.5), pa = uniform(rng, 0.0, 6.28);
    switch (adesc.kind) {
        case ActionKind::LinearR3: {
            const AdvectedState a1 = random_advected_state(rng, adesc, shape);
            const AdvectedState a2 = random_advected_state(rng, adesc, shape);
            curve.a = [adesc, a1, a2, wa, pa](double t) -> std::optional<AdvectedState> {
                return AdvectedState{adesc, std::cos(wa * t + pa) * a1.value +
                                                std::sin(wa * t + pa) * a2.value};
            };
            break;
        }
        case ActionKind::SphereSo3: {
            // smooth non-degenerate path on the sphere by normalization
            const Eigen::Vector3d m0 = random_unit_vector(rng);
            Eigen::Vector3d u = random_unit_vector(rng), v = random_unit_vector(rng);
            curve.a = [adesc, m0, u, v, wa, pa](double t) -> std::optional<AdvectedState> {
                Eigen::Vector3d w =
                    m0 + 0.3 * std::cos(wa * t + pa) * u + 0.3 * std::sin(wa * t + pa) * v;
                return AdvectedState{adesc, w.normalized()};
            };
            break;
        }
        case ActionKind::DensityS1: {
            const int n = adesc.algebra.grid_size();
            Eigen::VectorXd r1 = random_scalar_field(rng, n, shape);
            Eigen::VectorXd r2 = random_scalar_field(rng, n, shape);
            // keep rho >= 0.3 for every t
            const double worst = (r1.cwiseAbs() + r2.cwiseAbs()).maxCoeff();
            if (worst > 0.7) {
                r1 *= 0.7 / worst;
                r2 *= 0.7 / worst;
            }
            curve.a = [adesc, r1, r2, wa, pa, n](double t) -> std::optional<AdvectedState> {
                Eigen::VectorXd rho = Eigen::VectorXd::Ones(n) +
                                      std::cos(wa * t + pa) * r1 + std::sin(wa * t + pa) * r2;
                return AdvectedState{adesc, std::move(rho)};
            };
            break;
        }
        case ActionKind::ConnectionGauge: {
            const AlgElem g1 = random_alg_elem(rng, adesc.algebra, shape);
            const AlgElem g2 = random_alg_elem(rng, adesc.algebra, shape);
            curve.a = [adesc, g1, g2, wa, pa](double t) -> std::optional<AdvectedState> {
                return AdvectedState{adesc, std::cos(wa * t + pa) * g1.coords +
                                                std::sin(wa * t + pa) * g2.coords};
            };
            break;
        }
    }
    return curve;
}

} // namespace epred
