#include "epred/lagrangian.hpp"

#include "epred/grid.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace epred {

namespace {

double pair_norm(const DualElem& mu) {
    const double w = (mu.desc.kind() == AlgebraKind::So3) ? 1.0 : mu.desc.spacing();
    return std::sqrt(mu.coords.squaredNorm() * w);
}

void check_kernel_compatibility(const DualElem& mu, const KernelSpec& kernel, double tol,
                                const char* who) {
    const double scale = 1.0 + pair_norm(mu);
    for (const auto& k : kernel.basis) {
        const double defect = std::abs(pair(mu, k));
        if (defect > tol * scale) {
            std::ostringstream os;
            os << who << ": kernel compatibility violation, defect " << defect << " > " << tol
               << " * " << scale;
            throw NumericalError(os.str());
        }
    }
}

// Dense factorization of A = scale * (-D diag(w) D) per component on the
// periodic grid, deflated on the discrete null space of D (constants and the
// Nyquist sawtooth; the latter is a stencil artifact, not part of h).
class LatticeSolver {
public:
    LatticeSolver(int grid_size, int comps, double scale)
        : n_(grid_size), comps_(comps), scale_(scale) {}

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& weights) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!ready_ || (weights.size() > 0 &&
                        (weights_.size() == 0 ||
                         (weights - weights_).cwiseAbs().maxCoeff() > 1e-12))) {
            factorize(weights);
        }
        Eigen::VectorXd out(rhs.size());
        for (int c = 0; c < comps_; ++c) {
            Eigen::VectorXd b(n_);
            for (int j = 0; j < n_; ++j) b[j] = rhs[comps_ * j + c];
            b -= ones_ * ones_.dot(b);
            b -= saw_ * saw_.dot(b);
            Eigen::VectorXd x = ldlt_.solve(b);
            x -= ones_ * ones_.dot(x);
            x -= saw_ * saw_.dot(x);
            for (int j = 0; j < n_; ++j) out[comps_ * j + c] = x[j];
        }
        return out;
    }

private:
    void factorize(const Eigen::VectorXd& weights) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
        const double w = 1.0 / (12.0 * grid::spacing(n_));
        for (int j = 0; j < n_; ++j) {
            d(j, (j + 2) % n_) -= w;
            d(j, (j + 1) % n_) += 8.0 * w;
            d(j, (j + n_ - 1) % n_) -= 8.0 * w;
            d(j, (j + n_ - 2) % n_) += w;
        }
        Eigen::MatrixXd a;
        if (weights.size() > 0) {
            if (weights.minCoeff() <= 0)
                throw NumericalError("LatticeSolver: nonpositive weight");
            a = scale_ * (d.transpose() * weights.asDiagonal() * d);
        } else {
            a = scale_ * (d.transpose() * d);
        }
        ones_ = Eigen::VectorXd::Constant(n_, 1.0 / std::sqrt(double(n_)));
        saw_.resize(n_);
        for (int j = 0; j < n_; ++j) saw_[j] = (j % 2 == 0 ? 1.0 : -1.0);
        saw_ /= std::sqrt(double(n_));
        const double c = a.cwiseAbs().maxCoeff();
        a += c * (ones_ * ones_.transpose());
        a += c * (saw_ * saw_.transpose());
        ldlt_.compute(a);
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("LatticeSolver: factorization failed");
        weights_ = weights;
        ready_ = true;
    }

    int n_, comps_;
    double scale_;
    std::mutex mutex_;
    bool ready_ = false;
    Eigen::VectorXd weights_;
    Eigen::VectorXd ones_, saw_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

KernelSpec constant_kernel(const AlgebraDescriptor& desc) {
    // Constant fields, normalized to pair-norm 1 (|1|^2_{L^2} = 2 pi).
    KernelSpec k;
    const double norm = std::sqrt(2.0 * std::numbers::pi);
    if (desc.kind() == AlgebraKind::VectS1) {
        k.basis.push_back(AlgElem{desc, Eigen::VectorXd::Constant(desc.dim(), 1.0 / norm)});
    } else if (desc.kind() == AlgebraKind::GaugeSo3) {
        const int n = desc.grid_size();
        for (int c = 0; c < 3; ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
            for (int j = 0; j < n; ++j) v[3 * j + c] = 1.0 / norm;
            k.basis.push_back(AlgElem{desc, std::move(v)});
        }
    }
    return k;
}

Eigen::Vector3d as3(const Eigen::VectorXd& v) { return v; }

} // namespace

double fd_d_xi(const ReducedLagrangian& l, const AlgElem& xi, const AdvectedState* a,
               const AlgElem& direction) {
    if (direction.desc != xi.desc) throw ShapeError("fd_d_xi: descriptor mismatch");
    const double h = 1e-6 * std::max(1.0, xi.coords.norm());
    const AlgElem plus{xi.desc, xi.coords + h * direction.coords};
    const AlgElem minus{xi.desc, xi.coords - h * direction.coords};
    const double fp = l.eval(plus, a), fm = l.eval(minus, a);
    if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericalError("fd_d_xi: non-finite evaluation");
    return (fp - fm) / (2.0 * h);
}

double fd_d_a(const ReducedLagrangian& l, const AlgElem& xi, const AdvectedState* a,
              const Eigen::VectorXd& direction) {
    if (a == nullptr) throw ShapeError("fd_d_a: Lagrangian has no parameter");
    if (direction.size() != a->value.size()) throw ShapeError("fd_d_a: direction length");
    const double h = 1e-6 * std::max(1.0, a->value.norm());
    const AdvectedState plus{a->desc, a->value + h * direction};
    const AdvectedState minus{a->desc, a->value - h * direction};
    const double fp = l.eval(xi, &plus), fm = l.eval(xi, &minus);
    if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericalError("fd_d_a: non-finite evaluation");
    return (fp - fm) / (2.0 * h);
}

AlgElem inertia_solve(const ReducedLagrangian& l, const DualElem& mu, const AdvectedState* a,
                      double tol) {
    return l.solve(mu, a, tol);
}

// ---------------------------------------------------------------------------
// catalog

ReducedLagrangian hs1d_lagrangian(const AlgebraDescriptor& vect) {
    if (vect.kind() != AlgebraKind::VectS1) throw ShapeError("hs1d_lagrangian: VectS1 required");
    const int n = vect.grid_size();
    const double dx = vect.spacing();
    auto solver = std::make_shared<LatticeSolver>(n, 1, 1.0);
    ReducedLagrangian l;
    l.name = "hs1d";
    l.integrable = true;
    l.has_parameter = false;
    l.kernel = constant_kernel(vect);
    l.eval = [n, dx](const AlgElem& u, const AdvectedState*) {
        const Eigen::VectorXd du = grid::derivative(u.coords, n);
        return 0.5 * du.squaredNorm() * dx;
    };
    l.d_xi = [n, vect](const AlgElem& u, const AdvectedState*) {
        return DualElem{vect, -grid::derivative(grid::derivative(u.coords, n), n)};
    };
    l.solve = [solver, vect, kernel = l.kernel](const DualElem& mu, const AdvectedState*,
                                                double tol) {
        check_kernel_compatibility(mu, kernel, tol, "hs1d inertia");
        return AlgElem{vect, solver->solve(mu.coords, Eigen::VectorXd())};
    };
    return l;
}

ReducedLagrangian density_hs1d_lagrangian(const ActionDescriptor& density_action,
                                          double rho_min) {
    if (density_action.kind != ActionKind::DensityS1)
        throw ShapeError("density_hs1d_lagrangian: DensityS1 action required");
    const AlgebraDescriptor vect = density_action.algebra;
    const int n = vect.grid_size();
    const double dx = vect.spacing();
    auto solver = std::make_shared<LatticeSolver>(n, 1, 1.0);
    ReducedLagrangian l;
    l.name = "density_hs1d";
    l.integrable = true;
    l.kernel = constant_kernel(vect);
    l.eval = [n, dx](const AlgElem& u, const AdvectedState* a) {
        if (!a) throw ShapeError("density_hs1d: missing density");
        const Eigen::VectorXd du = grid::derivative(u.coords, n);
        return 0.5 * (a->value.array() * du.array().square()).sum() * dx;
    };
    l.d_xi = [n, vect](const AlgElem& u, const AdvectedState* a) {
        if (!a) throw ShapeError("density_hs1d: missing density");
        const Eigen::VectorXd du = grid::derivative(u.coords, n);
        return DualElem{vect,
                        -grid::derivative((a->value.array() * du.array()).matrix(), n)};
    };
    l.d_a = [n](const AlgElem& u, const AdvectedState*) {
        const Eigen::VectorXd du = grid::derivative(u.coords, n);
        return Eigen::VectorXd(0.5 * du.array().square().matrix());
    };
    l.solve = [solver, vect, rho_min, kernel = l.kernel](const DualElem& mu,
                                                          const AdvectedState* a, double tol) {
        if (!a) throw ShapeError("density_hs1d: missing density");
        if (a->value.minCoeff() < rho_min)
            throw NumericalError("density_hs1d: density below validated floor");
        check_kernel_compatibility(mu, kernel, tol, "density_hs1d inertia");
        return AlgElem{vect, solver->solve(mu.coords, a->value)};
    };
    return l;
}

ReducedLagrangian heavy_top_lagrangian(const Eigen::Vector3d& inertia,
                                       const Eigen::Vector3d& lambda_vec,
                                       const ActionDescriptor& linear_action) {
    if (linear_action.kind != ActionKind::LinearR3)
        throw ShapeError("heavy_top_lagrangian: LinearR3 action required");
    if (inertia.minCoeff() <= 0) throw ShapeError("heavy_top_lagrangian: inertia must be > 0");
    const AlgebraDescriptor so3 = AlgebraDescriptor::so3();
    ReducedLagrangian l;
    l.name = "heavy_top";
    l.integrable = true;
    l.eval = [inertia, lambda_vec](const AlgElem& om, const AdvectedState* a) {
        if (!a) throw ShapeError("heavy_top: missing gravity parameter");
        const Eigen::Vector3d w = om.coords;
        return 0.5 * w.dot(inertia.asDiagonal() * w) - as3(a->value).dot(lambda_vec);
    };
    l.d_xi = [inertia, so3](const AlgElem& om, const AdvectedState*) {
        return DualElem{so3, inertia.asDiagonal() * Eigen::Vector3d(om.coords)};
    };
    l.d_a = [lambda_vec](const AlgElem&, const AdvectedState*) {
        return Eigen::VectorXd(-lambda_vec);
    };
    l.solve = [inertia, so3](const DualElem& mu, const AdvectedState*, double) {
        return AlgElem{so3, (mu.coords.array() / inertia.array()).matrix()};
    };
    return l;
}

ReducedLagrangian nematic_lagrangian(double j, double lambda, const Eigen::Vector3d& k_axis,
                                     bool projected, const ActionDescriptor& sphere_action) {
    if (sphere_action.kind != ActionKind::SphereSo3)
        throw ShapeError("nematic_lagrangian: SphereSo3 action required");
    if (j <= 0) throw ShapeError("nematic_lagrangian: j must be > 0");
    if (std::abs(k_axis.norm() - 1.0) > 1e-10)
        throw ShapeError("nematic_lagrangian: |k| must be 1");
    const AlgebraDescriptor so3 = AlgebraDescriptor::so3();
    const Eigen::Vector3d k = k_axis;
    auto project = [k, projected](const Eigen::Vector3d& v) -> Eigen::Vector3d {
        return projected ? Eigen::Vector3d(v - k * k.dot(v)) : v;
    };
    ReducedLagrangian l;
    l.name = projected ? "nematic_projected" : "nematic";
    l.integrable = true;
    if (projected) l.kernel.basis.push_back(AlgElem{so3, k});
    l.eval = [j, lambda, k, project](const AlgElem& xi, const AdvectedState* a) {
        if (!a) throw ShapeError("nematic: missing director");
        const Eigen::Vector3d p = project(xi.coords);
        const double mk = as3(a->value).dot(k);
        return 0.5 * j * p.squaredNorm() - 0.5 * lambda * mk * mk;
    };
    l.d_xi = [j, so3, project](const AlgElem& xi, const AdvectedState*) {
        return DualElem{so3, j * project(xi.coords)};
    };
    l.d_a = [lambda, k](const AlgElem&, const AdvectedState* a) {
        if (!a) throw ShapeError("nematic: missing director");
        return Eigen::VectorXd(-lambda * as3(a->value).dot(k) * k);
    };
    l.solve = [j, so3, k, projected, kernel = l.kernel](const DualElem& mu, const AdvectedState*,
                                                        double tol) {
        if (projected) check_kernel_compatibility(mu, kernel, tol, "nematic_projected inertia");
        Eigen::Vector3d xi = mu.coords / j;
        if (projected) xi -= k * k.dot(xi);
        return AlgElem{so3, xi};
    };
    return l;
}

ReducedLagrangian spin_lagrangian(const ActionDescriptor& connection_action, int which) {
    if (connection_action.kind != ActionKind::ConnectionGauge)
        throw ShapeError("spin_lagrangian: ConnectionGauge action required");
    if (which < 1 || which > 3) throw ShapeError("spin_lagrangian: which must be 1, 2 or 3");
    const AlgebraDescriptor gauge = connection_action.algebra;
    const int n = gauge.grid_size();
    const double dx = gauge.spacing();
    auto site = [](const Eigen::VectorXd& v, int j) -> Eigen::Vector3d {
        return v.segment<3>(3 * j);
    };
    ReducedLagrangian l;
    l.name = "spin_l" + std::to_string(which);
    l.integrable = (which == 3);
    l.kernel = constant_kernel(gauge);
    if (which == 3) {
        auto solver = std::make_shared<LatticeSolver>(n, 3, 2.0);
        l.eval = [n, dx](const AlgElem& xi, const AdvectedState* a) {
            if (!a) throw ShapeError("spin_l3: missing connection");
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            return (dxi.squaredNorm() - a->value.squaredNorm()) * dx;
        };
        l.d_xi = [n, gauge](const AlgElem& xi, const AdvectedState*) {
            return DualElem{gauge,
                            -2.0 * grid::derivative(grid::derivative(xi.coords, n, 3), n, 3)};
        };
        l.d_a = [](const AlgElem&, const AdvectedState* a) {
            return Eigen::VectorXd(-2.0 * a->value);
        };
        l.solve = [solver, gauge, kernel = l.kernel](const DualElem& mu, const AdvectedState*,
                                                     double tol) {
            check_kernel_compatibility(mu, kernel, tol, "spin_l3 inertia");
            return AlgElem{gauge, solver->solve(mu.coords, Eigen::VectorXd())};
        };
        return l;
    }
    if (which == 1) {
        l.eval = [n, dx, site](const AlgElem& xi, const AdvectedState* a) {
            if (!a) throw ShapeError("spin_l1: missing connection");
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += site(dxi, j).cross(site(a->value, j)).squaredNorm();
            return 0.5 * s * dx;
        };
        l.d_xi = [n, gauge, site](const AlgElem& xi, const AdvectedState* a) {
            if (!a) throw ShapeError("spin_l1: missing connection");
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            Eigen::VectorXd field(3 * n);
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector3d g = site(a->value, j);
                field.segment<3>(3 * j) = g.cross(site(dxi, j).cross(g));
            }
            return DualElem{gauge, -grid::derivative(field, n, 3)};
        };
        l.d_a = [n, site](const AlgElem& xi, const AdvectedState* a) {
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector3d d = site(dxi, j);
                out.segment<3>(3 * j) = d.cross(site(a->value, j)).cross(d);
            }
            return out;
        };
    } else {
        l.eval = [n, dx, site](const AlgElem& xi, const AdvectedState* a) {
            if (!a) throw ShapeError("spin_l2: missing connection");
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                const double q = site(dxi, j).dot(site(a->value, j));
                s += q * q;
            }
            return 0.5 * s * dx;
        };
        l.d_xi = [n, gauge, site](const AlgElem& xi, const AdvectedState* a) {
            if (!a) throw ShapeError("spin_l2: missing connection");
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            Eigen::VectorXd field(3 * n);
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector3d g = site(a->value, j);
                field.segment<3>(3 * j) = site(dxi, j).dot(g) * g;
            }
            return DualElem{gauge, -grid::derivative(field, n, 3)};
        };
        l.d_a = [n, site](const AlgElem& xi, const AdvectedState* a) {
            const Eigen::VectorXd dxi = grid::derivative(xi.coords, n, 3);
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector3d d = site(dxi, j);
                out.segment<3>(3 * j) = d.dot(site(a->value, j)) * d;
            }
            return out;
        };
    }
    // l1/l2 have parameter-dependent, degenerate inertia operators; they are
    // never time-integrated.
    l.solve = [name = l.name](const DualElem&, const AdvectedState*, double) -> AlgElem {
        throw NumericalError(name + ": inertia operator is not invertible");
    };
    return l;
}

std::vector<ReducedLagrangian> builtin_lagrangians(int grid_size) {
    const auto vect = AlgebraDescriptor::vect_s1(grid_size);
    const auto gauge = AlgebraDescriptor::gauge_so3(grid_size);
    const ActionDescriptor density{ActionKind::DensityS1, vect};
    const ActionDescriptor linear{ActionKind::LinearR3, AlgebraDescriptor::so3()};
    const ActionDescriptor sphere{ActionKind::SphereSo3, AlgebraDescriptor::so3()};
    const ActionDescriptor conn{ActionKind::ConnectionGauge, gauge, +1.0,
                                CocycleKind::GaugeLogDerivative};
    std::vector<ReducedLagrangian> out;
    out.push_back(hs1d_lagrangian(vect));
    out.push_back(density_hs1d_lagrangian(density));
    out.push_back(heavy_top_lagrangian({1.0, 2.0, 3.0}, {0.0, 0.0, 1.0}, linear));
    out.push_back(nematic_lagrangian(1.0, 1.0, {0.0, 0.0, 1.0}, false, sphere));
    out.push_back(nematic_lagrangian(1.0, 1.0, {0.0, 0.0, 1.0}, true, sphere));
    out.push_back(spin_lagrangian(conn, 1));
    out.push_back(spin_lagrangian(conn, 2));
    out.push_back(spin_lagrangian(conn, 3));
    return out;
}

} // namespace epred
