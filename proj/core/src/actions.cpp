#include "epred/actions.hpp"

#include "epred/grid.hpp"

#include <cmath>

namespace epred {

namespace {

bool compatible(ActionKind kind, const AlgebraDescriptor& alg) {
    switch (kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: return alg.kind() == AlgebraKind::So3;
        case ActionKind::DensityS1: return alg.kind() == AlgebraKind::VectS1;
        case ActionKind::ConnectionGauge: return alg.kind() == AlgebraKind::GaugeSo3;
    }
    return false;
}

Eigen::Vector3d site(const Eigen::VectorXd& v, int j) { return v.segment<3>(3 * j); }

} // namespace

ActionDescriptor::ActionDescriptor(ActionKind k, AlgebraDescriptor alg, double sigma,
                                   CocycleKind c)
    : kind(k), algebra(std::move(alg)), orientation(sigma), cocycle(c) {
    if (!compatible(kind, algebra))
        throw ShapeError("ActionDescriptor: action kind incompatible with algebra");
    if (std::abs(std::abs(sigma) - 1.0) > 0)
        throw ShapeError("ActionDescriptor: orientation must be +1 or -1");
    if (cocycle == CocycleKind::GaugeLogDerivative && kind != ActionKind::ConnectionGauge)
        throw ShapeError("ActionDescriptor: GaugeLogDerivative requires ConnectionGauge");
}

bool ActionDescriptor::operator==(const ActionDescriptor& o) const {
    return kind == o.kind && algebra == o.algebra && orientation == o.orientation &&
           cocycle == o.cocycle;
}

AdvectedState::AdvectedState(ActionDescriptor d, Eigen::VectorXd v)
    : desc(std::move(d)), value(std::move(v)) {
    const int expect = (desc.kind == ActionKind::LinearR3 || desc.kind == ActionKind::SphereSo3)
                           ? 3
                           : desc.algebra.dim();
    if (value.size() != expect) throw ShapeError("AdvectedState: wrong value length");
    if (!value.allFinite()) throw NumericalError("AdvectedState: non-finite value");
    // Loose sanity bound: integrator stages sit O(dt^2) off the sphere before
    // the per-step renormalization; recorded states are held to 1e-10 by the
    // trajectory monitors.
    if (desc.kind == ActionKind::SphereSo3 && std::abs(value.norm() - 1.0) > 1e-6)
        throw ShapeError("AdvectedState: sphere point must have unit norm");
}

AdvectedState act_group(const GroupElem& g, const AdvectedState& a) {
    switch (a.desc.kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: {
            if (g.desc().kind() != AlgebraKind::So3)
                throw ShapeError("act_group: So3 element required");
            return {a.desc, g.matrix() * Eigen::Vector3d(a.value)};
        }
        case ActionKind::DensityS1: {
            if (g.desc() != a.desc.algebra)
                throw ShapeError("act_group: circle rotation on the density grid required");
            // rotation has unit Jacobian: pure sample shift
            return {a.desc, grid::trig_shift(a.value, a.desc.algebra.grid_size(), g.angle())};
        }
        case ActionKind::ConnectionGauge: {
            if (g.desc() != a.desc.algebra)
                throw ShapeError("act_group: gauge element on the connection grid required");
            const int n = a.desc.algebra.grid_size();
            const auto& rs = g.site_matrices();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j) out.segment<3>(3 * j) = rs[j] * site(a.value, j);
            if (a.desc.cocycle == CocycleKind::GaugeLogDerivative)
                out += cocycle_eval(a.desc, g);
            return {a.desc, std::move(out)};
        }
    }
    throw ShapeError("act_group: unknown action kind");
}

Eigen::VectorXd act_infinitesimal(const AlgElem& x, const AdvectedState& a) {
    if (x.desc != a.desc.algebra) throw ShapeError("act_infinitesimal: descriptor mismatch");
    switch (a.desc.kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: {
            const Eigen::Vector3d xi = x.coords, v = a.value;
            return a.desc.orientation * xi.cross(v);
        }
        case ActionKind::DensityS1: {
            const int n = a.desc.algebra.grid_size();
            const Eigen::VectorXd flux = (a.value.array() * x.coords.array()).matrix();
            return -grid::derivative(flux, n);
        }
        case ActionKind::ConnectionGauge: {
            const int n = a.desc.algebra.grid_size();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j)
                out.segment<3>(3 * j) = site(x.coords, j).cross(site(a.value, j));
            return out;
        }
    }
    throw ShapeError("act_infinitesimal: unknown action kind");
}

DualElem diamond(const Eigen::VectorXd& v, const AdvectedState& a) {
    switch (a.desc.kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: {
            if (v.size() != 3) throw ShapeError("diamond: v must be in R^3");
            // <v diamond a, xi> = sigma (xi x a) . v = sigma xi . (a x v)
            const Eigen::Vector3d av = a.value, vv = v;
            return {a.desc.algebra, a.desc.orientation * av.cross(vv)};
        }
        case ActionKind::DensityS1: {
            const int n = a.desc.algebra.grid_size();
            if (v.size() != n) throw ShapeError("diamond: wrong density-dual length");
            // f diamond rho = rho Df
            const Eigen::VectorXd df = grid::derivative(v, n);
            return {a.desc.algebra, (a.value.array() * df.array()).matrix()};
        }
        case ActionKind::ConnectionGauge: {
            const int n = a.desc.algebra.grid_size();
            if (v.size() != 3 * n) throw ShapeError("diamond: wrong connection-dual length");
            // alpha diamond gamma = -ad*_gamma alpha = gamma x alpha pointwise
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j)
                out.segment<3>(3 * j) = site(a.value, j).cross(site(v, j));
            return {a.desc.algebra, std::move(out)};
        }
    }
    throw ShapeError("diamond: unknown action kind");
}

Eigen::VectorXd cocycle_eval(const ActionDescriptor& desc, const GroupElem& g) {
    if (desc.cocycle != CocycleKind::GaugeLogDerivative)
        throw ShapeError("cocycle_eval: descriptor has no cocycle");
    if (g.desc() != desc.algebra) throw ShapeError("cocycle_eval: descriptor mismatch");
    const int n = desc.algebra.grid_size();
    const auto& rs = g.site_matrices();
    // Flatten the site matrices row-major, differentiate entrywise, un-hat
    // the antisymmetric part of -(DR) R^T.
    Eigen::VectorXd flat(9 * n);
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) flat[9 * j + 3 * r + c] = rs[j](r, c);
    const Eigen::VectorXd dflat = grid::derivative(flat, n, 9);
    Eigen::VectorXd out(3 * n);
    for (int j = 0; j < n; ++j) {
        Eigen::Matrix3d dr;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) dr(r, c) = dflat[9 * j + 3 * r + c];
        out.segment<3>(3 * j) = vee_antisym(-dr * rs[j].transpose());
    }
    return out;
}

Eigen::VectorXd dc_eval(const ActionDescriptor& desc, const AlgElem& x) {
    if (desc.cocycle != CocycleKind::GaugeLogDerivative)
        throw ShapeError("dc_eval: descriptor has no cocycle");
    if (x.desc != desc.algebra) throw ShapeError("dc_eval: descriptor mismatch");
    return -grid::derivative(x.coords, desc.algebra.grid_size(), 3);
}

DualElem dc_transpose(const ActionDescriptor& desc, const Eigen::VectorXd& v) {
    if (desc.cocycle != CocycleKind::GaugeLogDerivative)
        throw ShapeError("dc_transpose: descriptor has no cocycle");
    const int n = desc.algebra.grid_size();
    if (v.size() != 3 * n) throw ShapeError("dc_transpose: wrong dual length");
    return {desc.algebra, grid::derivative(v, n, 3)};
}

DualElem momentum_map(const AdvectedState& a, const Eigen::VectorXd& v) {
    switch (a.desc.kind) {
        case ActionKind::SphereSo3: {
            if (v.size() != 3) throw ShapeError("momentum_map: covector must be in R^3");
            const Eigen::Vector3d m = a.value, p = v;
            return {a.desc.algebra, a.desc.orientation * m.cross(p)};
        }
        case ActionKind::LinearR3:
        case ActionKind::DensityS1: {
            if (a.desc.cocycle != CocycleKind::None)
                throw ShapeError("momentum_map: unsupported cocycle");
            return diamond(v, a);
        }
        case ActionKind::ConnectionGauge: {
            DualElem j = diamond(v, a);
            if (a.desc.cocycle == CocycleKind::GaugeLogDerivative)
                j.coords += dc_transpose(a.desc, v).coords;
            return j;
        }
    }
    throw ShapeError("momentum_map: unknown action kind");
}

double param_pair(const ActionDescriptor& desc, const Eigen::VectorXd& vstar,
                  const Eigen::VectorXd& v) {
    if (vstar.size() != v.size()) throw ShapeError("param_pair: length mismatch");
    switch (desc.kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: return vstar.dot(v);
        case ActionKind::DensityS1:
        case ActionKind::ConnectionGauge:
            return vstar.dot(v) * desc.algebra.spacing();
    }
    throw ShapeError("param_pair: unknown action kind");
}

Eigen::VectorXd act_dual_param(const GroupElem& g, const ActionDescriptor& desc,
                               const Eigen::VectorXd& v) {
    switch (desc.kind) {
        case ActionKind::LinearR3:
        case ActionKind::SphereSo3: {
            if (v.size() != 3) throw ShapeError("act_dual_param: v must be in R^3");
            return g.matrix() * Eigen::Vector3d(v);
        }
        case ActionKind::DensityS1:
            return grid::trig_shift(v, desc.algebra.grid_size(), g.angle());
        case ActionKind::ConnectionGauge: {
            const int n = desc.algebra.grid_size();
            if (v.size() != 3 * n) throw ShapeError("act_dual_param: wrong length");
            const auto& rs = g.site_matrices();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j) out.segment<3>(3 * j) = rs[j] * site(v, j);
            return out;
        }
    }
    throw ShapeError("act_dual_param: unknown action kind");
}

} // namespace epred
