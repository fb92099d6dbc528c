#include "epred/invariance.hpp"

#include "epred/grid.hpp"
#include "epred/random_fields.hpp"
#include "epred/spline.hpp"
#include "epred/systems.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace epred {

// ---------------------------------------------------------------------------
// ThetaSchedule

ThetaSchedule ThetaSchedule::constant(double theta0) {
    ThetaSchedule s;
    s.kind = Kind::Constant;
    s.theta0 = theta0;
    return s;
}

ThetaSchedule ThetaSchedule::linear(double omega) {
    ThetaSchedule s;
    s.kind = Kind::Linear;
    s.omega = omega;
    return s;
}

ThetaSchedule ThetaSchedule::sinusoidal(double eps, double freq) {
    ThetaSchedule s;
    s.kind = Kind::Sinusoidal;
    s.eps = eps;
    s.freq = freq;
    return s;
}

double ThetaSchedule::theta(double t) const {
    switch (kind) {
        case Kind::Constant: return theta0;
        case Kind::Linear: return omega * t;
        case Kind::Sinusoidal: return eps * std::sin(freq * t);
    }
    return 0.0;
}

double ThetaSchedule::theta_dot(double t) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Linear: return omega;
        case Kind::Sinusoidal: return eps * freq * std::cos(freq * t);
    }
    return 0.0;
}

std::string ThetaSchedule::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Constant: os << "constant(" << theta0 << ")"; break;
        case Kind::Linear: os << "linear(" << omega << ")"; break;
        case Kind::Sinusoidal: os << "sinusoidal(" << eps << "," << freq << ")"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// HPath

HPath HPath::rotation_s1(const AlgebraDescriptor& vect, ThetaSchedule schedule) {
    if (vect.kind() != AlgebraKind::VectS1) throw ShapeError("HPath::rotation_s1: VectS1 only");
    HPath h;
    h.family_ = Family::RotationS1;
    h.algebra_ = vect;
    h.schedule_ = schedule;
    h.name_ = "rotation_s1:" + schedule.label();
    return h;
}

HPath HPath::so3(const Eigen::Vector3d& axis, ThetaSchedule schedule) {
    if (axis.norm() < 1e-12) throw ShapeError("HPath::so3: zero axis");
    HPath h;
    h.family_ = Family::So3Path;
    h.algebra_ = AlgebraDescriptor::so3();
    h.axis_ = axis.normalized();
    h.schedule_ = schedule;
    h.name_ = "so3:" + schedule.label();
    return h;
}

HPath HPath::const_gauge(const AlgebraDescriptor& gauge, const Eigen::Vector3d& axis,
                         ThetaSchedule schedule) {
    if (gauge.kind() != AlgebraKind::GaugeSo3)
        throw ShapeError("HPath::const_gauge: GaugeSo3 only");
    if (axis.norm() < 1e-12) throw ShapeError("HPath::const_gauge: zero axis");
    HPath h;
    h.family_ = Family::ConstGauge;
    h.algebra_ = gauge;
    h.axis_ = axis.normalized();
    h.schedule_ = schedule;
    h.name_ = "const_gauge:" + schedule.label();
    return h;
}

GroupElem HPath::group_at(double t) const {
    const double th = schedule_.theta(t);
    switch (family_) {
        case Family::RotationS1: return GroupElem::circle_rotation(algebra_, th);
        case Family::So3Path:
            return exp_so3(AlgElem{AlgebraDescriptor::so3(), Eigen::Vector3d(th * axis_)});
        case Family::ConstGauge: {
            const Eigen::Matrix3d r =
                exp_so3(AlgElem{AlgebraDescriptor::so3(), Eigen::Vector3d(th * axis_)}).matrix();
            return GroupElem::gauge(algebra_,
                                    std::vector<Eigen::Matrix3d>(algebra_.grid_size(), r));
        }
    }
    throw ShapeError("HPath: unknown family");
}

GroupElem HPath::at(double t) const { return group_at(t); }

AlgElem HPath::ad(double t, const AlgElem& x) const { return group_ad(group_at(t), x); }

DualElem HPath::coad_inv(double t, const DualElem& mu) const {
    return group_ad_star(group_at(t).inverse(), mu);
}

AlgElem HPath::delta_r(double t) const {
    const double td = schedule_.theta_dot(t);
    switch (family_) {
        case Family::RotationS1:
            return AlgElem{algebra_, Eigen::VectorXd::Constant(algebra_.dim(), td)};
        case Family::So3Path: return AlgElem{algebra_, Eigen::Vector3d(td * axis_)};
        case Family::ConstGauge: {
            const int n = algebra_.grid_size();
            Eigen::VectorXd v(3 * n);
            for (int j = 0; j < n; ++j) v.segment<3>(3 * j) = td * axis_;
            return AlgElem{algebra_, std::move(v)};
        }
    }
    throw ShapeError("HPath: unknown family");
}

AdvectedState HPath::act(double t, const AdvectedState& a) const {
    return act_group(group_at(t), a);
}

Eigen::VectorXd HPath::act_dual(double t, const ActionDescriptor& desc,
                                const Eigen::VectorXd& v) const {
    return act_dual_param(group_at(t), desc, v);
}

double HPath::self_check(double t) const {
    const double fd_step = 1e-2;
    if (family_ == Family::RotationS1) {
        // the group is abelian; compare the angle rate directly
        const double fd = (-schedule_.theta(t + 2 * fd_step) + 8 * schedule_.theta(t + fd_step) -
                           8 * schedule_.theta(t - fd_step) + schedule_.theta(t - 2 * fd_step)) /
                          (12 * fd_step);
        return std::abs(fd - schedule_.theta_dot(t));
    }
    // matrix-valued finite difference of s -> h(s) h(t)^{-1} at s = t
    const Eigen::Matrix3d ht =
        exp_so3(AlgElem{AlgebraDescriptor::so3(), Eigen::Vector3d(schedule_.theta(t) * axis_)})
            .matrix();
    auto rel = [&](double s) -> Eigen::Matrix3d {
        const Eigen::Matrix3d hs =
            exp_so3(AlgElem{AlgebraDescriptor::so3(),
                            Eigen::Vector3d(schedule_.theta(s) * axis_)})
                .matrix();
        return hs * ht.transpose();
    };
    const Eigen::Matrix3d fd = (-rel(t + 2 * fd_step) + 8 * rel(t + fd_step) -
                                8 * rel(t - fd_step) + rel(t - 2 * fd_step)) /
                               (12 * fd_step);
    const Eigen::Vector3d analytic = schedule_.theta_dot(t) * axis_;
    return (vee_antisym(fd) - analytic).norm();
}

// ---------------------------------------------------------------------------
// curve action

CurvePair act_on_curve(const HPath& h, const CurvePair& c) {
    CurvePair out;
    out.xi = [h, xi = c.xi](double t) {
        AlgElem transformed = h.ad(t, xi(t));
        transformed.coords += h.delta_r(t).coords;
        return transformed;
    };
    if (c.a) {
        out.a = [h, a = c.a](double t) -> std::optional<AdvectedState> {
            const auto at = a(t);
            if (!at) return std::nullopt;
            return h.act(t, *at);
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// checks

namespace {

Rng make_rng(std::uint64_t seed, const std::string& tag) {
    // stable stream per (seed, check tag)
    std::uint64_t mix = seed;
    for (unsigned char ch : tag) mix = mix * 1099511628211ULL + ch;
    return Rng(mix);
}

FieldShape sample_shape(const SystemBundle& system) {
    FieldShape s;
    s.max_mode = 3;
    s.amplitude = 0.5;
    s.decay = 1.0;
    (void)system;
    return s;
}

bool lattice_system(const SystemBundle& system) {
    return system.algebra.kind() != AlgebraKind::So3;
}

AlgElem random_kernel_shift(Rng& rng, const ReducedLagrangian& l,
                            const AlgebraDescriptor& alg) {
    AlgElem eta = AlgElem::zero(alg);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (const auto& b : l.kernel.basis) eta.coords += u(rng) * b.coords;
    return eta;
}

struct Sample {
    double t;
    AlgElem xi;
    std::optional<AdvectedState> a;
};

Sample random_sample(Rng& rng, const SystemBundle& system, const FieldShape& shape) {
    std::uniform_real_distribution<double> tdist(0.2, 2.8);
    Sample s{tdist(rng), random_alg_elem(rng, system.algebra, shape), std::nullopt};
    if (system.action) s.a = random_advected_state(rng, *system.action, shape);
    return s;
}

} // namespace

CheckReport check_lagrangian_invariance(const SystemBundle& system, const HPath& h,
                                        const CheckOptions& opts) {
    Rng rng = make_rng(opts.seed, "lagrangian_invariance/" + system.name + "/" + h.name());
    const FieldShape shape = sample_shape(system);
    const ReducedLagrangian& l = system.lagrangian;

    CheckReport rep;
    rep.name = "lagrangian_invariance";
    rep.detail = system.name + " under " + h.name();
    rep.tolerance = lattice_system(system) ? 1e-7 : 1e-9;
    for (int i = 0; i < opts.samples; ++i) {
        Sample s = random_sample(rng, system, shape);
        const double before = l.eval(s.xi, s.a ? &*s.a : nullptr);

        AlgElem xi_t = h.ad(s.t, s.xi);
        xi_t.coords += h.delta_r(s.t).coords;
        xi_t.coords += random_kernel_shift(rng, l, system.algebra).coords;
        std::optional<AdvectedState> a_t;
        if (s.a) a_t = h.act(s.t, *s.a);

        const double after = l.eval(xi_t, a_t ? &*a_t : nullptr);
        const double defect = std::abs(after - before);
        if (defect > rep.max_defect) {
            rep.max_defect = defect;
            std::ostringstream os;
            os << "sample " << i << " at t=" << s.t << ": |l(h.(xi,a)) - l(xi,a)| = " << defect;
            rep.worst = os.str();
        }
    }
    rep.pass = rep.max_defect <= rep.tolerance;
    return rep;
}

CheckReport check_derivative_equivariance(const SystemBundle& system, const HPath& h,
                                          const CheckOptions& opts) {
    Rng rng = make_rng(opts.seed, "derivative_equivariance/" + system.name + "/" + h.name());
    const FieldShape shape = sample_shape(system);
    const ReducedLagrangian& l = system.lagrangian;

    CheckReport rep;
    rep.name = "derivative_equivariance";
    rep.detail = system.name + " under " + h.name();
    rep.tolerance = 1e-9;
    for (int i = 0; i < opts.samples; ++i) {
        Sample s = random_sample(rng, system, shape);
        const AdvectedState* a = s.a ? &*s.a : nullptr;

        AlgElem xi_t = h.ad(s.t, s.xi);
        xi_t.coords += h.delta_r(s.t).coords;
        xi_t.coords += random_kernel_shift(rng, l, system.algebra).coords;
        std::optional<AdvectedState> a_t;
        if (s.a) a_t = h.act(s.t, *s.a);
        const AdvectedState* at = a_t ? &*a_t : nullptr;

        const DualElem lhs_xi = l.d_xi(xi_t, at);
        const DualElem rhs_xi = h.coad_inv(s.t, l.d_xi(s.xi, a));
        double defect = (lhs_xi.coords - rhs_xi.coords).cwiseAbs().maxCoeff();

        if (l.d_a && system.action) {
            const Eigen::VectorXd lhs_a = l.d_a(xi_t, at);
            const Eigen::VectorXd rhs_a = h.act_dual(s.t, *system.action, l.d_a(s.xi, a));
            defect = std::max(defect, (lhs_a - rhs_a).cwiseAbs().maxCoeff());
        }
        if (defect > rep.max_defect) {
            rep.max_defect = defect;
            std::ostringstream os;
            os << "sample " << i << " at t=" << s.t;
            rep.worst = os.str();
        }
    }
    rep.pass = rep.max_defect <= rep.tolerance;
    return rep;
}

CheckReport check_residual_equivariance(const SystemBundle& system, const HPath& h,
                                        const CheckOptions& opts) {
    Rng rng = make_rng(opts.seed, "residual_equivariance/" + system.name + "/" + h.name());
    const FieldShape shape = sample_shape(system);
    const ReducedLagrangian& l = system.lagrangian;
    const double fd_step = opts.fd_step > 0 ? opts.fd_step : 1e-3;

    CheckReport rep;
    rep.name = "residual_equivariance";
    rep.detail = system.name + " under " + h.name();
    rep.tolerance = lattice_system(system) ? 1e-6 : 1e-7;
    std::uniform_real_distribution<double> tdist(0.5, 2.5);
    for (int c = 0; c < opts.curves; ++c) {
        const CurvePair curve = random_smooth_curve(rng, system, shape);
        const CurvePair transformed = act_on_curve(h, curve);
        for (int k = 0; k < 5; ++k) {
            const double t = tdist(rng);
            const DualElem r0 = ep_residual(system.family, l, curve, t, fd_step);
            const DualElem r1 = ep_residual(system.family, l, transformed, t, fd_step);
            const DualElem expected = h.coad_inv(t, r0);
            const double defect = (r1.coords - expected.coords).cwiseAbs().maxCoeff() /
                                  (1.0 + r0.coords.cwiseAbs().maxCoeff());
            if (defect > rep.max_defect) {
                rep.max_defect = defect;
                std::ostringstream os;
                os << "curve " << c << " at t=" << t;
                rep.worst = os.str();
            }
        }
    }
    rep.pass = rep.max_defect <= rep.tolerance;
    return rep;
}

namespace {

// spline wrap of a trajectory as a smooth curve
CurvePair spline_curve(const SystemBundle& system, const Trajectory& traj) {
    const int n = static_cast<int>(traj.times.size());
    std::vector<Eigen::VectorXd> xi_vals(n);
    for (int i = 0; i < n; ++i) xi_vals[i] = traj.xi[i].coords;
    auto xi_spline = std::make_shared<CubicSpline>(traj.times, std::move(xi_vals));

    CurvePair c;
    const AlgebraDescriptor alg = system.algebra;
    c.xi = [xi_spline, alg](double t) { return AlgElem{alg, (*xi_spline)(t)}; };
    if (system.action && traj.states.front().a) {
        std::vector<Eigen::VectorXd> a_vals(n);
        for (int i = 0; i < n; ++i) a_vals[i] = traj.states[i].a->value;
        auto a_spline = std::make_shared<CubicSpline>(traj.times, std::move(a_vals));
        const ActionDescriptor adesc = *system.action;
        c.a = [a_spline, adesc](double t) -> std::optional<AdvectedState> {
            return AdvectedState{adesc, (*a_spline)(t)};
        };
    }
    return c;
}

double curve_residual_sup(const SystemBundle& system, const CurvePair& curve,
                          const std::vector<double>& times, double fd_step) {
    double sup = 0.0;
    for (double t : times) {
        const DualElem r = ep_residual(system.family, system.lagrangian, curve, t, fd_step);
        sup = std::max(sup, r.coords.cwiseAbs().maxCoeff());
        if (curve.a) {
            const auto a_t = curve.a(t);
            const AlgElem xi_t = curve.xi(t);
            const Eigen::VectorXd da = time_derivative(
                [&](double s) { return curve.a(s)->value; }, t, fd_step);
            const Eigen::VectorXd rhs = advect_rhs(system.family, xi_t, *a_t);
            sup = std::max(sup, (da - rhs).cwiseAbs().maxCoeff());
        }
    }
    return sup;
}

} // namespace

CheckReport check_solution_transport(const SystemBundle& system, const HPath& h, double T,
                                     double dt, const CheckOptions& opts) {
    const Trajectory traj = integrate(system, system.default_xi0(), system.default_a0(), T, dt);
    const CurvePair curve = spline_curve(system, traj);
    const CurvePair transformed = act_on_curve(h, curve);

    // evaluation times on the sample grid, away from the interval ends
    const int n = static_cast<int>(traj.times.size());
    std::vector<double> times;
    const int stride = std::max(1, (n - 4) / 24);
    for (int i = 2; i + 2 < n; i += stride) times.push_back(traj.times[i]);

    const double fd_step = dt;
    const double base = curve_residual_sup(system, curve, times, fd_step);
    const double trans = curve_residual_sup(system, transformed, times, fd_step);

    CheckReport rep;
    rep.name = "solution_transport";
    rep.detail = system.name + " under " + h.name();
    rep.max_defect = trans;
    rep.tolerance = 10.0 * base + 1e-6;
    rep.pass = trans <= rep.tolerance;
    {
        std::ostringstream os;
        os << "untransformed residual " << base << ", transformed " << trans;
        rep.worst = os.str();
    }
    (void)opts;
    return rep;
}

CheckReport check_reference_match(const SystemBundle& system, const CheckOptions& opts) {
    if (!system.has_reference)
        throw ConfigError("check_reference_match: no reference declared for " + system.name);
    Rng rng = make_rng(opts.seed, "reference_match/" + system.name);
    const FieldShape shape = sample_shape(system);
    const ReducedLagrangian& l = system.lagrangian;

    CheckReport rep;
    rep.name = "reference_match";
    rep.detail = system.name;
    rep.tolerance = 1e-8;
    for (int i = 0; i < opts.samples; ++i) {
        const AlgElem xi = random_alg_elem(rng, system.algebra, shape);
        std::optional<AdvectedState> a;
        if (system.action) a = random_advected_state(rng, *system.action, shape);
        const AdvectedState* ap = a ? &*a : nullptr;

        const DualElem mu = l.d_xi(xi, ap);
        Eigen::VectorXd mu_dot_gen =
            -ad_star(xi, mu).coords + ep_forcing(system.family, l, xi, ap).coords;
        const auto [mu_dot_ref, a_dot_ref] = reference_rhs(system, xi, ap);
        double defect = (mu_dot_gen - mu_dot_ref).cwiseAbs().maxCoeff() /
                        (1.0 + mu_dot_ref.cwiseAbs().maxCoeff());
        if (ap && a_dot_ref.size() > 0) {
            const Eigen::VectorXd a_dot_gen = advect_rhs(system.family, xi, *a);
            defect = std::max(defect, (a_dot_gen - a_dot_ref).cwiseAbs().maxCoeff() /
                                          (1.0 + a_dot_ref.cwiseAbs().maxCoeff()));
        }
        if (defect > rep.max_defect) {
            rep.max_defect = defect;
            std::ostringstream os;
            os << "state " << i;
            rep.worst = os.str();
        }
    }
    rep.pass = rep.max_defect <= rep.tolerance;
    return rep;
}

CheckReport check_conservation(const SystemBundle& system, double T, double dt,
                               const CheckOptions& opts) {
    const Trajectory traj = integrate(system, system.default_xi0(), system.default_a0(), T, dt);
    const auto q0 = conserved_quantities(system, traj.states.front());

    auto tolerance_for = [&](const std::string& name) {
        if (name == "energy") return 1e-7;
        if (name == "gamma_norm2" || name == "mu_dot_gamma") return 1e-9;
        if (name == "m_norm") return 1e-10;
        if (name == "spin_compatibility" || name == "mu_mean") return 1e-12;
        return 1e-9;
    };

    CheckReport rep;
    rep.name = "conservation";
    rep.detail = system.name;
    rep.tolerance = 1.0; // max over quantities of drift / per-quantity tolerance
    std::map<std::string, double> drift;
    const int stride = std::max<int>(1, static_cast<int>(traj.states.size()) / 256);
    for (size_t i = 1; i < traj.states.size(); i += stride) {
        const auto q = conserved_quantities(system, traj.states[i]);
        for (const auto& [name, value] : q) {
            double d;
            if (name == "energy") {
                d = std::abs(value - q0.at(name)) / std::max(1e-12, std::abs(q0.at(name)));
            } else if (name == "spin_compatibility") {
                d = std::abs(value); // identically zero functional
            } else {
                d = std::abs(value - q0.at(name)) / (1.0 + std::abs(q0.at(name)));
            }
            drift[name] = std::max(drift[name], d);
        }
    }
    std::ostringstream os;
    for (const auto& [name, d] : drift) {
        const double ratio = d / tolerance_for(name);
        if (ratio > rep.max_defect) {
            rep.max_defect = ratio;
            rep.worst = name;
        }
        os << name << " drift " << d << " (tol " << tolerance_for(name) << "); ";
    }
    rep.detail += ": " + os.str();
    rep.pass = rep.max_defect <= rep.tolerance;
    (void)opts;
    return rep;
}

} // namespace epred
