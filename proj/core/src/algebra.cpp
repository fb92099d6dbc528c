#include "epred/algebra.hpp"

#include "epred/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace epred {

namespace {

void require_same_desc(const AlgebraDescriptor& a, const AlgebraDescriptor& b,
                       const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": descriptor mismatch";
        throw ShapeError(os.str());
    }
}

void require_finite(const Eigen::VectorXd& v, const char* where) {
    if (!v.allFinite()) throw NumericalError(std::string(where) + ": non-finite entries");
}

void check_rotation(const Eigen::Matrix3d& r) {
    const double orth = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (orth > 1e-12) throw ShapeError("rotation matrix fails R^T R = I at 1e-12");
    if (std::abs(r.determinant() - 1.0) > 1e-12)
        throw ShapeError("rotation matrix fails det R = +1 at 1e-12");
}

} // namespace

// ---------------------------------------------------------------------------
// descriptors and elements

AlgebraDescriptor::AlgebraDescriptor(AlgebraKind kind, int grid_size)
    : kind_(kind), grid_size_(grid_size) {}

AlgebraDescriptor AlgebraDescriptor::so3() { return {AlgebraKind::So3, 0}; }

AlgebraDescriptor AlgebraDescriptor::vect_s1(int grid_size) {
    if (grid_size < 8 || grid_size % 2 != 0)
        throw ShapeError("vect_s1: grid_size must be even and >= 8");
    return {AlgebraKind::VectS1, grid_size};
}

AlgebraDescriptor AlgebraDescriptor::gauge_so3(int grid_size) {
    if (grid_size < 8 || grid_size % 2 != 0)
        throw ShapeError("gauge_so3: grid_size must be even and >= 8");
    return {AlgebraKind::GaugeSo3, grid_size};
}

AlgebraDescriptor AlgebraDescriptor::product(std::vector<AlgebraDescriptor> factors) {
    if (factors.empty()) throw ShapeError("product: needs at least one factor");
    AlgebraDescriptor d(AlgebraKind::Product, 0);
    d.factors_ = std::make_shared<const std::vector<AlgebraDescriptor>>(std::move(factors));
    return d;
}

int AlgebraDescriptor::grid_size() const {
    if (kind_ != AlgebraKind::VectS1 && kind_ != AlgebraKind::GaugeSo3)
        throw ShapeError("grid_size: not a lattice algebra");
    return grid_size_;
}

double AlgebraDescriptor::spacing() const { return grid::spacing(grid_size()); }

int AlgebraDescriptor::dim() const {
    switch (kind_) {
        case AlgebraKind::So3: return 3;
        case AlgebraKind::VectS1: return grid_size_;
        case AlgebraKind::GaugeSo3: return 3 * grid_size_;
        case AlgebraKind::Product: {
            int d = 0;
            for (const auto& f : *factors_) d += f.dim();
            return d;
        }
    }
    return 0;
}

const std::vector<AlgebraDescriptor>& AlgebraDescriptor::factors() const {
    if (kind_ != AlgebraKind::Product) throw ShapeError("factors: not a product algebra");
    return *factors_;
}

bool AlgebraDescriptor::operator==(const AlgebraDescriptor& other) const {
    if (kind_ != other.kind_ || grid_size_ != other.grid_size_) return false;
    if (kind_ != AlgebraKind::Product) return true;
    if (factors_->size() != other.factors_->size()) return false;
    for (size_t i = 0; i < factors_->size(); ++i)
        if ((*factors_)[i] != (*other.factors_)[i]) return false;
    return true;
}

AlgElem::AlgElem(AlgebraDescriptor d, Eigen::VectorXd c) : desc(std::move(d)), coords(std::move(c)) {
    if (coords.size() != desc.dim()) throw ShapeError("AlgElem: wrong coordinate length");
    require_finite(coords, "AlgElem");
}

AlgElem AlgElem::zero(const AlgebraDescriptor& d) {
    return {d, Eigen::VectorXd::Zero(d.dim())};
}

DualElem::DualElem(AlgebraDescriptor d, Eigen::VectorXd c)
    : desc(std::move(d)), coords(std::move(c)) {
    if (coords.size() != desc.dim()) throw ShapeError("DualElem: wrong coordinate length");
    require_finite(coords, "DualElem");
}

DualElem DualElem::zero(const AlgebraDescriptor& d) {
    return {d, Eigen::VectorXd::Zero(d.dim())};
}

// ---------------------------------------------------------------------------
// group elements

GroupElem GroupElem::identity(const AlgebraDescriptor& d) {
    GroupElem g(d);
    switch (d.kind()) {
        case AlgebraKind::So3: g.data_ = Eigen::Matrix3d(Eigen::Matrix3d::Identity()); break;
        case AlgebraKind::VectS1: g.data_ = 0.0; break;
        case AlgebraKind::GaugeSo3:
            g.data_ = std::vector<Eigen::Matrix3d>(d.grid_size(), Eigen::Matrix3d::Identity());
            break;
        case AlgebraKind::Product: {
            std::vector<GroupElem> parts;
            for (const auto& f : d.factors()) parts.push_back(GroupElem::identity(f));
            g.data_ = std::move(parts);
            break;
        }
    }
    return g;
}

GroupElem GroupElem::rotation(const Eigen::Matrix3d& R) {
    check_rotation(R);
    GroupElem g(AlgebraDescriptor::so3());
    g.data_ = R;
    return g;
}

GroupElem GroupElem::circle_rotation(const AlgebraDescriptor& vect_desc, double theta) {
    if (vect_desc.kind() != AlgebraKind::VectS1)
        throw ShapeError("circle_rotation: descriptor must be VectS1");
    GroupElem g(vect_desc);
    g.data_ = theta;
    return g;
}

GroupElem GroupElem::gauge(const AlgebraDescriptor& gauge_desc,
                           std::vector<Eigen::Matrix3d> site_matrices) {
    if (gauge_desc.kind() != AlgebraKind::GaugeSo3)
        throw ShapeError("gauge: descriptor must be GaugeSo3");
    if (static_cast<int>(site_matrices.size()) != gauge_desc.grid_size())
        throw ShapeError("gauge: one matrix per site required");
    for (const auto& r : site_matrices) check_rotation(r);
    GroupElem g(gauge_desc);
    g.data_ = std::move(site_matrices);
    return g;
}

GroupElem GroupElem::product(const AlgebraDescriptor& prod_desc, std::vector<GroupElem> parts) {
    if (prod_desc.kind() != AlgebraKind::Product)
        throw ShapeError("product: descriptor must be Product");
    const auto& fs = prod_desc.factors();
    if (parts.size() != fs.size()) throw ShapeError("product: one element per factor");
    for (size_t i = 0; i < fs.size(); ++i)
        if (parts[i].desc() != fs[i]) throw ShapeError("product: factor descriptor mismatch");
    GroupElem g(prod_desc);
    g.data_ = std::move(parts);
    return g;
}

const Eigen::Matrix3d& GroupElem::matrix() const {
    if (!std::holds_alternative<Eigen::Matrix3d>(data_))
        throw ShapeError("matrix: not an So3 element");
    return std::get<Eigen::Matrix3d>(data_);
}

double GroupElem::angle() const {
    if (!std::holds_alternative<double>(data_)) throw ShapeError("angle: not a circle rotation");
    return std::get<double>(data_);
}

const std::vector<Eigen::Matrix3d>& GroupElem::site_matrices() const {
    if (!std::holds_alternative<std::vector<Eigen::Matrix3d>>(data_))
        throw ShapeError("site_matrices: not a gauge element");
    return std::get<std::vector<Eigen::Matrix3d>>(data_);
}

const std::vector<GroupElem>& GroupElem::parts() const {
    if (!std::holds_alternative<std::vector<GroupElem>>(data_))
        throw ShapeError("parts: not a product element");
    return std::get<std::vector<GroupElem>>(data_);
}

GroupElem GroupElem::inverse() const {
    GroupElem g(desc_);
    switch (desc_.kind()) {
        case AlgebraKind::So3: g.data_ = Eigen::Matrix3d(matrix().transpose()); break;
        case AlgebraKind::VectS1: g.data_ = -angle(); break;
        case AlgebraKind::GaugeSo3: {
            std::vector<Eigen::Matrix3d> inv;
            inv.reserve(site_matrices().size());
            for (const auto& r : site_matrices()) inv.push_back(r.transpose());
            g.data_ = std::move(inv);
            break;
        }
        case AlgebraKind::Product: {
            std::vector<GroupElem> inv;
            for (const auto& p : parts()) inv.push_back(p.inverse());
            g.data_ = std::move(inv);
            break;
        }
    }
    return g;
}

GroupElem GroupElem::operator*(const GroupElem& other) const {
    require_same_desc(desc_, other.desc_, "GroupElem::operator*");
    GroupElem g(desc_);
    switch (desc_.kind()) {
        case AlgebraKind::So3: g.data_ = Eigen::Matrix3d(matrix() * other.matrix()); break;
        case AlgebraKind::VectS1: g.data_ = angle() + other.angle(); break;
        case AlgebraKind::GaugeSo3: {
            std::vector<Eigen::Matrix3d> prod;
            const auto& a = site_matrices();
            const auto& b = other.site_matrices();
            prod.reserve(a.size());
            for (size_t j = 0; j < a.size(); ++j) prod.push_back(a[j] * b[j]);
            g.data_ = std::move(prod);
            break;
        }
        case AlgebraKind::Product: {
            std::vector<GroupElem> prod;
            for (size_t i = 0; i < parts().size(); ++i)
                prod.push_back(parts()[i] * other.parts()[i]);
            g.data_ = std::move(prod);
            break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// hat map

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
    Eigen::Matrix3d m;
    m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& a) { return {a(2, 1), a(0, 2), a(1, 0)}; }

Eigen::Vector3d vee_antisym(const Eigen::Matrix3d& a) {
    return 0.5 * Eigen::Vector3d(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

// ---------------------------------------------------------------------------
// algebra operations

namespace {

// blockwise application over product factors
template <typename Elem, typename Fn>
Elem blockwise(const Elem& x, const Elem& y, Fn&& fn) {
    const auto& fs = x.desc.factors();
    Eigen::VectorXd out(x.coords.size());
    int off = 0;
    for (const auto& f : fs) {
        const int d = f.dim();
        Elem xs{f, x.coords.segment(off, d)};
        Elem ys{f, y.coords.segment(off, d)};
        out.segment(off, d) = fn(xs, ys).coords;
        off += d;
    }
    return {x.desc, std::move(out)};
}

Eigen::Vector3d site(const Eigen::VectorXd& v, int j) { return v.segment<3>(3 * j); }

} // namespace

AlgElem bracket(const AlgElem& x, const AlgElem& y) {
    require_same_desc(x.desc, y.desc, "bracket");
    switch (x.desc.kind()) {
        case AlgebraKind::So3: {
            Eigen::Vector3d a = x.coords, b = y.coords;
            return {x.desc, a.cross(b)};
        }
        case AlgebraKind::VectS1: {
            const int n = x.desc.grid_size();
            const Eigen::VectorXd du = grid::derivative(x.coords, n);
            const Eigen::VectorXd dv = grid::derivative(y.coords, n);
            return {x.desc, (du.array() * y.coords.array() - x.coords.array() * dv.array()).matrix()};
        }
        case AlgebraKind::GaugeSo3: {
            const int n = x.desc.grid_size();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j)
                out.segment<3>(3 * j) = site(x.coords, j).cross(site(y.coords, j));
            return {x.desc, std::move(out)};
        }
        case AlgebraKind::Product:
            return blockwise(x, y, [](const AlgElem& a, const AlgElem& b) { return bracket(a, b); });
    }
    throw ShapeError("bracket: unknown algebra kind");
}

DualElem ad_star(const AlgElem& x, const DualElem& mu) {
    require_same_desc(x.desc, mu.desc, "ad_star");
    switch (x.desc.kind()) {
        case AlgebraKind::So3: {
            Eigen::Vector3d m = mu.coords, a = x.coords;
            return {x.desc, m.cross(a)};
        }
        case AlgebraKind::VectS1: {
            const int n = x.desc.grid_size();
            const Eigen::VectorXd dm = grid::derivative(mu.coords, n);
            const Eigen::VectorXd du = grid::derivative(x.coords, n);
            return {x.desc,
                    (x.coords.array() * dm.array() + 2.0 * du.array() * mu.coords.array()).matrix()};
        }
        case AlgebraKind::GaugeSo3: {
            const int n = x.desc.grid_size();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j)
                out.segment<3>(3 * j) = site(mu.coords, j).cross(site(x.coords, j));
            return {x.desc, std::move(out)};
        }
        case AlgebraKind::Product: {
            const auto& fs = x.desc.factors();
            Eigen::VectorXd out(x.coords.size());
            int off = 0;
            for (const auto& f : fs) {
                const int d = f.dim();
                AlgElem xs{f, x.coords.segment(off, d)};
                DualElem ms{f, mu.coords.segment(off, d)};
                out.segment(off, d) = ad_star(xs, ms).coords;
                off += d;
            }
            return {x.desc, std::move(out)};
        }
    }
    throw ShapeError("ad_star: unknown algebra kind");
}

AlgElem group_ad(const GroupElem& g, const AlgElem& x) {
    require_same_desc(g.desc(), x.desc, "group_ad");
    switch (x.desc.kind()) {
        case AlgebraKind::So3:
            return {x.desc, g.matrix() * Eigen::Vector3d(x.coords)};
        case AlgebraKind::VectS1:
            return {x.desc, grid::trig_shift(x.coords, x.desc.grid_size(), g.angle())};
        case AlgebraKind::GaugeSo3: {
            const int n = x.desc.grid_size();
            const auto& rs = g.site_matrices();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j) out.segment<3>(3 * j) = rs[j] * site(x.coords, j);
            return {x.desc, std::move(out)};
        }
        case AlgebraKind::Product: {
            const auto& fs = x.desc.factors();
            Eigen::VectorXd out(x.coords.size());
            int off = 0;
            for (size_t i = 0; i < fs.size(); ++i) {
                const int d = fs[i].dim();
                AlgElem xs{fs[i], x.coords.segment(off, d)};
                out.segment(off, d) = group_ad(g.parts()[i], xs).coords;
                off += d;
            }
            return {x.desc, std::move(out)};
        }
    }
    throw ShapeError("group_ad: unknown algebra kind");
}

DualElem group_ad_star(const GroupElem& g, const DualElem& mu) {
    require_same_desc(g.desc(), mu.desc, "group_ad_star");
    switch (mu.desc.kind()) {
        case AlgebraKind::So3:
            return {mu.desc, g.matrix().transpose() * Eigen::Vector3d(mu.coords)};
        case AlgebraKind::VectS1:
            return {mu.desc, grid::trig_shift(mu.coords, mu.desc.grid_size(), -g.angle())};
        case AlgebraKind::GaugeSo3: {
            const int n = mu.desc.grid_size();
            const auto& rs = g.site_matrices();
            Eigen::VectorXd out(3 * n);
            for (int j = 0; j < n; ++j)
                out.segment<3>(3 * j) = rs[j].transpose() * site(mu.coords, j);
            return {mu.desc, std::move(out)};
        }
        case AlgebraKind::Product: {
            const auto& fs = mu.desc.factors();
            Eigen::VectorXd out(mu.coords.size());
            int off = 0;
            for (size_t i = 0; i < fs.size(); ++i) {
                const int d = fs[i].dim();
                DualElem ms{fs[i], mu.coords.segment(off, d)};
                out.segment(off, d) = group_ad_star(g.parts()[i], ms).coords;
                off += d;
            }
            return {mu.desc, std::move(out)};
        }
    }
    throw ShapeError("group_ad_star: unknown algebra kind");
}

GroupElem exp_so3(const AlgElem& x) {
    if (x.desc.kind() != AlgebraKind::So3) throw ShapeError("exp_so3: So3 only");
    const Eigen::Vector3d w = x.coords;
    const double th = w.norm();
    double s, c2; // sin(th)/th and (1-cos th)/th^2
    if (th < 1e-4) {
        const double t2 = th * th;
        s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        s = std::sin(th) / th;
        c2 = (1.0 - std::cos(th)) / (th * th);
    }
    const Eigen::Matrix3d k = hat(w);
    const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + s * k + c2 * (k * k);
    return GroupElem::rotation(r);
}

double pair(const DualElem& mu, const AlgElem& x) {
    require_same_desc(mu.desc, x.desc, "pair");
    switch (x.desc.kind()) {
        case AlgebraKind::So3:
            return mu.coords.dot(x.coords);
        case AlgebraKind::VectS1:
        case AlgebraKind::GaugeSo3:
            return mu.coords.dot(x.coords) * x.desc.spacing();
        case AlgebraKind::Product: {
            const auto& fs = x.desc.factors();
            double total = 0.0;
            int off = 0;
            for (const auto& f : fs) {
                const int d = f.dim();
                total += pair(DualElem{f, mu.coords.segment(off, d)},
                              AlgElem{f, x.coords.segment(off, d)});
                off += d;
            }
            return total;
        }
    }
    throw ShapeError("pair: unknown algebra kind");
}

Eigen::VectorXd time_derivative(const std::function<Eigen::VectorXd(double)>& curve, double t,
                                double h) {
    if (!(h > 0)) throw ShapeError("time_derivative: h must be positive");
    const Eigen::VectorXd fp2 = curve(t + 2 * h), fp1 = curve(t + h);
    const Eigen::VectorXd fm1 = curve(t - h), fm2 = curve(t - 2 * h);
    // paired differences: exact zero on constant curves
    Eigen::VectorXd out = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    require_finite(out, "time_derivative");
    return out;
}

} // namespace epred
