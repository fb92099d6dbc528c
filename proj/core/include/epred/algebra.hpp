#pragma once

#include "epred/errors.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace epred {

// Finite-dimensional coordinate realizations of the Lie algebras used by the
// example systems, in the right-invariant convention (xi = dg/dt g^{-1}).
//
//   So3       so(3) ~ R^3 via the hat map; bracket = cross product.
//   VectS1    vector fields on S^1, nodal values on a uniform N-point grid;
//             ad_u v = (Du) v - u (Dv) with D the 4th-order periodic stencil.
//   GaugeSo3  maps S^1 -> so(3), site-major R^{3N}; pointwise so(3) calculus.
//   Product   direct sum of factors, blockwise operations.
//
// Duals are identified with the primal coordinate space through pair():
// Euclidean dot for So3, the dx-weighted discrete L^2 sum for the lattices.

enum class AlgebraKind { So3, VectS1, GaugeSo3, Product };

class AlgebraDescriptor {
public:
    static AlgebraDescriptor so3();
    static AlgebraDescriptor vect_s1(int grid_size);
    static AlgebraDescriptor gauge_so3(int grid_size);
    static AlgebraDescriptor product(std::vector<AlgebraDescriptor> factors);

    AlgebraKind kind() const { return kind_; }
    /// N for the lattice algebras; throws otherwise.
    int grid_size() const;
    /// dx = 2pi/N.
    double spacing() const;
    int dim() const;
    const std::vector<AlgebraDescriptor>& factors() const;

    bool operator==(const AlgebraDescriptor& other) const;
    bool operator!=(const AlgebraDescriptor& other) const { return !(*this == other); }

private:
    AlgebraDescriptor(AlgebraKind kind, int grid_size);
    AlgebraKind kind_;
    int grid_size_ = 0;
    std::shared_ptr<const std::vector<AlgebraDescriptor>> factors_;
};

/// Element of the Lie algebra, coords of length dim(desc), all finite.
struct AlgElem {
    AlgElem(AlgebraDescriptor d, Eigen::VectorXd c);
    static AlgElem zero(const AlgebraDescriptor& d);

    AlgebraDescriptor desc;
    Eigen::VectorXd coords;
};

/// Element of the dual, same shape rules as AlgElem but paired by pair().
struct DualElem {
    DualElem(AlgebraDescriptor d, Eigen::VectorXd c);
    static DualElem zero(const AlgebraDescriptor& d);

    AlgebraDescriptor desc;
    Eigen::VectorXd coords;
};

/// Group element acting on an algebra: a rotation matrix (So3), a rigid
/// rotation angle of S^1 (VectS1 -- the only materialized subgroup of
/// Diff(S^1)), per-site rotation matrices (GaugeSo3), or one element per
/// factor (Product). Matrices are validated to R^T R = I and det R = +1
/// at 1e-12 on construction.
class GroupElem {
public:
    static GroupElem identity(const AlgebraDescriptor& d);
    static GroupElem rotation(const Eigen::Matrix3d& R);
    static GroupElem circle_rotation(const AlgebraDescriptor& vect_desc, double theta);
    static GroupElem gauge(const AlgebraDescriptor& gauge_desc,
                           std::vector<Eigen::Matrix3d> site_matrices);
    static GroupElem product(const AlgebraDescriptor& prod_desc, std::vector<GroupElem> parts);

    const AlgebraDescriptor& desc() const { return desc_; }
    const Eigen::Matrix3d& matrix() const;
    double angle() const;
    const std::vector<Eigen::Matrix3d>& site_matrices() const;
    const std::vector<GroupElem>& parts() const;

    GroupElem inverse() const;
    GroupElem operator*(const GroupElem& other) const;

private:
    GroupElem(AlgebraDescriptor d) : desc_(std::move(d)) {}
    AlgebraDescriptor desc_;
    std::variant<Eigen::Matrix3d, double, std::vector<Eigen::Matrix3d>, std::vector<GroupElem>>
        data_;
};

/// ad_x y. So3/GaugeSo3: pointwise cross product; VectS1: (Du) v - u (Dv).
AlgElem bracket(const AlgElem& x, const AlgElem& y);

/// ad*_x mu, the pairing-adjoint of the bracket:
/// pair(ad_star(x, mu), y) ~ pair(mu, bracket(x, y)).
/// So3/GaugeSo3: pointwise mu x x (exact); VectS1: u Dm + 2 (Du) m, adjoint
/// up to the O(dx^4) product-rule defect of the stencil.
DualElem ad_star(const AlgElem& x, const DualElem& mu);

/// Ad_g x.  VectS1 rotations act by (possibly trigonometric) grid shift.
AlgElem group_ad(const GroupElem& g, const AlgElem& x);

/// Ad*_g mu, defined by pair(Ad*_g mu, xi) = pair(mu, Ad_g xi).
/// So3: R^T mu; VectS1 rotation by theta: shift by -theta.
DualElem group_ad_star(const GroupElem& g, const DualElem& mu);

/// Rodrigues exponential, So3 only; small angles by series.
GroupElem exp_so3(const AlgElem& x);

/// Duality pairing. So3: dot; lattices: sum_j mu_j . x_j dx.
double pair(const DualElem& mu, const AlgElem& x);

/// 4th-order central finite difference in t:
/// (-f(t+2h) + 8 f(t+h) - 8 f(t-h) + f(t-2h)) / (12 h). Exact on cubics.
Eigen::VectorXd time_derivative(const std::function<Eigen::VectorXd(double)>& curve, double t,
                                double h);

// hat map helpers for so(3) ~ R^3
Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& a);
/// vee of the antisymmetric part, for matrices that are only approximately
/// in so(3) (e.g. stencil derivatives of rotation curves).
Eigen::Vector3d vee_antisym(const Eigen::Matrix3d& a);

} // namespace epred
