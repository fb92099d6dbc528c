#pragma once

#include <Eigen/Dense>

#include <vector>

namespace epred {

/// Not-a-knot cubic spline through (t_i, y_i) with vector values; strictly
/// increasing knots, at least 4 of them. Evaluation at knots reproduces the
/// samples exactly.
class CubicSpline {
public:
    CubicSpline(std::vector<double> times, std::vector<Eigen::VectorXd> values);

    Eigen::VectorXd operator()(double t) const;
    double t_min() const { return times_.front(); }
    double t_max() const { return times_.back(); }

private:
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> values_;
    std::vector<Eigen::VectorXd> second_; // second derivatives at knots
};

} // namespace epred
