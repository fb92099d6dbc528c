#include "epred/spline.hpp"

#include "epred/errors.hpp"

#include <algorithm>

namespace epred {

CubicSpline::CubicSpline(std::vector<double> times, std::vector<Eigen::VectorXd> values)
    : times_(std::move(times)), values_(std::move(values)) {
    const int n = static_cast<int>(times_.size());
    if (n < 4) throw ShapeError("CubicSpline: need at least 4 knots");
    if (values_.size() != times_.size()) throw ShapeError("CubicSpline: times/values mismatch");
    for (int i = 1; i < n; ++i)
        if (!(times_[i] > times_[i - 1])) throw ShapeError("CubicSpline: knots must increase");

    const int dim = static_cast<int>(values_[0].size());
    auto h = [&](int i) { return times_[i + 1] - times_[i]; };

    // Second derivatives M_i from the continuity equations
    //   (h_{i-1}/6) M_{i-1} + ((h_{i-1}+h_i)/3) M_i + (h_i/6) M_{i+1} = r_i
    // for i = 1..n-2, with not-a-knot ends
    //   h_1 M_0 = (h_0+h_1) M_1 - h_0 M_2,
    //   h_{n-3} M_{n-1} = (h_{n-3}+h_{n-2}) M_{n-2} - h_{n-2} M_{n-3}.
    // Eliminating M_0 and M_{n-1} leaves a tridiagonal system for M_1..M_{n-2}
    // solved by the Thomas algorithm, vector right-hand sides in parallel.
    const int m = n - 2;
    std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0);
    Eigen::MatrixXd rhs(m, dim);
    for (int i = 1; i <= n - 2; ++i) {
        const int k = i - 1;
        lower[k] = h(i - 1) / 6.0;
        diag[k] = (h(i - 1) + h(i)) / 3.0;
        upper[k] = h(i) / 6.0;
        for (int c = 0; c < dim; ++c)
            rhs(k, c) = (values_[i + 1][c] - values_[i][c]) / h(i) -
                        (values_[i][c] - values_[i - 1][c]) / h(i - 1);
    }
    // fold the end conditions into the first and last interior rows
    diag[0] += lower[0] * (h(0) + h(1)) / h(1);
    upper[0] -= lower[0] * h(0) / h(1);
    lower[0] = 0.0;
    diag[m - 1] += upper[m - 1] * (h(n - 3) + h(n - 2)) / h(n - 3);
    lower[m - 1] -= upper[m - 1] * h(n - 2) / h(n - 3);
    upper[m - 1] = 0.0;

    for (int k = 1; k < m; ++k) {
        const double w = lower[k] / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs.row(k) -= w * rhs.row(k - 1);
    }
    Eigen::MatrixXd sol(m, dim);
    sol.row(m - 1) = rhs.row(m - 1) / diag[m - 1];
    for (int k = m - 2; k >= 0; --k)
        sol.row(k) = (rhs.row(k) - upper[k] * sol.row(k + 1)) / diag[k];

    second_.resize(n);
    for (int i = 1; i <= n - 2; ++i) second_[i] = sol.row(i - 1).transpose();
    second_[0] = ((h(0) + h(1)) * second_[1] - h(0) * second_[2]) / h(1);
    second_[n - 1] =
        ((h(n - 3) + h(n - 2)) * second_[n - 2] - h(n - 2) * second_[n - 3]) / h(n - 3);
}

Eigen::VectorXd CubicSpline::operator()(double t) const {
    const int n = static_cast<int>(times_.size());
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
        throw ShapeError("CubicSpline: evaluation outside knot range");
    int i = static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin()) - 1;
    i = std::clamp(i, 0, n - 2);
    const double h = times_[i + 1] - times_[i];
    const double u = (times_[i + 1] - t) / h;
    const double v = (t - times_[i]) / h;
    return u * values_[i] + v * values_[i + 1] +
           ((u * u * u - u) * second_[i] + (v * v * v - v) * second_[i + 1]) * (h * h / 6.0);
}

} // namespace epred
