#include "epred/grid.hpp"

#include "epred/errors.hpp"

#include <cmath>
#include <numbers>

namespace epred::grid {

namespace {

void check_field(const Eigen::VectorXd& f, int grid_size, int comps) {
    if (grid_size < 8 || grid_size % 2 != 0)
        throw ShapeError("grid_size must be even and >= 8");
    if (f.size() != static_cast<Eigen::Index>(grid_size) * comps)
        throw ShapeError("field length does not match grid_size * comps");
}

} // namespace

double spacing(int grid_size) { return 2.0 * std::numbers::pi / grid_size; }

Eigen::VectorXd nodes(int grid_size) {
    Eigen::VectorXd x(grid_size);
    const double dx = spacing(grid_size);
    for (int j = 0; j < grid_size; ++j) x[j] = j * dx;
    return x;
}

Eigen::VectorXd derivative(const Eigen::VectorXd& f, int grid_size, int comps) {
    check_field(f, grid_size, comps);
    const int n = grid_size;
    const double w = 1.0 / (12.0 * spacing(n));
    Eigen::VectorXd out(f.size());
    for (int j = 0; j < n; ++j) {
        const int jp1 = (j + 1) % n, jp2 = (j + 2) % n;
        const int jm1 = (j + n - 1) % n, jm2 = (j + n - 2) % n;
        for (int c = 0; c < comps; ++c) {
            // paired differences so constant fields are annihilated exactly
            out[comps * j + c] = w * (8.0 * (f[comps * jp1 + c] - f[comps * jm1 + c]) -
                                      (f[comps * jp2 + c] - f[comps * jm2 + c]));
        }
    }
    return out;
}

Eigen::VectorXd trig_shift(const Eigen::VectorXd& f, int grid_size, double s, int comps) {
    check_field(f, grid_size, comps);
    const int n = grid_size;
    const double dx = spacing(n);

    // Integer-shift fast path (exact roll).
    const double slots = s / dx;
    const double rounded = std::round(slots);
    if (std::abs(slots - rounded) < 1e-12) {
        long r = static_cast<long>(rounded) % n;
        if (r < 0) r += n;
        if (r == 0) return f;
        Eigen::VectorXd out(f.size());
        for (int j = 0; j < n; ++j) {
            const int src = static_cast<int>((j + n - r % n) % n);
            for (int c = 0; c < comps; ++c) out[comps * j + c] = f[comps * src + c];
        }
        return out;
    }

    const int half = n / 2;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    // Real DFT per component, evaluated at x_j - s. Harmonics come from the
    // angle-addition recurrence on precomputed base tables: only O(n) trig
    // calls, O(n^2) multiply-adds.
    Eigen::ArrayXd cos1(n), sin1(n);
    for (int j = 0; j < n; ++j) {
        cos1[j] = std::cos(j * dx);
        sin1[j] = std::sin(j * dx);
    }
    Eigen::ArrayXd cosk = Eigen::ArrayXd::Constant(n, 1.0), sink = Eigen::ArrayXd::Zero(n);
    const double cs1 = std::cos(s), sn1 = std::sin(s);
    double csk = 1.0, snk = 0.0;

    std::vector<Eigen::Map<const Eigen::ArrayXd, 0, Eigen::InnerStride<>>> comp_views;
    comp_views.reserve(comps);
    for (int c = 0; c < comps; ++c)
        comp_views.emplace_back(f.data() + c, n, Eigen::InnerStride<>(comps));

    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
    for (int c = 0; c < comps; ++c) {
        const double a0 = comp_views[c].sum() / n;
        for (int j = 0; j < n; ++j) out[comps * j + c] = a0;
    }

    for (int k = 1; k <= half; ++k) {
        // advance cos(k x_j), sin(k x_j) and cos(k s), sin(k s)
        Eigen::ArrayXd cnew = cosk * cos1 - sink * sin1;
        sink = sink * cos1 + cosk * sin1;
        cosk.swap(cnew);
        const double cnew_s = csk * cs1 - snk * sn1;
        snk = snk * cs1 + csk * sn1;
        csk = cnew_s;

        const double scale = (k == half) ? 1.0 / n : 2.0 / n;
        for (int c = 0; c < comps; ++c) {
            const double ak = (comp_views[c] * cosk).sum() * scale;
            const double bk = (comp_views[c] * sink).sum() * scale;
            if (k == half) {
                // Nyquist: symmetric convention cos(kx) -> cos(kx) cos(ks)
                acc = ak * csk * cosk;
            } else {
                const double a_shift = ak * csk - bk * snk;
                const double b_shift = bk * csk + ak * snk;
                acc = a_shift * cosk + b_shift * sink;
            }
            for (int j = 0; j < n; ++j) out[comps * j + c] += acc[j];
        }
    }
    return out;
}

double quadrature(const Eigen::VectorXd& f, int grid_size) {
    return f.sum() * spacing(grid_size);
}

} // namespace epred::grid
