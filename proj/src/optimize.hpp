#pragma once

// Derivative-free 1-D/2-D minimizers used to polish grid-scan optima.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace tsui::detail {

struct Minimum1D {
    double x;
    double f;
};

/// Golden-section search on [lo, hi]. f may return +inf at infeasible points.
inline Minimum1D golden_section(const std::function<double(double)>& f, double lo, double hi,
                                double tol, int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? Minimum1D{c, fc} : Minimum1D{d, fd};
}

struct Minimum2D {
    double x;
    double y;
    double f;
};

/// Powell's conjugate-direction method with golden-section line searches of half-width
/// `step`. Handles the narrow diagonal valleys of the homodyne landscape, where plain
/// coordinate descent crawls.
inline Minimum2D powell_refine(const std::function<double(double, double)>& f, double x0,
                               double y0, double step, double tol, int max_iter = 60) {
    double dirs[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    double x = x0;
    double y = y0;
    double fx = f(x, y);

    auto line_min = [&](const double* dir, double& px, double& py, double& pf) {
        auto g = [&](double t) { return f(px + t * dir[0], py + t * dir[1]); };
        Minimum1D m = golden_section(g, -step, step, tol);
        if (m.f < pf) {
            px += m.x * dir[0];
            py += m.x * dir[1];
            pf = m.f;
        }
    };

    for (int it = 0; it < max_iter; ++it) {
        const double sx = x;
        const double sy = y;
        for (auto& dir : dirs) line_min(dir, x, y, fx);
        double nx = x - sx;
        double ny = y - sy;
        const double len = std::hypot(nx, ny);
        if (len < tol) break;
        double dnew[2] = {nx / len, ny / len};
        line_min(dnew, x, y, fx);
        dirs[0][0] = dirs[1][0];
        dirs[0][1] = dirs[1][1];
        dirs[1][0] = dnew[0];
        dirs[1][1] = dnew[1];
    }
    return {x, y, fx};
}

}  // namespace tsui::detail
