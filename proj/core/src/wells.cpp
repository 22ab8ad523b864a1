#include "twinlattice/wells.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twinlat {

WellPair build_wells(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("build_wells: a must be positive, got " + std::to_string(a));
    }
    if (a == 1.0) {
        throw std::invalid_argument("build_wells: a = 1 makes the two wells coincide");
    }
    WellPair w;
    w.a = a;
    w.b = 1.0 / a;
    const double a2 = a * a;
    const double b2 = w.b * w.b;
    w.U0 << a, 0.0, 0.0, w.b;
    w.U1 << w.b, 0.0, 0.0, a;
    // det(U0 - R(t) U1) = 2 - cos(t)(a^2 + b^2) vanishes for cos t = 2/(a^2+b^2).
    // The sign of sin t selects the normal: +k gives (a,-b) x (1,1).
    const double c = 2.0 / (a2 + b2);
    const double s = (a2 - b2) / (a2 + b2);
    w.gamma = std::atan2(s, c);
    w.Q << c, -s, s, c;
    w.Qtilde << c, s, -s, c;
    w.tau = Vec2(-a, w.b);
    return w;
}

BoundaryGradient boundary_gradient(const WellPair& wells, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("boundary_gradient: lambda must lie in [0,1], got " +
                                    std::to_string(lambda));
    }
    BoundaryGradient g;
    g.lambda = lambda;
    if (lambda == 0.0) {
        g.F = wells.U0;
    } else if (lambda == 1.0) {
        g.F = wells.QU1();
    } else {
        g.F = (1.0 - lambda) * wells.U0 + lambda * wells.QU1();
    }
    return g;
}

WellDistance dist_to_well(const Mat2& M, const Mat2& U) {
    // tr(R^T A) with A = M U^T is maximized by theta = atan2(A21 - A12, A11 + A22)
    const Mat2 A = M * U.transpose();
    const double p = A(0, 0) + A(1, 1);
    const double q = A(1, 0) - A(0, 1);
    WellDistance out;
    out.angle = std::atan2(q, p);
    // |M|^2 + |U|^2 - 2 hypot(p, q) cancels badly near the well, so the residual is formed
    // explicitly at the optimal angle
    out.distance = (M - rotation(out.angle) * U).norm();
    return out;
}

}  // namespace twinlat
