#pragma once

#include "twinlattice/linalg.hpp"

namespace twinlat {

// Two martensitic wells SO(2)U0 and SO(2)U1 with U0 = diag(a, b), U1 = diag(b, a), b = 1/a.
// Q connects U0 and Q U1 across the normal (1,1), Qtilde across (1,-1).
struct WellPair {
    double a = 0.0;
    double b = 0.0;
    Mat2 U0 = Mat2::Zero();
    Mat2 U1 = Mat2::Zero();
    Mat2 Q = Mat2::Identity();
    Mat2 Qtilde = Mat2::Identity();
    double gamma = 0.0;  // rotation angle of Q, sin(gamma) = (a^2 - b^2) / (a^2 + b^2)
    Vec2 tau = Vec2::Zero();

    Mat2 QU1() const { return Q * U1; }
    // 0 -> U0, 1 -> Q U1
    const Mat2& well(int id) const { return id == 0 ? U0 : U1; }
};

WellPair build_wells(double a);

struct BoundaryGradient {
    double lambda = 0.0;
    Mat2 F = Mat2::Zero();
};

BoundaryGradient boundary_gradient(const WellPair& wells, double lambda);

struct WellDistance {
    double distance = 0.0;
    double angle = 0.0;  // minimizing theta in min |M - R(theta) U|
};

// min over rotations of |M - R U|_F, closed form
WellDistance dist_to_well(const Mat2& M, const Mat2& U);

}  // namespace twinlat
