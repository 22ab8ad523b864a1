#pragma once

#include "twinlattice/linalg.hpp"
#include "twinlattice/wells.hpp"

namespace twinlat {

// Signed neighbor differences at one site, divided by the spacing:
// up = (u^{p,q+1} - u^{pq})/s, down = (u^{p,q-1} - u^{pq})/s, right/left along p.
struct Stencil {
    Vec2 up = Vec2::Zero();
    Vec2 down = Vec2::Zero();
    Vec2 right = Vec2::Zero();
    Vec2 left = Vec2::Zero();
};

// Two-well density h = B(a,b) B(b,a) with
// B(a,b) = sum_s (|v_s|^2 - a^2)^2 + sum_t (|h_t|^2 - b^2)^2 + sum_{s,t} (v_s . h_t)^2.
double density(const Stencil& st, double a, double b);
inline double density(const Stencil& st, const WellPair& w) { return density(st, w.a, w.b); }

// Value, gradient and Hessian with respect to the stencil packed as
// (up, down, right, left), 8 components.
struct DensityJet {
    double value = 0.0;
    Eigen::Matrix<double, 8, 1> gradient;
    Eigen::Matrix<double, 8, 8> hessian;
};

DensityJet density_jet(const Stencil& st, double a, double b);

}  // namespace twinlat
