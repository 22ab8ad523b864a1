#include "twinlattice/density.hpp"

#include <array>

namespace twinlat {

namespace {

inline double sq(double x) { return x * x; }

}  // namespace

double density(const Stencil& st, double a, double b) {
    const double a2 = a * a;
    const double b2 = b * b;
    const double vu = st.up.squaredNorm();
    const double vd = st.down.squaredNorm();
    const double hr = st.right.squaredNorm();
    const double hl = st.left.squaredNorm();
    const double cross_terms = sq(st.up.dot(st.right)) + sq(st.up.dot(st.left)) +
                               sq(st.down.dot(st.right)) + sq(st.down.dot(st.left));
    const double b1 = sq(vu - a2) + sq(vd - a2) + sq(hr - b2) + sq(hl - b2) + cross_terms;
    const double b2b = sq(vu - b2) + sq(vd - b2) + sq(hr - a2) + sq(hl - a2) + cross_terms;
    return b1 * b2b;
}

DensityJet density_jet(const Stencil& st, double a, double b) {
    using Vec8 = Eigen::Matrix<double, 8, 1>;
    using Mat8 = Eigen::Matrix<double, 8, 8>;
    const std::array<Vec2, 4> x = {st.up, st.down, st.right, st.left};
    const double a2 = a * a;
    const double b2 = b * b;

    // shared cross terms over the four (vertical, horizontal) pairs
    double c_val = 0.0;
    Vec8 c_grad = Vec8::Zero();
    Mat8 c_hess = Mat8::Zero();
    for (int v = 0; v < 2; ++v) {
        for (int h = 2; h < 4; ++h) {
            const double d = x[v].dot(x[h]);
            c_val += d * d;
            c_grad.segment<2>(2 * v) += 2.0 * d * x[h];
            c_grad.segment<2>(2 * h) += 2.0 * d * x[v];
            c_hess.block<2, 2>(2 * v, 2 * v) += 2.0 * x[h] * x[h].transpose();
            c_hess.block<2, 2>(2 * h, 2 * h) += 2.0 * x[v] * x[v].transpose();
            const Mat2 off = 2.0 * (x[h] * x[v].transpose() + d * Mat2::Identity());
            c_hess.block<2, 2>(2 * v, 2 * h) += off;
            c_hess.block<2, 2>(2 * h, 2 * v) += off.transpose();
        }
    }

    // square terms: vertical bonds target tv, horizontal bonds target th
    auto bracket = [&](double tv, double th, double& val, Vec8& g, Mat8& H) {
        val = c_val;
        g = c_grad;
        H = c_hess;
        for (int k = 0; k < 4; ++k) {
            const double target = k < 2 ? tv : th;
            const double r = x[k].squaredNorm() - target;
            val += r * r;
            g.segment<2>(2 * k) += 4.0 * r * x[k];
            H.block<2, 2>(2 * k, 2 * k) += 4.0 * r * Mat2::Identity() + 8.0 * x[k] * x[k].transpose();
        }
    };

    double v1 = 0.0, v2 = 0.0;
    Vec8 g1, g2;
    Mat8 H1, H2;
    bracket(a2, b2, v1, g1, H1);
    bracket(b2, a2, v2, g2, H2);

    DensityJet jet;
    jet.value = v1 * v2;
    jet.gradient = v2 * g1 + v1 * g2;
    jet.hessian = v2 * H1 + v1 * H2 + g1 * g2.transpose() + g2 * g1.transpose();
    return jet;
}

}  // namespace twinlat
