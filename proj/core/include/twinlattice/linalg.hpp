#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace twinlat {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Mat2 rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

// 90 degree rotation, d/dtheta R(theta) = J R(theta)
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

inline double cross(const Vec2& x, const Vec2& y) { return x.x() * y.y() - x.y() * y.x(); }

// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace twinlat
