#include "twinlattice/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twinlat {

BandedSymmetricMatrix::BandedSymmetricMatrix(std::size_t size, std::size_t half_bandwidth)
    : n_(size), w_(half_bandwidth), data_(size * (half_bandwidth + 1), 0.0) {}

double BandedSymmetricMatrix::operator()(std::size_t r, std::size_t c) const {
    if (c > r) std::swap(r, c);
    if (r >= n_) throw std::out_of_range("BandedSymmetricMatrix: index out of range");
    if (r - c > w_) return 0.0;
    return data_[r * (w_ + 1) + (c + w_ - r)];
}

void BandedSymmetricMatrix::add(std::size_t r, std::size_t c, double v) {
    if (c > r) std::swap(r, c);
    if (r >= n_ || r - c > w_) throw std::out_of_range("BandedSymmetricMatrix: entry outside band");
    data_[r * (w_ + 1) + (c + w_ - r)] += v;
}

void BandedSymmetricMatrix::add_diagonal(double shift) {
    for (std::size_t r = 0; r < n_; ++r) data_[r * (w_ + 1) + w_] += shift;
}

std::vector<double> BandedSymmetricMatrix::multiply(const std::vector<double>& x) const {
    if (x.size() != n_) throw std::invalid_argument("BandedSymmetricMatrix: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        const std::size_t c0 = r > w_ ? r - w_ : 0;
        for (std::size_t c = c0; c < r; ++c) {
            const double v = data_[r * (w_ + 1) + (c + w_ - r)];
            y[r] += v * x[c];
            y[c] += v * x[r];
        }
        y[r] += data_[r * (w_ + 1) + w_] * x[r];
    }
    return y;
}

double BandedSymmetricMatrix::min_diagonal() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n_; ++r) m = std::min(m, data_[r * (w_ + 1) + w_]);
    return m;
}

bool BandedCholesky::factor(const BandedSymmetricMatrix& m) {
    l_ = m;
    ok_ = false;
    const std::size_t n = l_.n_;
    const std::size_t w = l_.w_;
    auto L = [&](std::size_t r, std::size_t c) -> double& { return l_.data_[r * (w + 1) + (c + w - r)]; };
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c0 = r > w ? r - w : 0;
        for (std::size_t c = c0; c <= r; ++c) {
            double s = L(r, c);
            const std::size_t k0 = std::max(c0, c > w ? c - w : 0);
            for (std::size_t k = k0; k < c; ++k) s -= L(r, k) * L(c, k);
            if (c == r) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                L(r, r) = std::sqrt(s);
            } else {
                L(r, c) = s / L(c, c);
            }
        }
    }
    ok_ = true;
    return true;
}

std::vector<double> BandedCholesky::solve(const std::vector<double>& rhs) const {
    if (!ok_) throw std::logic_error("BandedCholesky: no valid factorization");
    const std::size_t n = l_.n_;
    const std::size_t w = l_.w_;
    if (rhs.size() != n) throw std::invalid_argument("BandedCholesky: size mismatch");
    auto L = [&](std::size_t r, std::size_t c) { return l_.data_[r * (w + 1) + (c + w - r)]; };
    std::vector<double> y(rhs);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c0 = r > w ? r - w : 0;
        for (std::size_t c = c0; c < r; ++c) y[r] -= L(r, c) * y[c];
        y[r] /= L(r, r);
    }
    for (std::size_t r = n; r-- > 0;) {
        const std::size_t end = std::min(n - 1, r + w);
        for (std::size_t c = r + 1; c <= end; ++c) y[r] -= L(c, r) * y[c];
        y[r] /= L(r, r);
    }
    return y;
}

}  // namespace twinlat
