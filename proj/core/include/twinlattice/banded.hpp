#pragma once

#include <cstddef>
#include <vector>

namespace twinlat {

// Symmetric matrix with half-bandwidth w, lower band stored row by row:
// entry (r, c) with r - w <= c <= r lives at data[r * (w + 1) + (c - r + w)].
class BandedSymmetricMatrix {
public:
    BandedSymmetricMatrix() = default;
    BandedSymmetricMatrix(std::size_t size, std::size_t half_bandwidth);

    std::size_t size() const { return n_; }
    std::size_t half_bandwidth() const { return w_; }

    // (r, c) in either triangle; zero outside the band
    double operator()(std::size_t r, std::size_t c) const;
    // adds v to (r, c) and, implicitly, (c, r); |r - c| must not exceed the bandwidth
    void add(std::size_t r, std::size_t c, double v);
    void add_diagonal(double shift);

    std::vector<double> multiply(const std::vector<double>& x) const;
    double min_diagonal() const;

private:
    friend class BandedCholesky;
    std::size_t n_ = 0;
    std::size_t w_ = 0;
    std::vector<double> data_;
};

// In-place Cholesky of a banded symmetric matrix.
class BandedCholesky {
public:
    // returns false (and leaves the object unusable) if the matrix is not positive definite
    bool factor(const BandedSymmetricMatrix& m);
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    BandedSymmetricMatrix l_;
    bool ok_ = false;
};

}  // namespace twinlat
