#pragma once

#include <cmath>

#include "linalg.hpp"
#include "rng.hpp"

namespace qot::test {

inline Vec random_state(Rng &rng, std::size_t dim) {
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        // Box-Muller pairs give a rotation-invariant draw.
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
        v[i] = cplx{r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }
    v.normalize();
    return v;
}

inline Mat random_unitary(Rng &rng, std::size_t dim) {
    // Gram-Schmidt on Gaussian columns.
    std::vector<Vec> cols;
    while (cols.size() < dim) {
        Vec v = random_state(rng, dim);
        for (const Vec &b : cols) {
            const cplx c = inner(b, v);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] -= c * b[i];
            }
        }
        const double n = v.norm();
        if (n > 1e-6) {
            v *= cplx{1.0 / n, 0.0};
            cols.push_back(std::move(v));
        }
    }
    Mat u(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            u(r, c) = cols[c][r];
        }
    }
    return u;
}

inline double vec_distance(const Vec &a, const Vec &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::norm(a[i] - b[i]);
    }
    return std::sqrt(s);
}

} // namespace qot::test
