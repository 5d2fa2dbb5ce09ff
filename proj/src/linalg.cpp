#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace qot {

Vec Vec::basis(std::size_t dim, std::size_t k) {
    if (k >= dim) {
        throw std::invalid_argument("basis index out of range");
    }
    Vec v(dim);
    v[k] = cplx{1.0, 0.0};
    return v;
}

double Vec::norm_sq() const {
    double s = 0.0;
    for (const cplx &z : a_) {
        s += std::norm(z);
    }
    return s;
}

double Vec::norm() const { return std::sqrt(norm_sq()); }

void Vec::normalize() {
    const double n = norm();
    if (n <= 0.0) {
        throw std::invalid_argument("cannot normalize a zero vector");
    }
    for (cplx &z : a_) {
        z /= n;
    }
}

bool Vec::is_normalized(double tol) const { return std::abs(norm_sq() - 1.0) < tol; }

Vec &Vec::operator*=(cplx scale) {
    for (cplx &z : a_) {
        z *= scale;
    }
    return *this;
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = cplx{1.0, 0.0};
    }
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Mat m(r, c);
    std::size_t i = 0;
    for (const auto &row : rows) {
        if (row.size() != c) {
            throw std::invalid_argument("ragged matrix literal");
        }
        std::size_t j = 0;
        for (const cplx &z : row) {
            m(i, j++) = z;
        }
        ++i;
    }
    return m;
}

Mat Mat::adjoint() const {
    Mat out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

cplx Mat::trace() const {
    if (rows_ != cols_) {
        throw std::invalid_argument("trace of a non-square matrix");
    }
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

Mat &Mat::operator+=(const Mat &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] += other.m_[i];
    }
    return *this;
}

Mat &Mat::operator-=(const Mat &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] -= other.m_[i];
    }
    return *this;
}

Mat &Mat::operator*=(cplx scale) {
    for (cplx &z : m_) {
        z *= scale;
    }
    return *this;
}

Mat operator+(Mat lhs, const Mat &rhs) {
    lhs += rhs;
    return lhs;
}

Mat operator-(Mat lhs, const Mat &rhs) {
    lhs -= rhs;
    return lhs;
}

Mat operator*(cplx scale, Mat m) {
    m *= scale;
    return m;
}

Mat mul(const Mat &a, const Mat &b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix product shape mismatch");
    }
    Mat out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Vec mul(const Mat &a, const Vec &v) {
    if (a.cols() != v.dim()) {
        throw std::invalid_argument("matrix-vector shape mismatch");
    }
    Vec out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s{0.0, 0.0};
        for (std::size_t j = 0; j < a.cols(); ++j) {
            s += a(i, j) * v[j];
        }
        out[i] = s;
    }
    return out;
}

cplx inner(const Vec &a, const Vec &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner product dimension mismatch");
    }
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

Mat outer(const Vec &a, const Vec &b) {
    Mat out(a.dim(), b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return out;
}

Vec tensor(const Vec &a, const Vec &b) {
    Vec out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return out;
}

Mat tensor(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

double max_abs(const Mat &m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            best = std::max(best, std::abs(m(i, j)));
        }
    }
    return best;
}

double max_abs_diff(const Mat &a, const Mat &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            best = std::max(best, std::abs(a(i, j) - b(i, j)));
        }
    }
    return best;
}

bool is_unitary(const Mat &u, double tol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return max_abs_diff(mul(u.adjoint(), u), Mat::identity(u.rows())) < tol;
}

bool is_hermitian(const Mat &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return max_abs_diff(m, m.adjoint()) < tol;
}

bool is_density(const Mat &rho, double tol) {
    if (!is_hermitian(rho, tol)) {
        return false;
    }
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > tol) {
        return false;
    }
    const EigenSystem es = hermitian_eigensystem(rho);
    for (double v : es.values) {
        if (v < -tol) {
            return false;
        }
    }
    return true;
}

Vec apply_unitary(const Mat &u, const Vec &s) {
    if (u.rows() != s.dim() || u.cols() != s.dim()) {
        throw std::invalid_argument("apply_unitary: dimension mismatch");
    }
    if (!is_unitary(u)) {
        throw std::invalid_argument("apply_unitary: matrix is not unitary");
    }
    return mul(u, s);
}

namespace {

std::size_t product(const std::vector<std::size_t> &dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
}

// Mixed-radix strides, left-factor-major: the first factor has the
// largest stride.
std::vector<std::size_t> strides_of(const std::vector<std::size_t> &dims) {
    std::vector<std::size_t> st(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        st[i - 1] = st[i] * dims[i];
    }
    return st;
}

} // namespace

Mat partial_trace(const Mat &rho, const std::vector<std::size_t> &dims,
                  const std::vector<std::size_t> &keep) {
    const std::size_t total = product(dims);
    if (rho.rows() != total || rho.cols() != total) {
        throw std::invalid_argument("partial_trace: dims do not factor the operator");
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t f : keep) {
        if (f >= dims.size() || kept[f]) {
            throw std::invalid_argument("partial_trace: invalid keep subset");
        }
        kept[f] = true;
    }
    if (!std::is_sorted(keep.begin(), keep.end())) {
        throw std::invalid_argument("partial_trace: keep subset must be ascending");
    }

    std::vector<std::size_t> traced;
    for (std::size_t f = 0; f < dims.size(); ++f) {
        if (!kept[f]) {
            traced.push_back(f);
        }
    }

    const std::vector<std::size_t> st = strides_of(dims);
    std::size_t keep_dim = 1;
    for (std::size_t f : keep) {
        keep_dim *= dims[f];
    }
    std::size_t traced_dim = 1;
    for (std::size_t f : traced) {
        traced_dim *= dims[f];
    }

    // Flat offset of a mixed-radix assignment over the given factors.
    auto offset = [&](const std::vector<std::size_t> &factors, std::size_t flat) {
        std::size_t off = 0;
        for (std::size_t q = factors.size(); q-- > 0;) {
            const std::size_t f = factors[q];
            off += (flat % dims[f]) * st[f];
            flat /= dims[f];
        }
        return off;
    };

    Mat out(keep_dim, keep_dim);
    for (std::size_t r = 0; r < keep_dim; ++r) {
        const std::size_t roff = offset(keep, r);
        for (std::size_t c = 0; c < keep_dim; ++c) {
            const std::size_t coff = offset(keep, c);
            cplx s{0.0, 0.0};
            for (std::size_t t = 0; t < traced_dim; ++t) {
                const std::size_t toff = offset(traced, t);
                s += rho(roff + toff, coff + toff);
            }
            out(r, c) = s;
        }
    }
    return out;
}

namespace {

// One cyclic Jacobi pass helper: diagonalizes the 2x2 Hermitian block
// (p, q) exactly and applies the rotation to the full matrix and the
// accumulated eigenvector matrix.
void jacobi_rotate(Mat &a, Mat &v, std::size_t p, std::size_t q) {
    const cplx apq = a(p, q);
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double delta = 0.5 * (app - aqq);
    const double r = std::sqrt(delta * delta + std::norm(apq));
    if (r == 0.0) {
        return;
    }
    // Eigenvector for the eigenvalue nearest app: keeps the rotation
    // angle small (at most 45 degrees), which drives the convergence of
    // the cyclic sweeps. lambda - app is computed in the cancellation-
    // free form |apq|^2 / (r + |delta|); the naive r - delta loses all
    // precision once |apq| drops near sqrt(eps) and the garbage angles
    // stall the iteration.
    const double lambda_minus_app =
        (delta >= 0.0 ? 1.0 : -1.0) * std::norm(apq) / (r + std::abs(delta));

    cplx v1 = apq;
    cplx v2 = cplx{lambda_minus_app, 0.0};
    const double nrm = std::sqrt(std::norm(v1) + std::norm(v2));
    v1 /= nrm;
    v2 /= nrm;

    // Columns of the 2x2 rotation: (v1, v2) and (-conj(v2), conj(v1)).
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) { // rows update: U2† from the left
        const cplx xp = a(p, j);
        const cplx xq = a(q, j);
        a(p, j) = std::conj(v1) * xp + std::conj(v2) * xq;
        a(q, j) = -v2 * xp + v1 * xq;
    }
    for (std::size_t i = 0; i < n; ++i) { // columns update: U2 from the right
        const cplx xp = a(i, p);
        const cplx xq = a(i, q);
        a(i, p) = xp * v1 + xq * v2;
        a(i, q) = xp * (-std::conj(v2)) + xq * std::conj(v1);
        const cplx wp = v(i, p);
        const cplx wq = v(i, q);
        v(i, p) = wp * v1 + wq * v2;
        v(i, q) = wp * (-std::conj(v2)) + wq * std::conj(v1);
    }
}

double off_diagonal_norm(const Mat &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

} // namespace

EigenSystem hermitian_eigensystem(const Mat &h) {
    if (!is_hermitian(h, 1e-8)) {
        throw std::invalid_argument("hermitian_eigensystem: matrix is not Hermitian");
    }
    const std::size_t n = h.rows();
    Mat a = h;
    Mat v = Mat::identity(n);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(a(i, i).real()));
    }
    scale = std::max(scale, off_diagonal_norm(a));
    const double stop = std::max(scale, 1.0) * 1e-14;

    const int max_sweeps = 200;
    int sweep = 0;
    while (off_diagonal_norm(a) > stop && sweep < max_sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double small =
                    1e-18 * (std::abs(a(p, p).real()) + std::abs(a(q, q).real()) + 1.0);
                if (std::abs(a(p, q)) <= small) {
                    a(p, q) = cplx{0.0, 0.0};
                    a(q, p) = cplx{0.0, 0.0};
                } else {
                    jacobi_rotate(a, v, p, q);
                }
            }
        }
        ++sweep;
    }
    if (sweep >= max_sweeps) {
        throw std::runtime_error("hermitian_eigensystem: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = a(i, i).real();
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

SchmidtDecomposition schmidt_decompose(const Vec &s, std::size_t left_dim,
                                       std::size_t right_dim) {
    if (left_dim * right_dim != s.dim()) {
        throw std::invalid_argument("schmidt_decompose: cut does not factor the state");
    }
    if (!s.is_normalized(1e-8)) {
        throw std::invalid_argument("schmidt_decompose: state not normalized");
    }

    // Coefficient matrix M(i, j) = s[i * right_dim + j].
    Mat m(left_dim, right_dim);
    for (std::size_t i = 0; i < left_dim; ++i) {
        for (std::size_t j = 0; j < right_dim; ++j) {
            m(i, j) = s[i * right_dim + j];
        }
    }

    // Right singular vectors from M†M; left vectors from M v / sigma.
    const Mat gram = mul(m.adjoint(), m);
    const EigenSystem es = hermitian_eigensystem(gram);

    // Gram eigenvalues cannot resolve singular values below sqrt(eps);
    // the image norm ‖M v_k‖ can, so use it as the coefficient and to
    // separate true terms from null-space noise.
    SchmidtDecomposition out;
    for (std::size_t k = 0; k < right_dim; ++k) {
        Vec vk(right_dim);
        for (std::size_t j = 0; j < right_dim; ++j) {
            vk[j] = es.vectors(j, k);
        }
        Vec uk = mul(m, vk);
        const double sigma = uk.norm();
        if (sigma <= 1e-12) {
            continue;
        }
        uk *= cplx{1.0 / sigma, 0.0};
        Vec rk(right_dim);
        for (std::size_t j = 0; j < right_dim; ++j) {
            rk[j] = std::conj(vk[j]);
        }
        out.coefficients.push_back(sigma);
        out.left.push_back(std::move(uk));
        out.right.push_back(std::move(rk));
    }

    // Stable descending order by the refined coefficients.
    std::vector<std::size_t> order(out.coefficients.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return out.coefficients[x] > out.coefficients[y];
    });
    SchmidtDecomposition sorted;
    for (std::size_t k : order) {
        sorted.coefficients.push_back(out.coefficients[k]);
        sorted.left.push_back(std::move(out.left[k]));
        sorted.right.push_back(std::move(out.right[k]));
    }
    return sorted;
}

double trace_distance(const Mat &rho, const Mat &sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const EigenSystem es = hermitian_eigensystem(rho - sigma);
    double s = 0.0;
    for (double v : es.values) {
        s += std::abs(v);
    }
    return 0.5 * s;
}

double purity(const Mat &rho) {
    return mul(rho, rho).trace().real();
}

std::vector<Vec> complete_orthonormal_basis(const std::vector<Vec> &partial, std::size_t dim) {
    std::vector<Vec> basis = partial;
    for (std::size_t cand = 0; cand < dim && basis.size() < dim; ++cand) {
        Vec v = Vec::basis(dim, cand);
        for (const Vec &b : basis) {
            const cplx c = inner(b, v);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] -= c * b[i];
            }
        }
        const double n = v.norm();
        if (n > 1e-8) {
            v *= cplx{1.0 / n, 0.0};
            // Second orthogonalization pass for numerical safety.
            for (const Vec &b : basis) {
                const cplx c = inner(b, v);
                for (std::size_t i = 0; i < dim; ++i) {
                    v[i] -= c * b[i];
                }
            }
            v.normalize();
            basis.push_back(std::move(v));
        }
    }
    if (basis.size() != dim) {
        throw std::runtime_error("complete_orthonormal_basis: completion failed");
    }
    return basis;
}

std::string format_cplx(cplx z, int significant_digits) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.*g%+.*gi", significant_digits, z.real(),
                  significant_digits, z.imag());
    return std::string(buf);
}

} // namespace qot
