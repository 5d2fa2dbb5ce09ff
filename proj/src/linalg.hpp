#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

// Dense complex linear algebra for small quantum systems.
//
// Kronecker convention used throughout the project: left-factor-major.
// For vectors, index(i, j) = i * dim_b + j; the left operand owns the
// most significant digit. Every module states register order against
// this convention.

namespace qot {

using cplx = std::complex<double>;

// Global tolerances: exactness checks vs. decomposition reconstructions.
inline constexpr double kExactTol = 1e-10;
inline constexpr double kDecompTol = 1e-9;

/// Complex state vector of fixed dimension.
class Vec {
  public:
    Vec() = default;
    explicit Vec(std::size_t dim) : a_(dim, cplx{0.0, 0.0}) {}
    Vec(std::initializer_list<cplx> init) : a_(init) {}

    static Vec basis(std::size_t dim, std::size_t k);

    std::size_t dim() const { return a_.size(); }
    cplx &operator[](std::size_t i) { return a_[i]; }
    const cplx &operator[](std::size_t i) const { return a_[i]; }
    const std::vector<cplx> &data() const { return a_; }
    std::vector<cplx> &data() { return a_; }

    double norm_sq() const;
    double norm() const;
    void normalize();
    bool is_normalized(double tol = kExactTol) const;

    Vec &operator*=(cplx scale);

  private:
    std::vector<cplx> a_;
};

/// Dense complex matrix, row-major.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), m_(rows * cols, cplx{0.0, 0.0}) {}

    static Mat identity(std::size_t n);
    /// Row-by-row construction, mostly for literal matrices in tests
    /// and fixed operators.
    static Mat from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cplx &operator()(std::size_t r, std::size_t c) { return m_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return m_[r * cols_ + c]; }

    Mat adjoint() const;
    cplx trace() const;
    Mat &operator+=(const Mat &other);
    Mat &operator-=(const Mat &other);
    Mat &operator*=(cplx scale);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> m_;
};

// Elementwise and product operations.
Mat operator+(Mat lhs, const Mat &rhs);
Mat operator-(Mat lhs, const Mat &rhs);
Mat operator*(cplx scale, Mat m);
Mat mul(const Mat &a, const Mat &b);
Vec mul(const Mat &a, const Vec &v);

/// Inner product ⟨a|b⟩ (conjugate-linear in the first argument).
cplx inner(const Vec &a, const Vec &b);
/// Outer product |a⟩⟨b|.
Mat outer(const Vec &a, const Vec &b);

// Kronecker products, left-factor-major.
Vec tensor(const Vec &a, const Vec &b);
Mat tensor(const Mat &a, const Mat &b);

double max_abs(const Mat &m);
double max_abs_diff(const Mat &a, const Mat &b);

bool is_unitary(const Mat &u, double tol = kExactTol);
bool is_hermitian(const Mat &m, double tol = kExactTol);
/// Density operator check: Hermitian, unit trace, eigenvalues ≥ -tol.
bool is_density(const Mat &rho, double tol = kExactTol);

/// Applies a unitary to a state. Throws on dimension mismatch or a
/// non-unitary matrix; the result norm matches the input within 1e-10.
Vec apply_unitary(const Mat &u, const Vec &s);

/// Partial trace of rho over the factors NOT listed in `keep`.
/// `dims` lists the factor dimensions left-factor-major; `keep` holds
/// ascending factor indices. The kept factors stay in their original
/// relative order.
Mat partial_trace(const Mat &rho, const std::vector<std::size_t> &dims,
                  const std::vector<std::size_t> &keep);

struct SchmidtDecomposition {
    std::vector<double> coefficients; // non-negative, descending
    std::vector<Vec> left;            // orthonormal, dim = left_dim
    std::vector<Vec> right;           // orthonormal, dim = right_dim
};

/// Schmidt decomposition across the cut left_dim × right_dim
/// (s.dim() == left_dim * right_dim). Terms with coefficient below
/// 1e-12 are dropped; ties in degenerate spectra are broken by the
/// deterministic sweep order of the underlying eigensolver.
SchmidtDecomposition schmidt_decompose(const Vec &s, std::size_t left_dim,
                                       std::size_t right_dim);

/// Trace distance ½‖ρ−σ‖₁ between two density operators.
double trace_distance(const Mat &rho, const Mat &sigma);

struct EigenSystem {
    std::vector<double> values; // descending
    Mat vectors;                // column k is the eigenvector for values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
EigenSystem hermitian_eigensystem(const Mat &h);

/// Tr(ρ²) of a density operator.
double purity(const Mat &rho);

/// Gram-Schmidt completion: extends the given orthonormal columns to a
/// full orthonormal basis of C^dim.
std::vector<Vec> complete_orthonormal_basis(const std::vector<Vec> &partial, std::size_t dim);

std::string format_cplx(cplx z, int significant_digits = 12);

} // namespace qot
