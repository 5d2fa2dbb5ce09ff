#include <doctest.h>

#include <cmath>

#include "linalg.hpp"
#include "test_util.hpp"

using namespace qot;

namespace {
const double kInv = 1.0 / std::sqrt(2.0);
}

TEST_SUITE("linalg") {

    TEST_CASE("tensor of basis kets is basis bookkeeping") {
        const Vec v = tensor(Vec::basis(2, 0), Vec::basis(2, 1));
        CHECK(v.dim() == 4);
        CHECK(v[0] == cplx{0, 0});
        CHECK(v[1] == cplx{1, 0});
        CHECK(v[2] == cplx{0, 0});
        CHECK(v[3] == cplx{0, 0});
    }

    TEST_CASE("tensor of identities is the identity") {
        const Mat i4 = tensor(Mat::identity(2), Mat::identity(2));
        CHECK(max_abs_diff(i4, Mat::identity(4)) == 0.0);
    }

    TEST_CASE("tensor of plus states is uniform") {
        Vec plus(2);
        plus[0] = plus[1] = cplx{kInv, 0};
        const Vec v = tensor(plus, plus);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(v[i] - cplx{0.5, 0}) < 1e-15);
        }
    }

    TEST_CASE("kronecker is associative in layout") {
        // Exact for integer-amplitude inputs.
        Vec a{cplx{1, 0}, cplx{0, 0}};
        Vec b{cplx{0, 0}, cplx{1, 0}, cplx{0, 0}};
        Vec c{cplx{1, 0}, cplx{-1, 0}};
        const Vec left = tensor(tensor(a, b), c);
        const Vec right = tensor(a, tensor(b, c));
        REQUIRE(left.dim() == right.dim());
        for (std::size_t i = 0; i < left.dim(); ++i) {
            CHECK(left[i] == right[i]);
        }

        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec x = test::random_state(rng, 2);
            const Vec y = test::random_state(rng, 3);
            const Vec z = test::random_state(rng, 4);
            const Vec l = tensor(tensor(x, y), z);
            const Vec r = tensor(x, tensor(y, z));
            CHECK(test::vec_distance(l, r) < 1e-14);
        }
    }

    TEST_CASE("apply_unitary on basis states") {
        const Mat x = Mat::from_rows({{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}});
        const Vec flipped = apply_unitary(x, Vec::basis(2, 0));
        CHECK(std::abs(flipped[1] - cplx{1, 0}) == 0.0);

        const Mat h = Mat::from_rows({{cplx{kInv, 0}, cplx{kInv, 0}}, {cplx{kInv, 0}, cplx{-kInv, 0}}});
        const Vec plus = apply_unitary(h, Vec::basis(2, 0));
        CHECK(std::abs(plus[0] - cplx{kInv, 0}) < 1e-15);
        CHECK(std::abs(plus[1] - cplx{kInv, 0}) < 1e-15);
    }

    TEST_CASE("apply_unitary preserves norm for random inputs") {
        Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t dim = 2 + rng.below(6);
            const Mat u = test::random_unitary(rng, dim);
            const Vec s = test::random_state(rng, dim);
            const Vec out = apply_unitary(u, s);
            CHECK(std::abs(out.norm() - 1.0) < 1e-10);
        }
    }

    TEST_CASE("apply_unitary rejects bad inputs") {
        const Mat x = Mat::from_rows({{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}});
        CHECK_THROWS_AS(apply_unitary(x, Vec::basis(4, 0)), std::invalid_argument);
        Mat not_unitary(2, 2);
        not_unitary(0, 0) = cplx{2, 0};
        CHECK_THROWS_AS(apply_unitary(not_unitary, Vec::basis(2, 0)), std::invalid_argument);
    }

    TEST_CASE("partial trace of a Bell state is maximally mixed") {
        Vec bell(4);
        bell[0] = cplx{kInv, 0};
        bell[3] = cplx{kInv, 0};
        const Mat reduced = partial_trace(outer(bell, bell), {2, 2}, {1});
        Mat half = Mat::identity(2);
        half *= cplx{0.5, 0};
        CHECK(max_abs_diff(reduced, half) < 1e-15);
    }

    TEST_CASE("partial trace of a product state returns the kept factor") {
        Rng rng(3);
        const Vec a = test::random_state(rng, 3);
        const Vec b = test::random_state(rng, 4);
        const Mat rho_a = outer(a, a);
        const Mat joint = tensor(rho_a, outer(b, b));
        const Mat kept = partial_trace(joint, {3, 4}, {0});
        CHECK(max_abs_diff(kept, rho_a) < 1e-12);
    }

    TEST_CASE("partial trace validates the keep subset") {
        const Mat rho = Mat::identity(4);
        CHECK_THROWS_AS(partial_trace(rho, {2, 2}, {2}), std::invalid_argument);
        CHECK_THROWS_AS(partial_trace(rho, {2, 2}, {1, 0}), std::invalid_argument);
        CHECK_THROWS_AS(partial_trace(rho, {2, 3}, {0}), std::invalid_argument);
    }

    TEST_CASE("schmidt decomposition of a Bell state") {
        Vec bell(4);
        bell[0] = cplx{kInv, 0};
        bell[3] = cplx{kInv, 0};
        const SchmidtDecomposition sd = schmidt_decompose(bell, 2, 2);
        REQUIRE(sd.coefficients.size() == 2);
        CHECK(std::abs(sd.coefficients[0] - kInv) < 1e-12);
        CHECK(std::abs(sd.coefficients[1] - kInv) < 1e-12);
    }

    TEST_CASE("schmidt decomposition of a product state has one term") {
        Rng rng(5);
        const Vec a = test::random_state(rng, 4);
        const Vec b = test::random_state(rng, 3);
        const SchmidtDecomposition sd = schmidt_decompose(tensor(a, b), 4, 3);
        REQUIRE(sd.coefficients.size() == 1);
        CHECK(std::abs(sd.coefficients[0] - 1.0) < 1e-12);
    }

    TEST_CASE("schmidt reconstruction on random states") {
        Rng rng(13);
        const std::size_t cuts[][2] = {{2, 2}, {2, 4}, {4, 4}, {8, 8}, {4, 16}, {8, 4}};
        for (int trial = 0; trial < 1000; ++trial) {
            const auto &cut = cuts[rng.below(6)];
            const std::size_t dl = cut[0], dr = cut[1];
            const Vec s = test::random_state(rng, dl * dr);
            const SchmidtDecomposition sd = schmidt_decompose(s, dl, dr);

            double sum_sq = 0.0;
            Vec rebuilt(dl * dr);
            for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
                sum_sq += sd.coefficients[k] * sd.coefficients[k];
                if (k + 1 < sd.coefficients.size()) {
                    CHECK(sd.coefficients[k] >= sd.coefficients[k + 1]);
                }
                const Vec term = tensor(sd.left[k], sd.right[k]);
                for (std::size_t i = 0; i < rebuilt.dim(); ++i) {
                    rebuilt[i] += cplx{sd.coefficients[k], 0} * term[i];
                }
            }
            CHECK(std::abs(sum_sq - 1.0) < 1e-10);
            CHECK(test::vec_distance(rebuilt, s) < 1e-9);
        }
    }

    TEST_CASE("trace distance basics") {
        Rng rng(17);
        const Vec a = test::random_state(rng, 3);
        const Mat rho = outer(a, a);
        CHECK(trace_distance(rho, rho) < 1e-14);

        const Mat zero = outer(Vec::basis(2, 0), Vec::basis(2, 0));
        const Mat one = outer(Vec::basis(2, 1), Vec::basis(2, 1));
        CHECK(std::abs(trace_distance(zero, one) - 1.0) < 1e-12);

        Mat half = Mat::identity(2);
        half *= cplx{0.5, 0};
        CHECK(std::abs(trace_distance(half, zero) - 0.5) < 1e-12);
    }

    TEST_CASE("hermitian eigensystem diagonalizes random matrices") {
        Rng rng(19);
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t dim = 2 + rng.below(7);
            Mat h(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = i; j < dim; ++j) {
                    const cplx z{2.0 * rng.uniform() - 1.0, i == j ? 0.0 : 2.0 * rng.uniform() - 1.0};
                    h(i, j) = z;
                    h(j, i) = std::conj(z);
                }
            }
            const EigenSystem es = hermitian_eigensystem(h);
            for (std::size_t k = 0; k < dim; ++k) {
                Vec v(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    v[i] = es.vectors(i, k);
                }
                const Vec hv = mul(h, v);
                double residual = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    residual += std::norm(hv[i] - cplx{es.values[k], 0} * v[i]);
                }
                CHECK(std::sqrt(residual) < 1e-10);
                CHECK(std::abs(v.norm() - 1.0) < 1e-10);
            }
            for (std::size_t k = 1; k < dim; ++k) {
                CHECK(es.values[k - 1] >= es.values[k]);
            }
        }
    }

    TEST_CASE("density checks") {
        Mat half = Mat::identity(2);
        half *= cplx{0.5, 0};
        CHECK(is_density(half));
        Mat neg = Mat::from_rows({{cplx{1.5, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{-0.5, 0}}});
        CHECK_FALSE(is_density(neg));
    }
}
