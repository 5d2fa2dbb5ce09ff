#include <doctest.h>

#include <cmath>

#include "lo.hpp"
#include "test_util.hpp"

using namespace qot;

namespace {

// Independent reduction oracle: plain index summation over the traced
// factor, no shared code with partial_trace.
Mat brute_force_bob_reduction(const Vec &joint, std::size_t alice_dim, std::size_t bob_dim) {
    Mat rho(bob_dim, bob_dim);
    for (std::size_t y = 0; y < bob_dim; ++y) {
        for (std::size_t yp = 0; yp < bob_dim; ++yp) {
            cplx s{0, 0};
            for (std::size_t x = 0; x < alice_dim; ++x) {
                s += joint[x * bob_dim + y] * std::conj(joint[x * bob_dim + yp]);
            }
            rho(y, yp) = s;
        }
    }
    return rho;
}

} // namespace

TEST_SUITE("lo") {

    TEST_CASE("the box computes the selected message deterministically") {
        const IdealProtocolModel model = build_ideal_ot();
        CHECK(model.f(2, 0) == 1); // i = (m0, m1) = (1, 0)
        CHECK(model.f(2, 1) == 0);
        CHECK(is_unitary(model.u, 1e-12));
        for (std::size_t i = 0; i < 4; ++i) {
            for (int j = 0; j < 2; ++j) {
                const Vec fin = model.run(i, j);
                // Output register marginal concentrated on m_j.
                double weight = 0.0;
                const std::size_t out_stride = model.mirror_dim;
                for (std::size_t x = 0; x < fin.dim(); ++x) {
                    if ((x / out_stride) % model.bob_output_dim ==
                        static_cast<std::size_t>(model.f(i, j))) {
                        weight += std::norm(fin[x]);
                    }
                }
                CHECK(weight == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("classical-input runs leak nothing to the sender") {
        const IdealProtocolModel model = build_ideal_ot();
        for (std::size_t i = 0; i < 4; ++i) {
            const Vec f0 = model.run(i, 0);
            const Vec f1 = model.run(i, 1);
            const Mat a0 = partial_trace(outer(f0, f0), {model.alice_dim, model.bob_dim()}, {0});
            const Mat a1 = partial_trace(outer(f1, f1), {model.alice_dim, model.bob_dim()}, {0});
            CHECK(trace_distance(a0, a1) < 1e-12);
        }
    }

    TEST_CASE("receiver reduction matches the index-summation oracle") {
        const IdealProtocolModel model = build_ideal_ot();
        for (std::size_t i = 0; i < 4; ++i) {
            for (int j = 0; j < 2; ++j) {
                const Vec fin = model.run(i, j);
                const Mat via_partial_trace = model.bob_state(i, j);
                const Mat via_oracle =
                    brute_force_bob_reduction(fin, model.alice_dim, model.bob_dim());
                CHECK(max_abs_diff(via_partial_trace, via_oracle) < 1e-12);
            }
        }
    }

    TEST_CASE("purified sender reductions are input-independent") {
        const IdealProtocolModel model = build_ideal_ot();
        CHECK(trace_distance(model.alice_purified_state(0), model.alice_purified_state(1)) <
              1e-10);
    }

    TEST_CASE("purified runs share their schmidt spectrum") {
        const IdealProtocolModel model = build_ideal_ot();
        const std::size_t left = model.alice_dim * model.alice_dim;
        const SchmidtDecomposition s0 =
            schmidt_decompose(model.run_purified(0), left, model.bob_dim());
        const SchmidtDecomposition s1 =
            schmidt_decompose(model.run_purified(1), left, model.bob_dim());
        REQUIRE(s0.coefficients.size() == s1.coefficients.size());
        for (std::size_t k = 0; k < s0.coefficients.size(); ++k) {
            CHECK(std::abs(s0.coefficients[k] - s1.coefficients[k]) < 1e-9);
        }
    }

    TEST_CASE("switch unitary rotates the purified state and every classical reduction") {
        const IdealProtocolModel model = build_ideal_ot();
        const SwitchUnitary sw = construct_switch_unitary(model, 0, 1);
        CHECK(is_unitary(sw.u, 1e-10));
        const SwitchVerification ver = verify_switch(model, sw);
        CHECK(ver.purified_map_error < 1e-9);
        CHECK(ver.max_trace_distance < 1e-9);
        REQUIRE(ver.per_input.size() == 4);

        // Averaging over inputs changes nothing: conjugation is linear.
        Mat avg1(model.bob_dim(), model.bob_dim());
        Mat avg2(model.bob_dim(), model.bob_dim());
        for (std::size_t i = 0; i < 4; ++i) {
            avg1 += mul(mul(sw.u, model.bob_state(i, 0)), sw.u.adjoint());
            avg2 += model.bob_state(i, 1);
        }
        avg1 *= cplx{0.25, 0};
        avg2 *= cplx{0.25, 0};
        CHECK(trace_distance(avg1, avg2) < 1e-9);
    }

    TEST_CASE("trivial switch: equal inputs give the identity on the support") {
        const IdealProtocolModel model = build_ideal_ot();
        const SwitchUnitary sw = construct_switch_unitary(model, 0, 0);
        const SwitchVerification ver = verify_switch(model, sw);
        CHECK(ver.purified_map_error < 1e-10);
        CHECK(ver.max_trace_distance < 1e-10);
    }

    TEST_CASE("the output-only box is rejected as non-concealing") {
        const IdealProtocolModel leaky = build_nonconcealing_ot();
        CHECK(trace_distance(leaky.alice_purified_state(0), leaky.alice_purified_state(1)) >
              1e-3);
        CHECK_THROWS_AS(construct_switch_unitary(leaky, 0, 1), NotConcealing);
    }

    TEST_CASE("a random box is rejected as non-concealing") {
        Rng rng(57);
        IdealProtocolModel model = build_ideal_ot();
        model.u = test::random_unitary(rng, model.total_dim());
        CHECK_THROWS_AS(construct_switch_unitary(model, 0, 1), NotConcealing);
    }

    TEST_CASE("double extraction reads both messages exactly") {
        const IdealProtocolModel model = build_ideal_ot();
        const SwitchUnitary sw = construct_switch_unitary(model, 0, 1);
        for (int trial = 0; trial < 100; ++trial) {
            for (std::size_t i = 0; i < 4; ++i) {
                const std::array<int, 2> got = double_extraction(model, i, sw);
                CHECK(got[0] == model.f(i, 0));
                CHECK(got[1] == model.f(i, 1));
            }
        }
    }

    TEST_CASE("announcement dependence shows up whenever the subset parities differ") {
        ProtocolConfig config;
        config.variant = Variant::OneOfTwo;
        const DependenceReport report = bcqot_dependence_check(config, 800, 4242);
        CHECK(report.sessions == 800);
        CHECK(report.parity_diff_sessions > 300); // about half
        CHECK(report.nonconstant_records == report.parity_diff_sessions);
        // Receiver-only strategies stay far from joint extraction.
        CHECK(report.entangling_joint_rate > 0.40);
        CHECK(report.entangling_joint_rate < 0.53);
        CHECK(report.honest_joint_rate > 0.44);
        CHECK(report.honest_joint_rate < 0.56);
        const std::string text = report.to_text();
        CHECK(text.find("nonconstant_records=") != std::string::npos);
    }

    TEST_CASE("dependence check rejects the wrong variant") {
        ProtocolConfig config;
        config.variant = Variant::AoN;
        CHECK_THROWS_AS(bcqot_dependence_check(config, 10, 1), std::invalid_argument);
    }
}
