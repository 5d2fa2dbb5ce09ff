#include <doctest.h>

#include <cmath>

#include "adversary.hpp"
#include "test_util.hpp"

using namespace qot;

namespace {

const double kInv = 1.0 / std::sqrt(2.0);

EffectiveDecodeState standard_effective(int d) {
    EffectiveDecodeState eff;
    eff.good_value = d;
    eff.good_amplitude = kInv;
    eff.fail_amplitude = kInv;
    eff.fail_overlap = 1.0;
    eff.vec = Vec(3);
    eff.vec[static_cast<std::size_t>(d)] = cplx{kInv, 0};
    eff.vec[2] = cplx{kInv, 0};
    return eff;
}

struct CheatSession {
    ProtocolConfig config;
    BranchedState state;
    CommitmentVault vault;
    Rng rng;
    std::optional<EntanglingBob> bob;
    AliceState alice;
    Message final_msg;

    explicit CheatSession(std::uint64_t seed, BcMode mode = BcMode::NonBccc,
                          Variant variant = Variant::AoN)
        : rng(0) {
        config.n = 25;
        config.bc_mode = mode;
        config.variant = variant;
        // Redraw on the occasional infeasible subset split.
        for (std::uint64_t attempt = 0;; ++attempt) {
            REQUIRE(attempt < 32);
            try {
                rng = Rng(mix_seed(seed, attempt));
                state = BranchedState();
                vault = CommitmentVault();
                bob.emplace(config, state, vault, rng);
                QubitBatch batch;
                alice = alice_prepare(config, state, rng, batch);
                bob->receive_and_commit(batch);
                TestRequest request = alice_pick_test_set(alice, config, rng);
                const TestUnveil unveil = bob->unveil_for_test(request);
                REQUIRE(alice_test(alice, request, unveil));
                const SubsetsAnnounce subsets = bob->partition(alice_announce_bases(alice));
                final_msg = alice_final(alice, subsets, config, rng);
                return;
            } catch (const InfeasibleSession &) {
            }
        }
    }
};

} // namespace

TEST_SUITE("adversary") {

    TEST_CASE("the discrimination measurement is a valid rank-1 projective pair") {
        const PovmPair povm = discrimination_povm();
        povm.validate();
        CHECK(max_abs_diff(mul(povm.e0, povm.e0), povm.e0) < 1e-12);
        CHECK(std::abs(povm.e0.trace() - cplx{1.0, 0.0}) < 1e-12);
        CHECK(max_abs_diff(povm.e0 + povm.complement, Mat::identity(3)) == 0.0);
    }

    TEST_CASE("decode probabilities on the canonical effective states") {
        const PovmPair povm = discrimination_povm();
        const double target = 0.25 * (2.0 + std::sqrt(3.0));

        const EffectiveDecodeState e0 = standard_effective(0);
        const double p0 = inner(e0.vec, mul(povm.e0, e0.vec)).real();
        CHECK(std::abs(p0 - target) < 1e-12);

        const EffectiveDecodeState e1 = standard_effective(1);
        const double p1 = inner(e1.vec, mul(povm.complement, e1.vec)).real();
        CHECK(std::abs(p1 - target) < 1e-12);

        Vec fail_only(3);
        fail_only[2] = cplx{1, 0};
        const double pf = inner(fail_only, mul(povm.e0, fail_only)).real();
        CHECK(std::abs(pf - 1.0 / 3.0) < 1e-12);
    }

    TEST_CASE("analytic reliability of reference strategies") {
        const double target = 0.25 * (2.0 + std::sqrt(3.0));
        CHECK(std::abs(analytic_reliability(discrimination_povm()) - target) < 1e-12);

        PovmPair project_good;
        project_good.e0 = Mat(3, 3);
        project_good.e0(0, 0) = cplx{1, 0};
        project_good.complement = Mat::identity(3) - project_good.e0;
        CHECK(std::abs(analytic_reliability(project_good) - 0.75) < 1e-12);

        PovmPair coin;
        coin.e0 = Mat::identity(3);
        coin.e0 *= cplx{0.5, 0};
        coin.complement = Mat::identity(3) - coin.e0;
        CHECK(std::abs(analytic_reliability(coin) - 0.5) < 1e-12);
    }

    TEST_CASE("povm_decode matches its analytic rate and is label-symmetric") {
        const PovmPair povm = discrimination_povm();
        const double target = 0.25 * (2.0 + std::sqrt(3.0));
        for (int d = 0; d < 2; ++d) {
            Rng rng(mix_seed(500, static_cast<std::uint64_t>(d)));
            const EffectiveDecodeState eff = standard_effective(d);
            std::size_t correct = 0;
            const std::size_t trials = 20000;
            for (std::size_t t = 0; t < trials; ++t) {
                const PovmOutcome out = povm_decode(eff, povm, rng);
                CHECK(std::abs(out.p_correct - target) < 1e-12);
                correct += out.guess == d ? 1 : 0;
            }
            const double rate = static_cast<double>(correct) / static_cast<double>(trials);
            CHECK(rate > target - 0.01);
            CHECK(rate < target + 0.01);
        }
    }

    TEST_CASE("cheat passes the test phase and unveils consistently") {
        std::size_t matched_checked = 0, unveiled_ones = 0, unveiled_total = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            ProtocolConfig config;
            config.n = 25;
            Rng rng(mix_seed(600, seed));
            BranchedState state;
            CommitmentVault vault;
            EntanglingBob bob(config, state, vault, rng);
            QubitBatch batch;
            AliceState alice = alice_prepare(config, state, rng, batch);
            bob.receive_and_commit(batch);
            TestRequest request = alice_pick_test_set(alice, config, rng);
            const TestUnveil unveil = bob.unveil_for_test(request);
            CHECK(alice_test(alice, request, unveil));
            for (std::size_t k = 0; k < request.indices.size(); ++k) {
                const std::size_t i = request.indices[k];
                unveiled_ones += static_cast<std::size_t>(unveil.values[k][0]);
                ++unveiled_total;
                if (unveil.values[k][0] == alice.a[i]) {
                    CHECK(unveil.values[k][1] == alice.g[i]);
                    ++matched_checked;
                }
            }
        }
        CHECK(matched_checked > 800); // the matched-basis case occurred often
        const double ones_rate =
            static_cast<double>(unveiled_ones) / static_cast<double>(unveiled_total);
        CHECK(ones_rate > 0.47); // unveiled basis bits stay unbiased
        CHECK(ones_rate < 0.53);
    }

    TEST_CASE("global state stays pure through coherent commitments") {
        ProtocolConfig config;
        config.n = 2;
        config.allow_small_n = true;
        config.subset_size = 1;
        config.test_set_size = 1;
        config.dense_cap = std::size_t{1} << 12;
        Rng rng(91);
        BranchedState state(64, config.dense_cap);
        CommitmentVault vault;
        EntanglingBob bob(config, state, vault, rng);
        QubitBatch batch;
        alice_prepare(config, state, rng, batch);
        bob.receive_and_commit(batch);
        const std::vector<RegisterId> order = state.live_registers();
        const Vec dense = state.to_dense(order);
        CHECK(std::abs(dense.norm_sq() - 1.0) < 1e-10);
        CHECK(state.branch_count() == 1);
    }

    TEST_CASE("marker outcomes are unbiased") {
        std::size_t ones = 0, total = 0;
        for (std::uint64_t seed = 0; seed < 400; ++seed) {
            CheatSession s(mix_seed(650, seed));
            for (int g : s.bob->markers()) {
                if (g >= 0) {
                    ones += static_cast<std::size_t>(g);
                    ++total;
                }
            }
        }
        const double rate = static_cast<double>(ones) / static_cast<double>(total);
        CHECK(rate > 0.485);
        CHECK(rate < 0.515);
    }

    TEST_CASE("partitioning leaves the two-branch switch structure") {
        CheatSession s(700);
        CHECK(s.state.branch_count() == 2);
        const RegisterId sw = s.bob->switch_register();
        const auto v0 = s.state.branch_register_value(0, sw);
        const auto v1 = s.state.branch_register_value(1, sw);
        REQUIRE(v0.has_value());
        REQUIRE(v1.has_value());
        CHECK(*v0 + *v1 == 1);

        // Within the branch with switch value s', members of J0 carry
        // basis register equal to the announced basis xor s'.
        for (std::size_t branch = 0; branch < 2; ++branch) {
            const std::size_t sprime = *s.state.branch_register_value(branch, sw);
            for (std::size_t i : s.bob->j0()) {
                const auto b = s.state.branch_register_value(
                    branch, *s.state.find_register("B[" + std::to_string(i) + "]"));
                REQUIRE(b.has_value());
                CHECK(*b == (static_cast<std::size_t>(s.alice.a[i]) ^ sprime));
            }
        }
    }

    TEST_CASE("effective state reduces to (|d> + |?>)/sqrt(2) with d the sender's bit") {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            CheatSession s(mix_seed(800, seed));
            const auto &fin = std::get<FinalAoN>(s.final_msg);
            std::vector<RegisterId> parity_regs;
            for (std::size_t i : (fin.s == 0 ? s.bob->j0() : s.bob->j1())) {
                parity_regs.push_back(s.bob->result_register(i));
            }
            const EffectiveDecodeState eff = build_effective_state(
                s.state, s.bob->switch_register(), parity_regs, fin.s, fin.beta);
            CHECK(eff.good_value == s.alice.b);
            CHECK(std::abs(eff.good_amplitude - kInv) < 1e-9);
            CHECK(std::abs(eff.fail_amplitude - kInv) < 1e-9);
            CHECK(std::abs(eff.fail_overlap - 1.0) < 1e-10);
            CHECK(std::abs(eff.good_fail_overlap) < 1e-12);
        }
    }

    TEST_CASE("per-session decode probability never reaches certainty") {
        const double bound = 0.25 * (2.0 + std::sqrt(3.0)) + 1e-9;
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const SessionResult res = run_session_with_retry(
                ProtocolConfig{}, BobStrategy::Entangling, 900, seed);
            CHECK(res.p_correct <= bound);
            CHECK(res.p_correct < 1.0);
        }
    }

    TEST_CASE("certified vault collapses the switch register and the advantage") {
        std::size_t matches = 0;
        const std::size_t trials = 4000;
        for (std::uint64_t seed = 0; seed < trials; ++seed) {
            ProtocolConfig config;
            config.bc_mode = BcMode::Bccc;
            const SessionResult res =
                run_session_with_retry(config, BobStrategy::Entangling, 901, seed);
            CHECK((res.p_correct == 1.0 || res.p_correct == 0.5));
            matches += res.match ? 1 : 0;
        }
        const double rate = static_cast<double>(matches) / static_cast<double>(trials);
        CHECK(rate > 0.73);
        CHECK(rate < 0.77);
    }

    TEST_CASE("one-of-two decode targets exactly one secret per session") {
        CheatSession s(1000, BcMode::NonBccc, Variant::OneOfTwo);
        const auto &fin = std::get<Final12>(s.final_msg);
        const EntanglingBob::Decode d = s.bob->decode_one_of_two(fin, 0);
        CHECK(d.untargeted_guess >= 0);
        CHECK_THROWS_AS(s.bob->decode_one_of_two(fin, 1), std::logic_error);
    }

    TEST_CASE("cheat report serializes one stable json line") {
        CheatReport report;
        report.session = 3;
        report.amp_good = kInv;
        report.amp_fail = kInv;
        report.p_correct = 0.25 * (2.0 + std::sqrt(3.0));
        report.guess = 1;
        report.truth = 1;
        report.match = true;
        CHECK(report.to_json_line() ==
              "{\"session\":3,\"amp_good\":0.707106781,\"amp_fail\":0.707106781,"
              "\"p_correct\":0.933012702,\"guess\":1,\"truth\":1,\"match\":true}");
    }
}
