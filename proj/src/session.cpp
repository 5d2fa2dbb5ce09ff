#include <optional>

#include "adversary.hpp"
#include "protocol.hpp"

namespace qot {

namespace {

/// The lying unveiler measures honestly but commits the negated result
/// bit, so the vault's unveil contradicts the sender's record whenever
/// bases matched. Binding makes lying at unveil time impossible, so the
/// lie has to happen at commit time.
BobHonestState bob_lying_measure_and_commit(const ProtocolConfig &config, const QubitBatch &batch,
                                            BranchedState &state, CommitmentVault &vault,
                                            Rng &rng) {
    BobHonestState bob = bob_honest_measure_and_commit(config, batch, state, vault, rng);
    // Replace the value commitments with flipped bits. The honest ones
    // above were already vaulted; commit fresh registers and swap ids.
    for (std::size_t i = 0; i < config.n; ++i) {
        const RegisterId flipped =
            state.add_register("ch_flip[" + std::to_string(i) + "]",
                               Vec::basis(2, static_cast<std::size_t>(1 - bob.result[i])));
        bob.commitments[i][1] = vault.commit(state, flipped, config.bc_mode, rng);
    }
    return bob;
}

} // namespace

std::uint64_t session_seed_for(std::uint64_t master_seed, std::uint64_t session_index,
                               std::uint64_t attempt) {
    return mix_seed(mix_seed(master_seed, session_index), attempt);
}

SessionResult run_session_with_retry(const ProtocolConfig &config, BobStrategy strategy,
                                     std::uint64_t master_seed, std::uint64_t session_index,
                                     int cheat_target, std::size_t *retries) {
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        try {
            return run_session(config, strategy, session_seed_for(master_seed, session_index, attempt),
                               cheat_target);
        } catch (const InfeasibleSession &) {
            if (retries != nullptr) {
                ++*retries;
            }
        }
    }
    throw InfeasibleSession("session remained infeasible after 64 retries");
}

SessionResult run_session(const ProtocolConfig &config, BobStrategy strategy,
                          std::uint64_t session_seed, int cheat_target, StateObserver *observer) {
    config.validate();
    Rng rng(session_seed);
    BranchedState state(config.branch_cap, config.dense_cap);
    state.set_observer(observer);
    CommitmentVault vault;

    SessionResult res;
    res.variant = config.variant;

    QubitBatch batch;
    AliceState alice = alice_prepare(config, state, rng, batch);
    res.transcript.push(batch);
    res.alice_bit = alice.b;
    res.alice_pair = alice.pair;
    res.alice_basis = alice.a;
    res.alice_key = alice.g;

    BobHonestState honest_bob;
    std::optional<EntanglingBob> cheat;
    if (strategy == BobStrategy::Entangling) {
        cheat.emplace(config, state, vault, rng);
        res.transcript.push(cheat->receive_and_commit(batch));
    } else if (strategy == BobStrategy::LyingUnveiler) {
        honest_bob = bob_lying_measure_and_commit(config, batch, state, vault, rng);
        res.transcript.push(CommitBatch{honest_bob.commitments});
    } else {
        honest_bob = bob_honest_measure_and_commit(config, batch, state, vault, rng);
        res.transcript.push(CommitBatch{honest_bob.commitments});
    }

    const TestRequest request = alice_pick_test_set(alice, config, rng);
    res.transcript.push(request);
    const TestUnveil unveil = cheat ? cheat->unveil_for_test(request)
                                    : bob_unveil_for_test(honest_bob, request, state, vault, rng);
    res.transcript.push(unveil);

    if (!alice_test(alice, request, unveil)) {
        res.transcript.push(AbortMessage{});
        res.aborted = true;
        return res;
    }

    const BasesAnnounce bases = alice_announce_bases(alice);
    res.transcript.push(bases);
    const SubsetsAnnounce subsets =
        cheat ? cheat->partition(bases) : bob_partition_honest(honest_bob, bases, config, rng);
    if (!cheat) {
        res.honest_ordering_bit = honest_bob.j0 == honest_bob.i0 ? 0 : 1;
    }
    res.transcript.push(subsets);

    const Message final_msg = alice_final(alice, subsets, config, rng);
    res.transcript.push(final_msg);

    if (cheat) {
        if (config.variant == Variant::AoN) {
            const EntanglingBob::Decode d = cheat->decode_aon(std::get<FinalAoN>(final_msg));
            res.bob_output = d.guess;
            res.p_correct = d.p_correct;
            res.match = d.guess == alice.b;
            if (d.eff.has_value()) {
                res.eff_good_amp = d.eff->good_amplitude;
                res.eff_fail_amp = d.eff->fail_amplitude;
            }
        } else {
            const EntanglingBob::Decode d =
                cheat->decode_one_of_two(std::get<Final12>(final_msg), cheat_target);
            res.obtained_index = cheat_target;
            res.bob_output = d.guess;
            res.p_correct = d.p_correct;
            if (d.eff.has_value()) {
                res.eff_good_amp = d.eff->good_amplitude;
                res.eff_fail_amp = d.eff->fail_amplitude;
            }
            res.match = d.guess == alice.pair[static_cast<std::size_t>(cheat_target)];
            res.untargeted_guess = d.untargeted_guess;
            res.untargeted_match =
                d.untargeted_guess == alice.pair[static_cast<std::size_t>(1 - cheat_target)];
        }
    } else {
        const HonestDecode d = bob_decode_honest(honest_bob, final_msg, rng);
        if (config.variant == Variant::AoN) {
            res.bob_got = d.got;
            res.bob_output = d.output;
            res.match = d.output == alice.b;
            res.p_correct = d.got ? 1.0 : 0.5;
        } else {
            res.bob_got = d.got;
            res.obtained_index = d.obtained_index;
            res.bob_output = d.output;
            res.match = d.output == alice.pair[static_cast<std::size_t>(d.obtained_index)];
            res.untargeted_guess = d.untargeted_guess;
            res.untargeted_match =
                d.untargeted_guess == alice.pair[static_cast<std::size_t>(1 - d.obtained_index)];
            res.p_correct = 1.0;
        }
    }
    return res;
}

} // namespace qot
