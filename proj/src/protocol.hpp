#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bc.hpp"
#include "registers.hpp"
#include "rng.hpp"

namespace qot {

enum class Variant { AoN, OneOfTwo };
enum class BobStrategy { Honest, Entangling, LyingUnveiler };

/// Thrown when a session's random draws leave too few usable indices
/// for the announced subsets. Distinct from configuration errors: the
/// caller may retry with a fresh derived seed.
class InfeasibleSession : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ProtocolConfig {
    std::size_t n = 25;
    std::size_t subset_size = 0;   // 0 → floor(0.24 n)
    std::size_t test_set_size = 0; // 0 → ceil(n / 5)
    Variant variant = Variant::AoN;
    BcMode bc_mode = BcMode::NonBccc;
    std::uint64_t seed = 0;
    std::size_t branch_cap = 64;
    std::size_t dense_cap = std::size_t{1} << 14;
    // Oracle tests compare against full dense simulations and need tiny
    // sessions; production configs keep the n >= 8 floor.
    bool allow_small_n = false;

    std::size_t subset_size_resolved() const {
        return subset_size != 0 ? subset_size : static_cast<std::size_t>(0.24 * static_cast<double>(n));
    }
    std::size_t test_set_size_resolved() const {
        return test_set_size != 0 ? test_set_size : (n + 4) / 5;
    }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Messages

struct QubitBatch {
    std::vector<RegisterId> qubits;
};
struct CommitBatch {
    std::vector<std::array<CommitmentId, 2>> pairs; // (basis, value) per index
};
struct TestRequest {
    std::vector<std::size_t> indices; // ascending
};
struct TestUnveil {
    std::vector<std::array<int, 2>> values; // (b_i, h_i) aligned with the request
};
struct AbortMessage {};
struct BasesAnnounce {
    std::vector<int> bases;
};
struct SubsetsAnnounce {
    std::vector<std::size_t> j0, j1; // ascending
};
struct FinalAoN {
    int s = 0;
    int beta = 0;
};
struct Final12 {
    int beta0 = 0;
    int beta1 = 0;
};

using Message = std::variant<QubitBatch, CommitBatch, TestRequest, TestUnveil, AbortMessage,
                             BasesAnnounce, SubsetsAnnounce, FinalAoN, Final12>;

struct SessionTranscript {
    std::vector<Message> messages;
    void push(Message m) { messages.push_back(std::move(m)); }
    std::string to_text() const;
};

// ---------------------------------------------------------------------------
// Party state

struct AliceState {
    std::vector<int> a, g; // basis and value bits per qubit
    std::vector<std::size_t> r;
    int b = 0;                       // AoN secret
    std::array<int, 2> pair{0, 0};   // one-of-two secrets
    int s = -1;                      // AoN: which subset she keyed
};

struct BobHonestState {
    std::vector<int> basis, result; // b_i and h_i
    std::vector<std::array<CommitmentId, 2>> commitments;
    std::vector<std::size_t> r;
    std::vector<std::size_t> t0, t1, i0, i1, j0, j1;
    bool got = false;
    int decoded = -1;
};

// ---------------------------------------------------------------------------
// Honest-party operations

/// Draws uniform (a_i, g_i), the secret bit(s), and emits the qubits.
AliceState alice_prepare(const ProtocolConfig &config, BranchedState &state, Rng &rng,
                         QubitBatch &batch_out);

/// Measures each qubit in a random basis and commits (b_i, h_i) as two
/// single-bit commitments.
BobHonestState bob_honest_measure_and_commit(const ProtocolConfig &config, const QubitBatch &batch,
                                             BranchedState &state, CommitmentVault &vault,
                                             Rng &rng);

TestRequest alice_pick_test_set(AliceState &alice, const ProtocolConfig &config, Rng &rng);

/// Opens the commitments at the tested indices through the vault.
TestUnveil bob_unveil_for_test(BobHonestState &bob, const TestRequest &request,
                               BranchedState &state, CommitmentVault &vault, Rng &rng);

/// Returns true when the test passes: no tested index may show the same
/// basis with a different value.
bool alice_test(const AliceState &alice, const TestRequest &request, const TestUnveil &unveil);

BasesAnnounce alice_announce_bases(const AliceState &alice);

/// Splits indices into matching/non-matching bases, samples the two
/// working subsets outside the tested set, and announces them in random
/// order. Throws InfeasibleSession when a subset cannot be filled.
SubsetsAnnounce bob_partition_honest(BobHonestState &bob, const BasesAnnounce &announce,
                                     const ProtocolConfig &config, Rng &rng);

Message alice_final(AliceState &alice, const SubsetsAnnounce &subsets,
                    const ProtocolConfig &config, Rng &rng);

struct HonestDecode {
    bool got = false;
    int decoded = -1;        // exact value when got
    int output = -1;         // decoded value or uniform guess
    int obtained_index = -1; // one-of-two: which secret was obtained
    int untargeted_guess = -1;
};

HonestDecode bob_decode_honest(BobHonestState &bob, const Message &final_msg, Rng &rng);

// ---------------------------------------------------------------------------
// Session orchestration

struct SessionResult {
    Variant variant = Variant::AoN;
    SessionTranscript transcript;
    bool aborted = false;

    int alice_bit = 0;
    std::array<int, 2> alice_pair{0, 0};
    std::vector<int> alice_basis, alice_key; // god's-eye copies of (a, g)

    bool bob_got = false;
    int bob_output = -1;
    int obtained_index = -1;
    int untargeted_guess = -1;
    int honest_ordering_bit = -1; // which way the honest receiver labeled his subsets
    bool match = false;
    bool untargeted_match = false;
    double p_correct = 0.0; // analytic decode probability, when defined
    double eff_good_amp = 0.0, eff_fail_amp = 0.0; // entangling-run branch amplitudes

    std::string to_text() const;
};

/// Runs one full session. Deterministic given the seed; throws
/// InfeasibleSession when the draws cannot fill the announced subsets.
SessionResult run_session(const ProtocolConfig &config, BobStrategy strategy,
                          std::uint64_t session_seed, int cheat_target = 0,
                          StateObserver *observer = nullptr);

/// Session seed for (master, index, attempt); attempt bumps past
/// infeasible draws.
std::uint64_t session_seed_for(std::uint64_t master_seed, std::uint64_t session_index,
                               std::uint64_t attempt);

/// Runs a session, redrawing with attempt-derived seeds while the
/// partition step comes up infeasible. Retries are counted into
/// *retries when given; structurally impossible configs still throw.
SessionResult run_session_with_retry(const ProtocolConfig &config, BobStrategy strategy,
                                     std::uint64_t master_seed, std::uint64_t session_index,
                                     int cheat_target = 0, std::size_t *retries = nullptr);

int xor_bits(const std::vector<int> &bits, const std::vector<std::size_t> &subset);

} // namespace qot
