#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "protocol.hpp"

namespace qot {

/// One-shot two-party box: a single unitary on Alice ⊗ Bob registers
/// computing m_j into Bob's output register. Bob's side factors as
/// (input j) ⊗ (output o) ⊗ (mirror w); the mirror register absorbs the
/// sender-basis information so that Alice's reduced state is
/// independent of j even when she purifies her input with a dice
/// register. A box without the mirror leaks j to a purifying Alice and
/// is kept around as the non-concealing counterexample.
struct IdealProtocolModel {
    Mat u;                        // on H_A ⊗ H_B
    std::size_t alice_dim = 4;    // i = (m0, m1)
    std::size_t bob_input_dim = 2;
    std::size_t bob_output_dim = 2;
    std::size_t mirror_dim = 4;

    std::size_t bob_dim() const { return bob_input_dim * bob_output_dim * mirror_dim; }
    std::size_t total_dim() const { return alice_dim * bob_dim(); }

    /// Function table: message m_j of the pair i.
    int f(std::size_t i, int j) const;

    /// Final joint state for classical inputs (i, j), output register
    /// and mirror starting at 0.
    Vec run(std::size_t i, int j) const;

    /// Final joint state on dice ⊗ Alice ⊗ Bob when Alice's input is
    /// purified with a dice register.
    Vec run_purified(int j) const;

    /// Bob's reduced density operator after a classical run.
    Mat bob_state(std::size_t i, int j) const;

    /// Alice-side reduction (dice ⊗ Alice) of the purified run.
    Mat alice_purified_state(int j) const;
};

IdealProtocolModel build_ideal_ot();
/// Output-only box at the dimensions of the plain functionality; its
/// Alice-side reductions depend on j, so the switch construction must
/// refuse it.
IdealProtocolModel build_nonconcealing_ot();

/// Thrown when the attack prerequisite fails: the protocol's Alice-side
/// reductions distinguish Bob's inputs.
class NotConcealing : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SwitchUnitary {
    Mat u; // acts on Bob's space alone
    int j1 = 0;
    int j2 = 0;
};

/// Builds the Bob-local rotation mapping the purified j1-run onto the
/// purified j2-run, from matched Schmidt data across the (dice⊗Alice |
/// Bob) cut. Requires the Alice-side reductions for j1 and j2 to agree
/// within 1e-9.
SwitchUnitary construct_switch_unitary(const IdealProtocolModel &model, int j1, int j2);

struct SwitchVerification {
    double max_trace_distance = 0.0;   // over all classical Alice inputs
    double purified_map_error = 0.0;   // ‖(I⊗U) v_j1 − v_j2‖
    std::vector<double> per_input;
};

/// Checks U ρ^{i,j1} U† = ρ^{i,j2} for every classical Alice input.
SwitchVerification verify_switch(const IdealProtocolModel &model, const SwitchUnitary &sw);

/// Runs the full attack on the box: honest run with j=0, read the
/// output, rotate with the switch unitary, read again.
std::array<int, 2> double_extraction(const IdealProtocolModel &model, std::size_t i,
                                     const SwitchUnitary &sw);

/// Outcome of the dependence analysis on the commitment-based protocol:
/// the sender's announcements are a function of the receiver's subset
/// labeling (structural part), and no tested receiver-only strategy
/// extracts both secrets (behavioral part).
struct DependenceReport {
    std::size_t sessions = 0;
    std::size_t parity_diff_sessions = 0;   // sessions where the two subsets' key parities differ
    std::size_t nonconstant_records = 0;    // of those, announcements differ across labelings
    double entangling_joint_rate = 0.0;     // cheat targets one bit, guesses the other
    double honest_joint_rate = 0.0;         // honest decode of one bit, guess the other
    std::size_t infeasible_retries = 0;
    std::string to_text() const;
};

DependenceReport bcqot_dependence_check(const ProtocolConfig &config, std::size_t sessions,
                                        std::uint64_t master_seed);

} // namespace qot
