#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protocol.hpp"

namespace qot {

// Fixed gates used by the entangling receiver.

/// Coherent conjugate-basis readout on (B, qubit, H): controlled on the
/// basis register B, records the measurement result of the qubit into H
/// without collapsing anything.
const Mat &deferred_readout_gate();

/// CNOT with the control as the left (first) register.
const Mat &cnot_gate();

/// Basis-comparison gate block on (B, marker) for one control value of
/// the global switch register: stores (B != announced_basis) xor
/// switch_value into the marker qubit.
Mat basis_compare_block(int announced_basis, int switch_value);

/// Two-outcome discrimination measurement acting on the 3-dimensional
/// effective space spanned by {|b=0⟩, |b=1⟩, |?⟩}.
struct PovmPair {
    Mat e0;
    Mat complement;
    void validate() const; // Hermitian, positive, rank-1 projector, sums to I
};

/// The optimal discrimination POVM for the pair of effective states
/// (e_b + e_?)/√2, b ∈ {0,1}.
PovmPair discrimination_povm();

/// Average success probability ½⟨Φ0|E0|Φ0⟩ + ½⟨Φ1|I−E0|Φ1⟩ over the two
/// effective states.
double analytic_reliability(const PovmPair &povm);

/// 3-dimensional reduction of the receiver's post-protocol state:
/// amplitude on |b=d⟩ from the branch whose switch register matches the
/// announcement, amplitude on |?⟩ from the other branch.
struct EffectiveDecodeState {
    Vec vec;                    // dim 3 over (|b=0⟩, |b=1⟩, |?⟩)
    int good_value = -1;        // d: the bit the good branch decodes to
    double good_amplitude = 0;  // expected 1/√2
    double fail_amplitude = 0;  // expected 1/√2
    double fail_overlap = 0;    // |overlap| of fail reductions under both announcements
    double good_fail_overlap = 0;
};

/// Builds the effective state from a two-branch session state. The good
/// branch is the one whose switch register holds `good_switch_value`;
/// its parity over `parity_regs` must be deterministic, and the branch
/// amplitudes must both be 1/√2 within 1e-9.
EffectiveDecodeState build_effective_state(const BranchedState &state, RegisterId switch_reg,
                                           std::span<const RegisterId> parity_regs,
                                           int good_switch_value, int beta);

struct PovmOutcome {
    int guess = -1;
    double p_correct = 0.0;
};

/// Samples the POVM on the effective state. Outcome E0 decodes as 0 by
/// convention; p_correct is the analytic probability that the decoded
/// bit matches the good branch's value.
PovmOutcome povm_decode(const EffectiveDecodeState &eff, const PovmPair &povm, Rng &rng);

/// Per-session report of the entangling strategy, serialized one JSON
/// object per line for the harness debug dump.
struct CheatReport {
    std::uint64_t session = 0;
    double amp_good = 0.0;
    double amp_fail = 0.0;
    double p_correct = 0.0;
    int guess = -1;
    int truth = -1;
    bool match = false;
    std::string to_json_line() const;
};

/// The entangling receiver: keeps basis and result registers at the
/// quantum level through commitment, answers the test honestly, builds
/// the working subsets through a single coherent switch qubit, and
/// decodes with the discrimination POVM.
class EntanglingBob {
  public:
    EntanglingBob(const ProtocolConfig &config, BranchedState &state, CommitmentVault &vault,
                  Rng &rng);

    CommitBatch receive_and_commit(const QubitBatch &batch);
    TestUnveil unveil_for_test(const TestRequest &request);
    SubsetsAnnounce partition(const BasesAnnounce &announce);

    struct Decode {
        int guess = -1;
        double p_correct = 0.0;
        int untargeted_guess = -1;
        std::optional<EffectiveDecodeState> eff;
    };
    Decode decode_aon(const FinalAoN &final_msg);
    Decode decode_one_of_two(const Final12 &final_msg, int target);

    const std::vector<std::size_t> &j0() const { return j0_; }
    const std::vector<std::size_t> &j1() const { return j1_; }
    /// Marker outcome per index; -1 at tested indices.
    const std::vector<int> &markers() const { return gamma_; }
    RegisterId switch_register() const { return switch_reg_; }
    RegisterId result_register(std::size_t i) const { return h_.at(i); }

  private:
    Decode decode_common(int good_switch_value, const std::vector<std::size_t> &subset, int beta);

    const ProtocolConfig &config_;
    BranchedState &state_;
    CommitmentVault &vault_;
    Rng &rng_;

    std::vector<RegisterId> phi_, b_, h_;
    std::vector<std::array<CommitmentId, 2>> commitments_;
    std::vector<std::size_t> tested_;
    std::vector<int> gamma_; // marker outcomes, -1 for tested indices
    std::vector<std::size_t> j0_, j1_;
    RegisterId switch_reg_;
    bool decoded_once_ = false;
};

} // namespace qot
