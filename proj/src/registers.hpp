#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace qot {

class Rng;

/// Handle to a named register inside a BranchedState.
struct RegisterId {
    std::uint32_t value = UINT32_MAX;
    bool operator==(const RegisterId &) const = default;
};

struct MeasurementRecord {
    RegisterId reg;
    std::size_t outcome = 0;
    double probability = 0.0;
};

/// Mirror hook for an independent shadow simulation; every quantum
/// operation on a BranchedState is reported, measurement outcomes
/// included, so a dense re-implementation can follow the same
/// trajectory.
class StateObserver {
  public:
    virtual ~StateObserver() = default;
    virtual void on_add_register(RegisterId, const std::string & /*label*/, const Vec & /*init*/) {}
    virtual void on_unitary(std::span<const RegisterId>, const Mat &) {}
    virtual void on_controlled(RegisterId /*control*/, std::span<const RegisterId> /*targets*/,
                               std::span<const Mat> /*per_value*/) {}
    virtual void on_measure(RegisterId, std::size_t /*outcome*/, double /*probability*/) {}
    virtual void on_drop(RegisterId, std::size_t /*basis_value*/) {}
};

/// Joint pure state of a set of named registers, stored as a small sum
/// of branches. Each branch is a complex amplitude times a product of
/// factors; a factor is a state vector over a subset of the registers
/// (ascending register order, left-factor-major layout).
///
/// Branches are only ever created by splitting along the computational
/// basis of a control register, so distinct branches stay mutually
/// orthogonal: each carries a distinct basis state of some register.
/// Born-rule bookkeeping relies on that invariant.
class BranchedState {
  public:
    struct Factor {
        std::vector<std::uint32_t> regs; // ascending register ids
        Vec state;                       // dim = product of register dims
    };
    struct Branch {
        cplx amp;
        std::vector<Factor> factors; // sorted by leading register id
    };

    explicit BranchedState(std::size_t branch_cap = 64, std::size_t dense_cap = std::size_t{1} << 14);

    std::size_t branch_cap() const { return branch_cap_; }
    std::size_t dense_cap() const { return dense_cap_; }
    void set_dense_cap(std::size_t cap) { dense_cap_ = cap; }
    void set_observer(StateObserver *obs) { observer_ = obs; }

    RegisterId add_register(const std::string &label, Vec init);

    bool is_live(RegisterId reg) const;
    std::size_t register_dim(RegisterId reg) const;
    const std::string &register_label(RegisterId reg) const;
    std::optional<RegisterId> find_register(const std::string &label) const;
    /// Live registers in ascending id order.
    std::vector<RegisterId> live_registers() const;

    /// Applies a unitary to the listed registers. The matrix acts on the
    /// registers in the order given here (left-factor-major). Factors are
    /// merged as needed; the branch structure is unchanged.
    ///
    /// Rejected when a target register currently distinguishes branches
    /// (definite but different values across branches): mixing such a
    /// register would break the pairwise branch orthogonality the
    /// Born-rule bookkeeping relies on. Measure it first instead.
    void apply_unitary(std::span<const RegisterId> regs, const Mat &u);

    /// Applies a control-diagonal unitary: per_value[k] acts on the
    /// targets whenever the control register holds |k⟩. Branches in which
    /// the control is not in a definite basis state are split into one
    /// branch per control value.
    void apply_controlled(RegisterId control, std::span<const RegisterId> targets,
                          std::span<const Mat> per_value);

    /// Born-rule measurement in the computational basis. The measured
    /// register collapses and is left in a standalone basis-state factor;
    /// branches inconsistent with the outcome are deleted.
    MeasurementRecord measure(RegisterId reg, Rng &rng);

    /// Removes a register that is in the same definite basis state in
    /// every branch (e.g. after measurement). Errors otherwise.
    void drop(RegisterId reg);

    /// Full Kronecker expansion over the given register order, which must
    /// be a permutation of the live registers. Errors when the total
    /// dimension exceeds the dense cap.
    Vec to_dense(std::span<const RegisterId> order) const;

    /// Deterministic text serialization (amplitudes to 12 significant
    /// digits), for golden-file tests and debugging.
    std::string dump(int significant_digits = 12) const;

    // God's-eye introspection, used by analysis code and oracles.
    std::size_t branch_count() const { return branches_.size(); }
    cplx branch_amplitude(std::size_t branch) const { return branches_[branch].amp; }
    /// The definite basis value of `reg` within one branch, if it has one.
    std::optional<std::size_t> branch_register_value(std::size_t branch, RegisterId reg) const;
    /// The definite basis value of `reg` across all branches, if shared.
    std::optional<std::size_t> definite_value(RegisterId reg) const;
    /// Σ |amp|² assuming orthogonal branches; 1 for a healthy state.
    double total_weight() const;
    /// ⟨branch bx of x | branch by of y⟩. Requires the two branches to
    /// carry identical factor partitions (same register grouping).
    static cplx branch_overlap(const BranchedState &x, std::size_t bx, const BranchedState &y,
                               std::size_t by);

  private:
    struct RegisterInfo {
        std::string label;
        std::size_t dim = 0;
        bool live = false;
    };

    std::size_t reg_index(RegisterId reg) const;
    void check_not_branch_marker(RegisterId reg, const char *op) const;
    Factor &factor_of(Branch &br, std::uint32_t reg);
    const Factor &factor_of(const Branch &br, std::uint32_t reg) const;
    std::size_t factor_pos(const Branch &br, std::uint32_t reg) const;
    /// Merges the factors containing the given registers into one.
    Factor &merge_factors(Branch &br, std::span<const RegisterId> regs);
    void apply_on_factor(Factor &f, std::span<const RegisterId> targets, const Mat &u) const;
    void sort_factors(Branch &br) const;
    /// Weight of the reg=k component within a branch's factor.
    double component_weight(const Branch &br, std::uint32_t reg, std::size_t k) const;
    /// Projects reg to |k⟩ inside a branch; returns the pre-projection
    /// component weight. The register ends standalone.
    double project_register(Branch &br, std::uint32_t reg, std::size_t k);
    void check_live(RegisterId reg, const char *op) const;

    std::vector<RegisterInfo> registry_;
    std::vector<Branch> branches_;
    std::size_t branch_cap_;
    std::size_t dense_cap_;
    StateObserver *observer_ = nullptr;
};

/// Conjugate-coding qubit state |a,g⟩: basis bit a, value bit g.
/// |0,0⟩=(1,0), |0,1⟩=(0,1), |1,0⟩=(1,1)/√2, |1,1⟩=(1,−1)/√2.
Vec prepare_bb84(int a, int g);

} // namespace qot
