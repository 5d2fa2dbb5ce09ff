#pragma once

#include <span>
#include <vector>

#include "registers.hpp"

namespace qot {

// Verification oracle: a from-scratch dense state-vector simulation,
// deliberately independent of the branched representation it checks.
// Production code never uses this; only the acceptance suite and tests
// do.

/// Plain dense simulator over an ordered register list (creation order,
/// left-factor-major). All updates are in place.
class DenseSim {
  public:
    explicit DenseSim(std::size_t dim_limit = std::size_t{1} << 26);

    void add_register(RegisterId id, const Vec &init);
    /// Applies a unitary to the listed registers (caller order).
    void apply(std::span<const RegisterId> regs, const Mat &u);
    /// Probability of reading `value` on the register.
    double marginal(RegisterId reg, std::size_t value) const;
    /// Projects the register onto `value` and renormalizes; returns the
    /// pre-projection probability.
    double project(RegisterId reg, std::size_t value);
    /// Removes a register that is definitely in some basis state.
    void drop(RegisterId reg);

    std::size_t dim() const { return state_.dim(); }
    const Vec &vector() const { return state_; }
    /// Live registers in this simulator's storage order.
    std::vector<RegisterId> order() const;

  private:
    struct Entry {
        RegisterId id;
        std::size_t dim;
    };
    std::size_t pos_of(RegisterId reg) const;
    std::size_t stride_of(std::size_t pos) const;

    std::vector<Entry> regs_;
    Vec state_;
    std::size_t dim_limit_;
};

/// Observer that replays every BranchedState operation onto a DenseSim,
/// reusing the branched side's measurement outcomes and tracking how
/// far the two probability assignments drift apart.
class DenseMirror : public StateObserver {
  public:
    explicit DenseMirror(std::size_t dim_limit = std::size_t{1} << 26) : sim_(dim_limit) {}

    void on_add_register(RegisterId id, const std::string &label, const Vec &init) override;
    void on_unitary(std::span<const RegisterId> regs, const Mat &u) override;
    void on_controlled(RegisterId control, std::span<const RegisterId> targets,
                       std::span<const Mat> per_value) override;
    void on_measure(RegisterId reg, std::size_t outcome, double probability) override;
    void on_drop(RegisterId reg, std::size_t basis_value) override;

    const DenseSim &sim() const { return sim_; }
    double max_probability_deviation() const { return max_dev_; }

    /// |⟨dense | branched⟩| over this mirror's register order.
    double fidelity_against(const BranchedState &branched) const;

  private:
    DenseSim sim_;
    double max_dev_ = 0.0;
};

/// Effective-state parameters extracted from the dense oracle with an
/// explicitly materialized parity ancilla, for cross-checking the
/// branched reduction.
struct DenseEffective {
    int good_value = -1;
    double good_weight = 0.0;
    double fail_weight = 0.0;
    bool parity_deterministic = false;
};

DenseEffective dense_effective_state(const DenseSim &sim, RegisterId switch_reg,
                                     std::span<const RegisterId> parity_regs,
                                     int good_switch_value, int beta);

} // namespace qot
