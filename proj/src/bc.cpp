#include "bc.hpp"

#include <stdexcept>

namespace qot {

const CommitmentVault::Entry &CommitmentVault::entry(CommitmentId id) const {
    if (id >= entries_.size()) {
        throw std::invalid_argument("unknown commitment id");
    }
    return entries_[id];
}

CommitmentVault::Entry &CommitmentVault::entry(CommitmentId id) {
    if (id >= entries_.size()) {
        throw std::invalid_argument("unknown commitment id");
    }
    return entries_[id];
}

CommitmentId CommitmentVault::commit(BranchedState &state, RegisterId reg, BcMode mode, Rng &rng) {
    if (!state.is_live(reg)) {
        throw std::invalid_argument("commit: register not live");
    }
    if (is_vaulted(reg)) {
        throw std::invalid_argument("commit: register already committed");
    }
    Entry e;
    e.reg = reg;
    e.mode = mode;
    if (mode == BcMode::Bccc) {
        e.stored = state.measure(reg, rng).outcome;
    }
    entries_.push_back(e);
    return static_cast<CommitmentId>(entries_.size() - 1);
}

UnveilRecord CommitmentVault::unveil(BranchedState &state, CommitmentId id, Rng &rng) {
    Entry &e = entry(id);
    if (e.unveiled) {
        throw std::invalid_argument("unveil: commitment already unveiled");
    }
    if (e.mode == BcMode::NonBccc) {
        e.stored = state.measure(e.reg, rng).outcome;
    }
    e.unveiled = true;
    return UnveilRecord{id, e.stored, true};
}

Mat CommitmentVault::receiver_view(const BranchedState &state, CommitmentId id) const {
    const Entry &e = entry(id);
    if (!e.unveiled) {
        // Fixed dummy state: same for every open commitment.
        Mat dummy = Mat::identity(2);
        dummy *= cplx{0.5, 0.0};
        return dummy;
    }
    const std::size_t dim = state.is_live(e.reg) ? state.register_dim(e.reg) : 2;
    const Vec v = Vec::basis(dim, e.stored);
    return outer(v, v);
}

bool CommitmentVault::is_open(CommitmentId id) const { return !entry(id).unveiled; }

bool CommitmentVault::is_vaulted(RegisterId reg) const {
    for (const Entry &e : entries_) {
        if (e.reg == reg && !e.unveiled) {
            return true;
        }
    }
    return false;
}

BcMode CommitmentVault::mode_of(CommitmentId id) const { return entry(id).mode; }

RegisterId CommitmentVault::register_of(CommitmentId id) const { return entry(id).reg; }

} // namespace qot
