#pragma once

#include <cstdint>
#include <vector>

#include "registers.hpp"

namespace qot {

/// The two commitment flavors: a generic secure vault accepts a
/// register in any state and keeps it coherent until unveiling; the
/// classically-certified variant forces a computational-basis
/// measurement at commit time.
enum class BcMode { NonBccc, Bccc };

using CommitmentId = std::uint32_t;

struct UnveilRecord {
    CommitmentId id = 0;
    std::size_t value = 0;
    bool honest = true;
};

/// Ideal trusted-functionality model of a secure bit commitment.
/// Committed registers stay part of the session's joint state (so
/// entanglement with the committer's registers is preserved), but are
/// owned by the vault until unveiled: binding because only the vault
/// can touch them, concealing because the receiver's view is a fixed
/// dummy state until the unveil.
class CommitmentVault {
  public:
    CommitmentVault() = default;

    /// Takes ownership of a register. In Bccc mode the register is
    /// measured immediately and the classical result stored.
    CommitmentId commit(BranchedState &state, RegisterId reg, BcMode mode, Rng &rng);

    /// Opens a commitment: computational-basis measurement of the
    /// vaulted register (NonBccc) or release of the stored value (Bccc).
    /// The committer's entangled registers collapse consistently.
    UnveilRecord unveil(BranchedState &state, CommitmentId id, Rng &rng);

    /// The density operator accessible to the receiver. Before the
    /// unveil this is a fixed dummy state independent of what was
    /// committed; afterwards it is the unveiled classical value.
    Mat receiver_view(const BranchedState &state, CommitmentId id) const;

    bool is_open(CommitmentId id) const;
    bool is_vaulted(RegisterId reg) const;
    BcMode mode_of(CommitmentId id) const;
    RegisterId register_of(CommitmentId id) const;
    std::size_t size() const { return entries_.size(); }

  private:
    struct Entry {
        RegisterId reg;
        BcMode mode = BcMode::NonBccc;
        bool unveiled = false;
        std::size_t stored = 0; // Bccc commit-time result, or unveil result
    };

    const Entry &entry(CommitmentId id) const;
    Entry &entry(CommitmentId id);

    std::vector<Entry> entries_;
};

} // namespace qot
