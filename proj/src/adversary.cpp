#include "adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qot {

namespace {

Mat pauli_x() { return Mat::from_rows({{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}}); }

Mat projector(const Vec &v) { return outer(v, v); }

} // namespace

const Mat &deferred_readout_gate() {
    static const Mat u1 = [] {
        const Mat i2 = Mat::identity(2);
        const Mat x = pauli_x();
        Mat u(8, 8);
        for (int b = 0; b < 2; ++b) {
            const Mat pb = projector(Vec::basis(2, static_cast<std::size_t>(b)));
            for (int g = 0; g < 2; ++g) {
                const Mat pq = projector(prepare_bb84(b, g));
                u += tensor(pb, tensor(pq, g == 0 ? i2 : x));
            }
        }
        return u;
    }();
    return u1;
}

const Mat &cnot_gate() {
    static const Mat cx = Mat::from_rows({{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, 0}},
                                          {cplx{0, 0}, cplx{1, 0}, cplx{0, 0}, cplx{0, 0}},
                                          {cplx{0, 0}, cplx{0, 0}, cplx{0, 0}, cplx{1, 0}},
                                          {cplx{0, 0}, cplx{0, 0}, cplx{1, 0}, cplx{0, 0}}});
    return cx;
}

Mat basis_compare_block(int announced_basis, int switch_value) {
    const Mat i2 = Mat::identity(2);
    const Mat x = pauli_x();
    const Mat p_match = projector(Vec::basis(2, static_cast<std::size_t>(announced_basis)));
    const Mat p_other = projector(Vec::basis(2, static_cast<std::size_t>(1 - announced_basis)));
    if (switch_value == 0) {
        return tensor(p_match, i2) + tensor(p_other, x);
    }
    return tensor(p_match, x) + tensor(p_other, i2);
}

void PovmPair::validate() const {
    if (e0.rows() != 3 || e0.cols() != 3 || complement.rows() != 3 || complement.cols() != 3) {
        throw std::invalid_argument("povm: expected 3x3 elements");
    }
    if (!is_hermitian(e0, 1e-12)) {
        throw std::invalid_argument("povm: element not Hermitian");
    }
    if (max_abs_diff(e0 + complement, Mat::identity(3)) > 1e-12) {
        throw std::invalid_argument("povm: elements do not sum to identity");
    }
    const EigenSystem es = hermitian_eigensystem(e0);
    for (double v : es.values) {
        if (v < -1e-12 || v > 1.0 + 1e-12) {
            throw std::invalid_argument("povm: eigenvalue outside [0, 1]");
        }
    }
    if (max_abs_diff(mul(e0, e0), e0) > 1e-12 || std::abs(e0.trace() - cplx{1.0, 0.0}) > 1e-12) {
        throw std::invalid_argument("povm: first element is not a rank-1 projector");
    }
}

PovmPair discrimination_povm() {
    const double s3 = std::sqrt(3.0);
    Mat e0 = Mat::from_rows({{cplx{2.0 + s3, 0}, cplx{-1.0, 0}, cplx{1.0 + s3, 0}},
                             {cplx{-1.0, 0}, cplx{2.0 - s3, 0}, cplx{1.0 - s3, 0}},
                             {cplx{1.0 + s3, 0}, cplx{1.0 - s3, 0}, cplx{2.0, 0}}});
    e0 *= cplx{1.0 / 6.0, 0.0};
    PovmPair povm{e0, Mat::identity(3) - e0};
    return povm;
}

double analytic_reliability(const PovmPair &povm) {
    const double inv = 1.0 / std::sqrt(2.0);
    Vec phi0(3), phi1(3);
    phi0[0] = cplx{inv, 0};
    phi0[2] = cplx{inv, 0};
    phi1[1] = cplx{inv, 0};
    phi1[2] = cplx{inv, 0};
    const double p0 = inner(phi0, mul(povm.e0, phi0)).real();
    const double p1 = inner(phi1, mul(povm.complement, phi1)).real();
    return 0.5 * p0 + 0.5 * p1;
}

EffectiveDecodeState build_effective_state(const BranchedState &state, RegisterId switch_reg,
                                           std::span<const RegisterId> parity_regs,
                                           int good_switch_value, int beta) {
    if (state.branch_count() != 2) {
        throw std::logic_error("build_effective_state: expected a two-branch state");
    }
    std::optional<std::size_t> good_idx, fail_idx;
    for (std::size_t b = 0; b < 2; ++b) {
        const std::optional<std::size_t> v = state.branch_register_value(b, switch_reg);
        if (!v.has_value()) {
            throw std::logic_error("build_effective_state: switch register not definite per branch");
        }
        (static_cast<int>(*v) == good_switch_value ? good_idx : fail_idx) = b;
    }
    if (!good_idx.has_value() || !fail_idx.has_value()) {
        throw std::logic_error("build_effective_state: branches do not split the switch register");
    }

    int parity = 0;
    for (RegisterId reg : parity_regs) {
        const std::optional<std::size_t> h = state.branch_register_value(*good_idx, reg);
        if (!h.has_value()) {
            throw std::logic_error("build_effective_state: good-branch parity not deterministic");
        }
        parity ^= static_cast<int>(*h);
    }

    EffectiveDecodeState eff;
    eff.good_value = beta ^ parity;
    eff.good_amplitude = std::abs(state.branch_amplitude(*good_idx));
    eff.fail_amplitude = std::abs(state.branch_amplitude(*fail_idx));
    const double inv = 1.0 / std::sqrt(2.0);
    if (std::abs(eff.good_amplitude - inv) > 1e-9 || std::abs(eff.fail_amplitude - inv) > 1e-9) {
        throw std::logic_error("build_effective_state: branch amplitudes drifted from 1/sqrt(2)");
    }

    // The fail component never depends on the announcement: rebuilding
    // under beta and beta^1 references the same branch, so the overlap
    // of the two reductions is its self-overlap, normalized.
    const double fail_weight = std::norm(state.branch_amplitude(*fail_idx));
    eff.fail_overlap =
        std::abs(BranchedState::branch_overlap(state, *fail_idx, state, *fail_idx)) / fail_weight;
    eff.good_fail_overlap =
        std::abs(BranchedState::branch_overlap(state, *good_idx, state, *fail_idx));

    eff.vec = Vec(3);
    eff.vec[static_cast<std::size_t>(eff.good_value)] = cplx{eff.good_amplitude, 0.0};
    eff.vec[2] = cplx{eff.fail_amplitude, 0.0};
    return eff;
}

PovmOutcome povm_decode(const EffectiveDecodeState &eff, const PovmPair &povm, Rng &rng) {
    povm.validate();
    if (!eff.vec.is_normalized(1e-9)) {
        throw std::invalid_argument("povm_decode: effective state not normalized");
    }
    const double p0 = inner(eff.vec, mul(povm.e0, eff.vec)).real();
    PovmOutcome out;
    out.guess = rng.uniform() < p0 ? 0 : 1;
    out.p_correct = eff.good_value == 0 ? p0 : 1.0 - p0;
    return out;
}

std::string CheatReport::to_json_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"session\":%llu,\"amp_good\":%.9g,\"amp_fail\":%.9g,\"p_correct\":%.9g,"
                  "\"guess\":%d,\"truth\":%d,\"match\":%s}",
                  static_cast<unsigned long long>(session), amp_good, amp_fail, p_correct, guess,
                  truth, match ? "true" : "false");
    return std::string(buf);
}

EntanglingBob::EntanglingBob(const ProtocolConfig &config, BranchedState &state,
                             CommitmentVault &vault, Rng &rng)
    : config_(config), state_(state), vault_(vault), rng_(rng) {}

CommitBatch EntanglingBob::receive_and_commit(const QubitBatch &batch) {
    if (batch.qubits.size() != config_.n) {
        throw std::invalid_argument("entangling receive: batch length mismatch");
    }
    phi_ = batch.qubits;
    const double inv = 1.0 / std::sqrt(2.0);
    Vec plus(2);
    plus[0] = cplx{inv, 0};
    plus[1] = cplx{inv, 0};

    CommitBatch out;
    for (std::size_t i = 0; i < config_.n; ++i) {
        const std::string suffix = "[" + std::to_string(i) + "]";
        const RegisterId b = state_.add_register("B" + suffix, plus);
        const RegisterId h = state_.add_register("H" + suffix, Vec::basis(2, 0));
        b_.push_back(b);
        h_.push_back(h);

        const RegisterId readout[] = {b, phi_[i], h};
        state_.apply_unitary(readout, deferred_readout_gate());

        // Commitment ancillas: coherent copies handed to the vault. In
        // Bccc mode the vault measures them immediately, which is the
        // behavioral difference under test.
        const RegisterId cb = state_.add_register("CB" + suffix, Vec::basis(2, 0));
        const RegisterId copy_b[] = {b, cb};
        state_.apply_unitary(copy_b, cnot_gate());
        const CommitmentId id_b = vault_.commit(state_, cb, config_.bc_mode, rng_);

        const RegisterId ch = state_.add_register("CH" + suffix, Vec::basis(2, 0));
        const RegisterId copy_h[] = {h, ch};
        state_.apply_unitary(copy_h, cnot_gate());
        const CommitmentId id_h = vault_.commit(state_, ch, config_.bc_mode, rng_);
        commitments_.push_back({id_b, id_h});
    }
    out.pairs = commitments_;
    return out;
}

TestUnveil EntanglingBob::unveil_for_test(const TestRequest &request) {
    tested_ = request.indices;
    TestUnveil unveil;
    for (std::size_t i : request.indices) {
        const UnveilRecord rb = vault_.unveil(state_, commitments_.at(i)[0], rng_);
        const UnveilRecord rh = vault_.unveil(state_, commitments_.at(i)[1], rng_);
        unveil.values.push_back({static_cast<int>(rb.value), static_cast<int>(rh.value)});
    }
    return unveil;
}

SubsetsAnnounce EntanglingBob::partition(const BasesAnnounce &announce) {
    const double inv = 1.0 / std::sqrt(2.0);
    Vec plus(2);
    plus[0] = cplx{inv, 0};
    plus[1] = cplx{inv, 0};
    switch_reg_ = state_.add_register("Sprime", plus);

    gamma_.assign(config_.n, -1);
    for (std::size_t i = 0; i < config_.n; ++i) {
        if (std::binary_search(tested_.begin(), tested_.end(), i)) {
            continue;
        }
        const RegisterId marker =
            state_.add_register("Gamma[" + std::to_string(i) + "]", Vec::basis(2, 0));
        const Mat blocks[] = {basis_compare_block(announce.bases.at(i), 0),
                              basis_compare_block(announce.bases.at(i), 1)};
        const RegisterId targets[] = {b_[i], marker};
        state_.apply_controlled(switch_reg_, targets, blocks);
        gamma_[i] = static_cast<int>(state_.measure(marker, rng_).outcome);
        state_.drop(marker);
    }

    std::vector<std::size_t> pool0, pool1;
    for (std::size_t i = 0; i < config_.n; ++i) {
        if (gamma_[i] == 0) {
            pool0.push_back(i);
        } else if (gamma_[i] == 1) {
            pool1.push_back(i);
        }
    }
    const std::size_t k = config_.subset_size_resolved();
    if (pool0.size() < k || pool1.size() < k) {
        throw InfeasibleSession("marker split left a working subset short");
    }
    j0_ = rng_.sample_subset(pool0, k);
    j1_ = rng_.sample_subset(pool1, k);
    return SubsetsAnnounce{j0_, j1_};
}

EntanglingBob::Decode EntanglingBob::decode_common(int good_switch_value,
                                                   const std::vector<std::size_t> &subset,
                                                   int beta) {
    if (decoded_once_) {
        throw std::logic_error("entangling decode: only one target per session");
    }
    decoded_once_ = true;

    Decode out;
    std::vector<RegisterId> parity_regs;
    for (std::size_t i : subset) {
        parity_regs.push_back(h_[i]);
    }

    if (state_.branch_count() == 2) {
        const EffectiveDecodeState eff =
            build_effective_state(state_, switch_reg_, parity_regs, good_switch_value, beta);
        const PovmOutcome povm = povm_decode(eff, discrimination_povm(), rng_);
        out.guess = povm.guess;
        out.p_correct = povm.p_correct;
        out.eff = eff;
        return out;
    }

    // Commitment collapse (Bccc vault) leaves a single branch: the
    // switch register is classical, so read it and decode like an
    // honest party would.
    const std::optional<std::size_t> sp = state_.definite_value(switch_reg_);
    if (!sp.has_value()) {
        throw std::logic_error("entangling decode: switch register not classical in single branch");
    }
    if (static_cast<int>(*sp) == good_switch_value) {
        int parity = 0;
        for (RegisterId reg : parity_regs) {
            const std::optional<std::size_t> h = state_.definite_value(reg);
            if (!h.has_value()) {
                throw std::logic_error("entangling decode: collapsed result register not definite");
            }
            parity ^= static_cast<int>(*h);
        }
        out.guess = beta ^ parity;
        out.p_correct = 1.0;
    } else {
        out.guess = rng_.bit();
        out.p_correct = 0.5;
    }
    return out;
}

EntanglingBob::Decode EntanglingBob::decode_aon(const FinalAoN &final_msg) {
    const std::vector<std::size_t> &subset = final_msg.s == 0 ? j0_ : j1_;
    return decode_common(final_msg.s, subset, final_msg.beta);
}

EntanglingBob::Decode EntanglingBob::decode_one_of_two(const Final12 &final_msg, int target) {
    if (target != 0 && target != 1) {
        throw std::invalid_argument("entangling decode: target must be 0 or 1");
    }
    const std::vector<std::size_t> &subset = target == 0 ? j0_ : j1_;
    const int beta = target == 0 ? final_msg.beta0 : final_msg.beta1;
    Decode out = decode_common(target, subset, beta);
    out.untargeted_guess = rng_.bit();
    return out;
}

} // namespace qot
