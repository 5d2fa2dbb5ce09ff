#include "protocol.hpp"

#include <algorithm>
#include <sstream>

namespace qot {

void ProtocolConfig::validate() const {
    if (!allow_small_n && n < 8) {
        throw std::invalid_argument("config: n must be at least 8");
    }
    if (n < 2) {
        throw std::invalid_argument("config: n must be at least 2");
    }
    if (n > 4096) {
        throw std::invalid_argument("config: n too large for a desk-scale run");
    }
    const std::size_t k = subset_size_resolved();
    const std::size_t r = test_set_size_resolved();
    if (k == 0) {
        throw std::invalid_argument("config: subset size resolves to zero");
    }
    if (r >= n) {
        throw std::invalid_argument("config: test set would cover every index");
    }
    if (2 * k > n - r) {
        throw std::invalid_argument("config: subsets cannot fit outside the test set");
    }
}

namespace {

std::string join_indices(const std::vector<std::size_t> &v) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i > 0 ? "," : "") << v[i];
    }
    os << "}";
    return os.str();
}

std::string join_bits(const std::vector<int> &v) {
    std::string s;
    s.reserve(v.size());
    for (int b : v) {
        s.push_back(b != 0 ? '1' : '0');
    }
    return s;
}

struct MessageText {
    std::string operator()(const QubitBatch &m) const {
        return "qubits n=" + std::to_string(m.qubits.size());
    }
    std::string operator()(const CommitBatch &m) const {
        return "commitments count=" + std::to_string(2 * m.pairs.size());
    }
    std::string operator()(const TestRequest &m) const { return "test R=" + join_indices(m.indices); }
    std::string operator()(const TestUnveil &m) const {
        std::ostringstream os;
        os << "unveil [";
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            os << (i > 0 ? "," : "") << "(" << m.values[i][0] << "," << m.values[i][1] << ")";
        }
        os << "]";
        return os.str();
    }
    std::string operator()(const AbortMessage &) const { return "abort"; }
    std::string operator()(const BasesAnnounce &m) const { return "bases a=" + join_bits(m.bases); }
    std::string operator()(const SubsetsAnnounce &m) const {
        return "subsets J0=" + join_indices(m.j0) + " J1=" + join_indices(m.j1);
    }
    std::string operator()(const FinalAoN &m) const {
        return "final s=" + std::to_string(m.s) + " beta=" + std::to_string(m.beta);
    }
    std::string operator()(const Final12 &m) const {
        return "final beta0=" + std::to_string(m.beta0) + " beta1=" + std::to_string(m.beta1);
    }
};

} // namespace

std::string SessionTranscript::to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        os << (i + 1) << " " << std::visit(MessageText{}, messages[i]) << "\n";
    }
    return os.str();
}

int xor_bits(const std::vector<int> &bits, const std::vector<std::size_t> &subset) {
    int x = 0;
    for (std::size_t i : subset) {
        x ^= bits.at(i);
    }
    return x;
}

AliceState alice_prepare(const ProtocolConfig &config, BranchedState &state, Rng &rng,
                         QubitBatch &batch_out) {
    AliceState alice;
    alice.a.resize(config.n);
    alice.g.resize(config.n);
    batch_out.qubits.clear();
    for (std::size_t i = 0; i < config.n; ++i) {
        alice.a[i] = rng.bit();
        alice.g[i] = rng.bit();
        const RegisterId q =
            state.add_register("phi[" + std::to_string(i) + "]", prepare_bb84(alice.a[i], alice.g[i]));
        batch_out.qubits.push_back(q);
    }
    alice.b = rng.bit();
    alice.pair = {rng.bit(), rng.bit()};
    return alice;
}

namespace {

const Mat &hadamard() {
    static const Mat h = [] {
        const double inv = 1.0 / std::sqrt(2.0);
        return Mat::from_rows({{cplx{inv, 0.0}, cplx{inv, 0.0}}, {cplx{inv, 0.0}, cplx{-inv, 0.0}}});
    }();
    return h;
}

} // namespace

BobHonestState bob_honest_measure_and_commit(const ProtocolConfig &config, const QubitBatch &batch,
                                             BranchedState &state, CommitmentVault &vault,
                                             Rng &rng) {
    if (batch.qubits.size() != config.n) {
        throw std::invalid_argument("bob_honest_measure_and_commit: batch length mismatch");
    }
    BobHonestState bob;
    bob.basis.resize(config.n);
    bob.result.resize(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        bob.basis[i] = rng.bit();
        const RegisterId q = batch.qubits[i];
        if (bob.basis[i] == 1) {
            const RegisterId regs[] = {q};
            state.apply_unitary(regs, hadamard());
        }
        bob.result[i] = static_cast<int>(state.measure(q, rng).outcome);

        const RegisterId cb = state.add_register("cb[" + std::to_string(i) + "]",
                                                 Vec::basis(2, static_cast<std::size_t>(bob.basis[i])));
        const RegisterId ch = state.add_register("ch[" + std::to_string(i) + "]",
                                                 Vec::basis(2, static_cast<std::size_t>(bob.result[i])));
        const CommitmentId id_b = vault.commit(state, cb, config.bc_mode, rng);
        const CommitmentId id_h = vault.commit(state, ch, config.bc_mode, rng);
        bob.commitments.push_back({id_b, id_h});
    }
    return bob;
}

TestRequest alice_pick_test_set(AliceState &alice, const ProtocolConfig &config, Rng &rng) {
    alice.r = rng.sample_without_replacement(config.n, config.test_set_size_resolved());
    return TestRequest{alice.r};
}

TestUnveil bob_unveil_for_test(BobHonestState &bob, const TestRequest &request, BranchedState &state,
                               CommitmentVault &vault, Rng &rng) {
    bob.r = request.indices;
    TestUnveil unveil;
    for (std::size_t i : request.indices) {
        const UnveilRecord rb = vault.unveil(state, bob.commitments.at(i)[0], rng);
        const UnveilRecord rh = vault.unveil(state, bob.commitments.at(i)[1], rng);
        unveil.values.push_back({static_cast<int>(rb.value), static_cast<int>(rh.value)});
    }
    return unveil;
}

bool alice_test(const AliceState &alice, const TestRequest &request, const TestUnveil &unveil) {
    if (request.indices != alice.r) {
        throw std::invalid_argument("alice_test: test request does not match her chosen set");
    }
    if (unveil.values.size() != request.indices.size()) {
        throw std::invalid_argument("alice_test: unveil does not cover the tested set");
    }
    for (std::size_t k = 0; k < request.indices.size(); ++k) {
        const std::size_t i = request.indices[k];
        const int b = unveil.values[k][0];
        const int h = unveil.values[k][1];
        if (alice.a[i] == b && alice.g[i] != h) {
            return false;
        }
    }
    return true;
}

BasesAnnounce alice_announce_bases(const AliceState &alice) { return BasesAnnounce{alice.a}; }

SubsetsAnnounce bob_partition_honest(BobHonestState &bob, const BasesAnnounce &announce,
                                     const ProtocolConfig &config, Rng &rng) {
    const std::size_t k = config.subset_size_resolved();
    bob.t0.clear();
    bob.t1.clear();
    for (std::size_t i = 0; i < config.n; ++i) {
        (announce.bases.at(i) == bob.basis[i] ? bob.t0 : bob.t1).push_back(i);
    }
    auto outside_r = [&](const std::vector<std::size_t> &t) {
        std::vector<std::size_t> pool;
        for (std::size_t i : t) {
            if (!std::binary_search(bob.r.begin(), bob.r.end(), i)) {
                pool.push_back(i);
            }
        }
        return pool;
    };
    const std::vector<std::size_t> pool0 = outside_r(bob.t0);
    const std::vector<std::size_t> pool1 = outside_r(bob.t1);
    if (pool0.size() < k || pool1.size() < k) {
        throw InfeasibleSession("basis split left a working subset short");
    }
    bob.i0 = rng.sample_subset(pool0, k);
    bob.i1 = rng.sample_subset(pool1, k);
    const int flip = rng.bit();
    bob.j0 = flip == 0 ? bob.i0 : bob.i1;
    bob.j1 = flip == 0 ? bob.i1 : bob.i0;
    return SubsetsAnnounce{bob.j0, bob.j1};
}

namespace {

void check_subsets(const AliceState &alice, const SubsetsAnnounce &subsets,
                   const ProtocolConfig &config) {
    const std::size_t k = config.subset_size_resolved();
    if (subsets.j0.size() != k || subsets.j1.size() != k) {
        throw std::invalid_argument("alice_final: malformed subsets (size)");
    }
    std::vector<std::size_t> all = subsets.j0;
    all.insert(all.end(), subsets.j1.begin(), subsets.j1.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        throw std::invalid_argument("alice_final: malformed subsets (overlap)");
    }
    for (std::size_t i : all) {
        if (i >= config.n) {
            throw std::invalid_argument("alice_final: malformed subsets (range)");
        }
        if (std::binary_search(alice.r.begin(), alice.r.end(), i)) {
            throw std::invalid_argument("alice_final: malformed subsets (intersects test set)");
        }
    }
}

} // namespace

Message alice_final(AliceState &alice, const SubsetsAnnounce &subsets, const ProtocolConfig &config,
                    Rng &rng) {
    check_subsets(alice, subsets, config);
    if (config.variant == Variant::AoN) {
        alice.s = rng.bit();
        const std::vector<std::size_t> &js = alice.s == 0 ? subsets.j0 : subsets.j1;
        return FinalAoN{alice.s, alice.b ^ xor_bits(alice.g, js)};
    }
    return Final12{alice.pair[0] ^ xor_bits(alice.g, subsets.j0),
                   alice.pair[1] ^ xor_bits(alice.g, subsets.j1)};
}

HonestDecode bob_decode_honest(BobHonestState &bob, const Message &final_msg, Rng &rng) {
    HonestDecode out;
    if (const auto *aon = std::get_if<FinalAoN>(&final_msg)) {
        const std::vector<std::size_t> &js = aon->s == 0 ? bob.j0 : bob.j1;
        if (js == bob.i0) {
            out.got = true;
            out.decoded = aon->beta ^ xor_bits(bob.result, js);
            out.output = out.decoded;
        } else {
            out.got = false;
            out.output = rng.bit(); // uniform guess, recorded for reliability accounting
        }
        bob.got = out.got;
        bob.decoded = out.decoded;
        return out;
    }
    const auto &both = std::get<Final12>(final_msg);
    if (bob.j0 == bob.i0) {
        out.obtained_index = 0;
        out.decoded = both.beta0 ^ xor_bits(bob.result, bob.j0);
    } else {
        out.obtained_index = 1;
        out.decoded = both.beta1 ^ xor_bits(bob.result, bob.j1);
    }
    out.got = true;
    out.output = out.decoded;
    out.untargeted_guess = rng.bit();
    bob.got = true;
    bob.decoded = out.decoded;
    return out;
}

std::string SessionResult::to_text() const {
    std::ostringstream os;
    os << "variant=" << (variant == Variant::AoN ? "aon" : "12ot") << "\n";
    os << "transcript:\n" << transcript.to_text();
    os << "aborted=" << (aborted ? 1 : 0) << "\n";
    if (variant == Variant::AoN) {
        os << "alice_b=" << alice_bit << "\n";
    } else {
        os << "alice_b0=" << alice_pair[0] << " alice_b1=" << alice_pair[1] << "\n";
    }
    os << "bob_got=" << (bob_got ? 1 : 0) << " bob_output=" << bob_output
       << " obtained_index=" << obtained_index << "\n";
    os << "match=" << (match ? 1 : 0) << "\n";
    return os.str();
}

} // namespace qot
