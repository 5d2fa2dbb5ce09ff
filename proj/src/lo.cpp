#include "lo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qot {

namespace {

std::size_t bob_index(const IdealProtocolModel &m, int j, std::size_t o, std::size_t w) {
    return (static_cast<std::size_t>(j) * m.bob_output_dim + o) * m.mirror_dim + w;
}

Mat permutation_box(const IdealProtocolModel &m, bool with_mirror) {
    const std::size_t total = m.total_dim();
    Mat u(total, total);
    for (std::size_t i = 0; i < m.alice_dim; ++i) {
        for (int j = 0; j < static_cast<int>(m.bob_input_dim); ++j) {
            for (std::size_t o = 0; o < m.bob_output_dim; ++o) {
                for (std::size_t w = 0; w < m.mirror_dim; ++w) {
                    const std::size_t src = i * m.bob_dim() + bob_index(m, j, o, w);
                    const std::size_t o2 = o ^ static_cast<std::size_t>(m.f(i, j));
                    const std::size_t w2 = with_mirror ? (w ^ i) : w;
                    const std::size_t dst = i * m.bob_dim() + bob_index(m, j, o2, w2);
                    u(dst, src) = cplx{1.0, 0.0};
                }
            }
        }
    }
    return u;
}

} // namespace

int IdealProtocolModel::f(std::size_t i, int j) const {
    const int m0 = static_cast<int>((i >> 1) & 1);
    const int m1 = static_cast<int>(i & 1);
    return j == 0 ? m0 : m1;
}

Vec IdealProtocolModel::run(std::size_t i, int j) const {
    Vec in = Vec::basis(total_dim(), i * bob_dim() + bob_index(*this, j, 0, 0));
    return mul(u, in);
}

Vec IdealProtocolModel::run_purified(int j) const {
    const double amp = 1.0 / std::sqrt(static_cast<double>(alice_dim));
    Vec out(alice_dim * total_dim());
    for (std::size_t i = 0; i < alice_dim; ++i) {
        const Vec fin = run(i, j);
        for (std::size_t x = 0; x < fin.dim(); ++x) {
            out[i * total_dim() + x] = amp * fin[x];
        }
    }
    return out;
}

Mat IdealProtocolModel::bob_state(std::size_t i, int j) const {
    const Vec fin = run(i, j);
    return partial_trace(outer(fin, fin), {alice_dim, bob_dim()}, {1});
}

Mat IdealProtocolModel::alice_purified_state(int j) const {
    const Vec v = run_purified(j);
    return partial_trace(outer(v, v), {alice_dim, alice_dim, bob_dim()}, {0, 1});
}

IdealProtocolModel build_ideal_ot() {
    IdealProtocolModel m;
    m.u = permutation_box(m, true);
    return m;
}

IdealProtocolModel build_nonconcealing_ot() {
    IdealProtocolModel m;
    m.mirror_dim = 1;
    m.u = permutation_box(m, false);
    return m;
}

SwitchUnitary construct_switch_unitary(const IdealProtocolModel &model, int j1, int j2) {
    const double dist =
        trace_distance(model.alice_purified_state(j1), model.alice_purified_state(j2));
    if (dist > 1e-9) {
        throw NotConcealing("Alice-side reductions distinguish the receiver inputs");
    }

    const std::size_t left = model.alice_dim * model.alice_dim;
    const std::size_t right = model.bob_dim();
    const Vec v1 = model.run_purified(j1);
    const Vec v2 = model.run_purified(j2);

    const SchmidtDecomposition sd1 = schmidt_decompose(v1, left, right);
    const SchmidtDecomposition sd2 = schmidt_decompose(v2, left, right);
    if (sd1.coefficients.size() != sd2.coefficients.size()) {
        throw NotConcealing("Schmidt ranks differ across receiver inputs");
    }
    for (std::size_t k = 0; k < sd1.coefficients.size(); ++k) {
        if (std::abs(sd1.coefficients[k] - sd2.coefficients[k]) > 1e-9) {
            throw NotConcealing("Schmidt spectra differ across receiver inputs");
        }
    }

    // Match the two decompositions through a shared left basis: project
    // the j2 state onto the j1 left vectors. Degenerate coefficients
    // make independently computed right bases incompatible, projection
    // sidesteps the ambiguity.
    std::vector<Vec> beta1 = sd1.right;
    std::vector<Vec> beta2;
    double recovered = 0.0;
    for (std::size_t k = 0; k < sd1.coefficients.size(); ++k) {
        Vec w(right);
        for (std::size_t y = 0; y < right; ++y) {
            cplx s{0.0, 0.0};
            for (std::size_t x = 0; x < left; ++x) {
                s += std::conj(sd1.left[k][x]) * v2[x * right + y];
            }
            w[y] = s;
        }
        const double sigma = w.norm();
        if (std::abs(sigma - sd1.coefficients[k]) > 1e-9) {
            throw NotConcealing("projected amplitudes do not match the Schmidt spectrum");
        }
        recovered += sigma * sigma;
        w *= cplx{1.0 / sigma, 0.0};
        beta2.push_back(std::move(w));
    }
    if (std::abs(recovered - 1.0) > 1e-9) {
        throw NotConcealing("receiver-side support differs across inputs");
    }

    const std::vector<Vec> full1 = complete_orthonormal_basis(beta1, right);
    const std::vector<Vec> full2 = complete_orthonormal_basis(beta2, right);
    Mat u(right, right);
    for (std::size_t k = 0; k < right; ++k) {
        u += outer(full2[k], full1[k]);
    }
    if (!is_unitary(u, 1e-10)) {
        throw std::runtime_error("construct_switch_unitary: completion is not unitary");
    }
    return SwitchUnitary{u, j1, j2};
}

SwitchVerification verify_switch(const IdealProtocolModel &model, const SwitchUnitary &sw) {
    SwitchVerification out;
    for (std::size_t i = 0; i < model.alice_dim; ++i) {
        const Mat rho1 = model.bob_state(i, sw.j1);
        const Mat rho2 = model.bob_state(i, sw.j2);
        const Mat rotated = mul(mul(sw.u, rho1), sw.u.adjoint());
        const double d = trace_distance(rotated, rho2);
        out.per_input.push_back(d);
        out.max_trace_distance = std::max(out.max_trace_distance, d);
    }
    const Vec v1 = model.run_purified(sw.j1);
    const Vec v2 = model.run_purified(sw.j2);
    const Mat lifted = tensor(Mat::identity(model.alice_dim * model.alice_dim), sw.u);
    const Vec mapped = mul(lifted, v1);
    double err = 0.0;
    for (std::size_t x = 0; x < mapped.dim(); ++x) {
        err += std::norm(mapped[x] - v2[x]);
    }
    out.purified_map_error = std::sqrt(err);
    return out;
}

namespace {

/// Deterministic readout of one factor of a product-basis register in a
/// dense state: errors unless the marginal is concentrated on a single
/// value.
std::size_t read_definite_factor(const Vec &state, const std::vector<std::size_t> &dims,
                                 std::size_t factor) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    std::vector<double> marginal(dims[factor], 0.0);
    for (std::size_t x = 0; x < state.dim(); ++x) {
        marginal[(x / strides[factor]) % dims[factor]] += std::norm(state[x]);
    }
    for (std::size_t k = 0; k < marginal.size(); ++k) {
        if (marginal[k] > 1.0 - 1e-9) {
            return k;
        }
    }
    throw std::logic_error("read_definite_factor: outcome is not deterministic");
}

} // namespace

std::array<int, 2> double_extraction(const IdealProtocolModel &model, std::size_t i,
                                     const SwitchUnitary &sw) {
    if (sw.j1 != 0 || sw.j2 != 1) {
        throw std::invalid_argument("double_extraction: expects the 0->1 switch");
    }
    const std::vector<std::size_t> dims = {model.alice_dim, model.bob_input_dim,
                                           model.bob_output_dim, model.mirror_dim};
    Vec state = model.run(i, 0);
    const int m0 = static_cast<int>(read_definite_factor(state, dims, 2));
    const Mat lifted = tensor(Mat::identity(model.alice_dim), sw.u);
    state = mul(lifted, state);
    const int m1 = static_cast<int>(read_definite_factor(state, dims, 2));
    return {m0, m1};
}

std::string DependenceReport::to_text() const {
    std::ostringstream os;
    os << "sessions=" << sessions << "\n";
    os << "parity_diff_sessions=" << parity_diff_sessions << "\n";
    os << "nonconstant_records=" << nonconstant_records << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", entangling_joint_rate);
    os << "entangling_joint_rate=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.9g", honest_joint_rate);
    os << "honest_joint_rate=" << buf << "\n";
    os << "infeasible_retries=" << infeasible_retries << "\n";
    return os.str();
}

DependenceReport bcqot_dependence_check(const ProtocolConfig &config, std::size_t sessions,
                                        std::uint64_t master_seed) {
    if (config.variant != Variant::OneOfTwo) {
        throw std::invalid_argument("bcqot_dependence_check: needs the one-of-two variant");
    }
    DependenceReport report;
    report.sessions = sessions;

    std::size_t honest_joint = 0;
    std::size_t cheat_joint = 0;
    for (std::size_t t = 0; t < sessions; ++t) {
        // Structural record: would the announcements have been the same
        // under the swapped subset labeling?
        const SessionResult honest = run_session_with_retry(
            config, BobStrategy::Honest, master_seed, 2 * t, 0, &report.infeasible_retries);
        const auto &subsets = std::get<SubsetsAnnounce>(honest.transcript.messages.at(5));
        const auto &fin = std::get<Final12>(honest.transcript.messages.at(6));
        const int parity0 = xor_bits(honest.alice_key, subsets.j0);
        const int parity1 = xor_bits(honest.alice_key, subsets.j1);
        const int beta0_swapped = honest.alice_pair[0] ^ parity1;
        const int beta1_swapped = honest.alice_pair[1] ^ parity0;
        if (parity0 != parity1) {
            ++report.parity_diff_sessions;
            if (beta0_swapped != fin.beta0 || beta1_swapped != fin.beta1) {
                ++report.nonconstant_records;
            }
        }
        if (honest.match && honest.untargeted_match) {
            ++honest_joint;
        }

        const SessionResult cheat = run_session_with_retry(
            config, BobStrategy::Entangling, master_seed, 2 * t + 1, 0, &report.infeasible_retries);
        if (cheat.match && cheat.untargeted_match) {
            ++cheat_joint;
        }
    }
    report.honest_joint_rate = static_cast<double>(honest_joint) / static_cast<double>(sessions);
    report.entangling_joint_rate = static_cast<double>(cheat_joint) / static_cast<double>(sessions);
    return report;
}

} // namespace qot
