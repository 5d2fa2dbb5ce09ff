#include "registers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qot {

BranchedState::BranchedState(std::size_t branch_cap, std::size_t dense_cap)
    : branch_cap_(branch_cap), dense_cap_(dense_cap) {
    Branch root;
    root.amp = cplx{1.0, 0.0};
    branches_.push_back(std::move(root));
}

std::size_t BranchedState::reg_index(RegisterId reg) const {
    if (reg.value >= registry_.size()) {
        throw std::invalid_argument("unknown register handle");
    }
    return reg.value;
}

void BranchedState::check_live(RegisterId reg, const char *op) const {
    if (reg.value >= registry_.size() || !registry_[reg.value].live) {
        throw std::invalid_argument(std::string(op) + ": register not live");
    }
}

RegisterId BranchedState::add_register(const std::string &label, Vec init) {
    if (init.dim() == 0) {
        throw std::invalid_argument("add_register: empty initial state");
    }
    if (!init.is_normalized(1e-9)) {
        throw std::invalid_argument("add_register: initial state not normalized");
    }
    for (const RegisterInfo &info : registry_) {
        if (info.live && info.label == label) {
            throw std::invalid_argument("add_register: duplicate label " + label);
        }
    }
    RegisterInfo info;
    info.label = label;
    info.dim = init.dim();
    info.live = true;
    registry_.push_back(info);
    const RegisterId id{static_cast<std::uint32_t>(registry_.size() - 1)};

    for (Branch &br : branches_) {
        Factor f;
        f.regs = {id.value};
        f.state = init;
        br.factors.push_back(std::move(f));
        sort_factors(br);
    }
    if (observer_ != nullptr) {
        observer_->on_add_register(id, label, init);
    }
    return id;
}

bool BranchedState::is_live(RegisterId reg) const {
    return reg.value < registry_.size() && registry_[reg.value].live;
}

std::size_t BranchedState::register_dim(RegisterId reg) const {
    return registry_[reg_index(reg)].dim;
}

const std::string &BranchedState::register_label(RegisterId reg) const {
    return registry_[reg_index(reg)].label;
}

std::optional<RegisterId> BranchedState::find_register(const std::string &label) const {
    for (std::uint32_t i = 0; i < registry_.size(); ++i) {
        if (registry_[i].live && registry_[i].label == label) {
            return RegisterId{i};
        }
    }
    return std::nullopt;
}

std::vector<RegisterId> BranchedState::live_registers() const {
    std::vector<RegisterId> out;
    for (std::uint32_t i = 0; i < registry_.size(); ++i) {
        if (registry_[i].live) {
            out.push_back(RegisterId{i});
        }
    }
    return out;
}

void BranchedState::sort_factors(Branch &br) const {
    std::sort(br.factors.begin(), br.factors.end(),
              [](const Factor &a, const Factor &b) { return a.regs.front() < b.regs.front(); });
}

std::size_t BranchedState::factor_pos(const Branch &br, std::uint32_t reg) const {
    for (std::size_t i = 0; i < br.factors.size(); ++i) {
        const Factor &f = br.factors[i];
        if (std::find(f.regs.begin(), f.regs.end(), reg) != f.regs.end()) {
            return i;
        }
    }
    throw std::logic_error("register missing from branch factorization");
}

BranchedState::Factor &BranchedState::factor_of(Branch &br, std::uint32_t reg) {
    return br.factors[factor_pos(br, reg)];
}

const BranchedState::Factor &BranchedState::factor_of(const Branch &br, std::uint32_t reg) const {
    return br.factors[factor_pos(br, reg)];
}

BranchedState::Factor &BranchedState::merge_factors(Branch &br, std::span<const RegisterId> regs) {
    std::vector<std::size_t> positions;
    for (RegisterId r : regs) {
        const std::size_t p = factor_pos(br, r.value);
        if (std::find(positions.begin(), positions.end(), p) == positions.end()) {
            positions.push_back(p);
        }
    }
    if (positions.size() == 1) {
        return br.factors[positions.front()];
    }

    std::vector<std::uint32_t> merged_regs;
    for (std::size_t p : positions) {
        merged_regs.insert(merged_regs.end(), br.factors[p].regs.begin(), br.factors[p].regs.end());
    }
    std::sort(merged_regs.begin(), merged_regs.end());

    std::vector<std::size_t> merged_dims(merged_regs.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < merged_regs.size(); ++i) {
        merged_dims[i] = registry_[merged_regs[i]].dim;
        total *= merged_dims[i];
    }
    if (total > dense_cap_) {
        throw std::runtime_error("merge_factors: factor dimension exceeds dense cap");
    }

    // Position of each source register inside the merged digit list.
    auto digit_pos = [&](std::uint32_t reg) {
        return static_cast<std::size_t>(
            std::find(merged_regs.begin(), merged_regs.end(), reg) - merged_regs.begin());
    };
    struct Source {
        const Factor *factor;
        std::vector<std::size_t> digit_positions;
        std::vector<std::size_t> strides;
    };
    std::vector<Source> sources;
    for (std::size_t p : positions) {
        const Factor &f = br.factors[p];
        Source src;
        src.factor = &f;
        src.digit_positions.reserve(f.regs.size());
        for (std::uint32_t r : f.regs) {
            src.digit_positions.push_back(digit_pos(r));
        }
        src.strides.assign(f.regs.size(), 1);
        for (std::size_t i = f.regs.size(); i-- > 1;) {
            src.strides[i - 1] = src.strides[i] * registry_[f.regs[i]].dim;
        }
        sources.push_back(std::move(src));
    }

    Vec merged(total);
    std::vector<std::size_t> digits(merged_regs.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        cplx prod{1.0, 0.0};
        for (const Source &src : sources) {
            std::size_t fflat = 0;
            for (std::size_t i = 0; i < src.digit_positions.size(); ++i) {
                fflat += digits[src.digit_positions[i]] * src.strides[i];
            }
            prod *= src.factor->state[fflat];
        }
        merged[flat] = prod;
        // mixed-radix increment
        for (std::size_t d = merged_regs.size(); d-- > 0;) {
            if (++digits[d] < merged_dims[d]) {
                break;
            }
            digits[d] = 0;
        }
    }

    // Remove the old factors (descending positions) and insert the merge.
    std::sort(positions.begin(), positions.end(), std::greater<>());
    for (std::size_t p : positions) {
        br.factors.erase(br.factors.begin() + static_cast<std::ptrdiff_t>(p));
    }
    Factor out;
    out.regs = std::move(merged_regs);
    out.state = std::move(merged);
    br.factors.push_back(std::move(out));
    sort_factors(br);
    return factor_of(br, regs.front().value);
}

void BranchedState::apply_on_factor(Factor &f, std::span<const RegisterId> targets,
                                    const Mat &u) const {
    const std::size_t total = f.state.dim();
    std::vector<std::size_t> dims(f.regs.size());
    for (std::size_t i = 0; i < f.regs.size(); ++i) {
        dims[i] = registry_[f.regs[i]].dim;
    }

    std::vector<std::size_t> tpos; // target digit positions, caller order
    for (RegisterId r : targets) {
        const auto it = std::find(f.regs.begin(), f.regs.end(), r.value);
        if (it == f.regs.end()) {
            throw std::logic_error("apply_on_factor: target not in factor");
        }
        tpos.push_back(static_cast<std::size_t>(it - f.regs.begin()));
    }

    std::size_t gdim = 1;
    for (std::size_t p : tpos) {
        gdim *= dims[p];
    }
    const std::size_t rest_dim = total / gdim;

    // fidx[t * rest_dim + r] = flat factor index with target digits t
    // (caller order) and remaining digits r (factor order).
    std::vector<std::size_t> fidx(total);
    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t t = 0;
        for (std::size_t p : tpos) {
            t = t * dims[p] + digits[p];
        }
        std::size_t r = 0;
        for (std::size_t d = 0; d < dims.size(); ++d) {
            if (std::find(tpos.begin(), tpos.end(), d) == tpos.end()) {
                r = r * dims[d] + digits[d];
            }
        }
        fidx[t * rest_dim + r] = flat;
        for (std::size_t d = dims.size(); d-- > 0;) {
            if (++digits[d] < dims[d]) {
                break;
            }
            digits[d] = 0;
        }
    }

    Vec out(total);
    std::vector<cplx> column(gdim);
    for (std::size_t r = 0; r < rest_dim; ++r) {
        for (std::size_t t = 0; t < gdim; ++t) {
            column[t] = f.state[fidx[t * rest_dim + r]];
        }
        for (std::size_t to = 0; to < gdim; ++to) {
            cplx s{0.0, 0.0};
            for (std::size_t ti = 0; ti < gdim; ++ti) {
                s += u(to, ti) * column[ti];
            }
            out[fidx[to * rest_dim + r]] = s;
        }
    }
    f.state = std::move(out);
}

void BranchedState::check_not_branch_marker(RegisterId reg, const char *op) const {
    if (branches_.size() <= 1) {
        return;
    }
    std::optional<std::size_t> first = branch_register_value(0, reg);
    if (!first.has_value()) {
        return;
    }
    for (std::size_t b = 1; b < branches_.size(); ++b) {
        const std::optional<std::size_t> v = branch_register_value(b, reg);
        if (v.has_value() && *v != *first) {
            throw std::invalid_argument(std::string(op) +
                                        ": register distinguishes branches; mixing it would break "
                                        "branch orthogonality (measure it instead)");
        }
    }
}

void BranchedState::apply_unitary(std::span<const RegisterId> regs, const Mat &u) {
    std::size_t dim = 1;
    for (RegisterId r : regs) {
        check_live(r, "apply_unitary");
        check_not_branch_marker(r, "apply_unitary");
        dim *= register_dim(r);
    }
    if (u.rows() != dim || u.cols() != dim) {
        throw std::invalid_argument("apply_unitary: operator does not match register dims");
    }
    if (!is_unitary(u)) {
        throw std::invalid_argument("apply_unitary: operator is not unitary");
    }
    for (Branch &br : branches_) {
        Factor &f = merge_factors(br, regs);
        apply_on_factor(f, regs, u);
    }
    if (observer_ != nullptr) {
        observer_->on_unitary(regs, u);
    }
}

double BranchedState::component_weight(const Branch &br, std::uint32_t reg, std::size_t k) const {
    const Factor &f = factor_of(br, reg);
    const auto it = std::find(f.regs.begin(), f.regs.end(), reg);
    const std::size_t pos = static_cast<std::size_t>(it - f.regs.begin());

    std::size_t stride = 1;
    for (std::size_t i = f.regs.size(); i-- > pos + 1;) {
        stride *= registry_[f.regs[i]].dim;
    }
    const std::size_t dim = registry_[reg].dim;
    const std::size_t block = stride * dim;

    double w = 0.0;
    for (std::size_t base = 0; base < f.state.dim(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            w += std::norm(f.state[base + k * stride + off]);
        }
    }
    return w;
}

double BranchedState::project_register(Branch &br, std::uint32_t reg, std::size_t k) {
    const std::size_t fpos = factor_pos(br, reg);
    Factor f = std::move(br.factors[fpos]);
    br.factors.erase(br.factors.begin() + static_cast<std::ptrdiff_t>(fpos));

    const auto it = std::find(f.regs.begin(), f.regs.end(), reg);
    const std::size_t pos = static_cast<std::size_t>(it - f.regs.begin());
    std::size_t stride = 1;
    for (std::size_t i = f.regs.size(); i-- > pos + 1;) {
        stride *= registry_[f.regs[i]].dim;
    }
    const std::size_t dim = registry_[reg].dim;
    const std::size_t block = stride * dim;

    if (f.regs.size() == 1) {
        const cplx c = f.state[k];
        const double w = std::norm(c);
        if (w <= 0.0) {
            throw std::logic_error("project_register: zero-weight component");
        }
        br.amp *= c;
        Factor alone;
        alone.regs = {reg};
        alone.state = Vec::basis(dim, k);
        br.factors.push_back(std::move(alone));
        sort_factors(br);
        return w;
    }

    Vec rest(f.state.dim() / dim);
    std::size_t out = 0;
    double w = 0.0;
    for (std::size_t base = 0; base < f.state.dim(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            const cplx z = f.state[base + k * stride + off];
            rest[out++] = z;
            w += std::norm(z);
        }
    }
    if (w <= 0.0) {
        throw std::logic_error("project_register: zero-weight component");
    }
    const double inv = 1.0 / std::sqrt(w);
    rest *= cplx{inv, 0.0};
    br.amp *= std::sqrt(w);

    Factor restf;
    restf.regs = f.regs;
    restf.regs.erase(restf.regs.begin() + static_cast<std::ptrdiff_t>(pos));
    restf.state = std::move(rest);
    br.factors.push_back(std::move(restf));

    Factor alone;
    alone.regs = {reg};
    alone.state = Vec::basis(dim, k);
    br.factors.push_back(std::move(alone));
    sort_factors(br);
    return w;
}

void BranchedState::apply_controlled(RegisterId control, std::span<const RegisterId> targets,
                                     std::span<const Mat> per_value) {
    check_live(control, "apply_controlled");
    const std::size_t cdim = register_dim(control);
    if (per_value.size() != cdim) {
        throw std::invalid_argument("apply_controlled: need one operator per control value");
    }
    std::size_t tdim = 1;
    for (RegisterId r : targets) {
        check_live(r, "apply_controlled");
        check_not_branch_marker(r, "apply_controlled");
        tdim *= register_dim(r);
    }
    for (const Mat &u : per_value) {
        if (u.rows() != tdim || u.cols() != tdim) {
            throw std::invalid_argument("apply_controlled: operator dims mismatch");
        }
        if (!is_unitary(u)) {
            throw std::invalid_argument("apply_controlled: operator is not unitary");
        }
    }

    std::vector<Branch> next;
    next.reserve(branches_.size());
    for (Branch &br : branches_) {
        // Definite control: plain conditional application.
        std::optional<std::size_t> definite;
        for (std::size_t k = 0; k < cdim; ++k) {
            if (component_weight(br, control.value, k) > 1.0 - 1e-12) {
                definite = k;
                break;
            }
        }
        if (definite.has_value()) {
            Factor &f = merge_factors(br, targets);
            apply_on_factor(f, targets, per_value[*definite]);
            next.push_back(std::move(br));
            continue;
        }
        // Split along the control basis, then apply per value.
        for (std::size_t k = 0; k < cdim; ++k) {
            const double w = component_weight(br, control.value, k);
            if (w < 1e-24) {
                continue;
            }
            Branch child = br;
            project_register(child, control.value, k);
            Factor &f = merge_factors(child, targets);
            apply_on_factor(f, targets, per_value[k]);
            next.push_back(std::move(child));
        }
    }
    if (next.size() > branch_cap_) {
        throw std::runtime_error("apply_controlled: branch cap exceeded");
    }
    branches_ = std::move(next);
    if (observer_ != nullptr) {
        observer_->on_controlled(control, targets, per_value);
    }
}

MeasurementRecord BranchedState::measure(RegisterId reg, Rng &rng) {
    check_live(reg, "measure");
    const std::size_t dim = register_dim(reg);

    std::vector<double> p(dim, 0.0);
    for (const Branch &br : branches_) {
        const double bw = std::norm(br.amp);
        for (std::size_t k = 0; k < dim; ++k) {
            p[k] += bw * component_weight(br, reg.value, k);
        }
    }
    double total = 0.0;
    for (double v : p) {
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-8) {
        throw std::logic_error("measure: state weight drifted from 1");
    }

    const double u = rng.uniform() * total;
    std::size_t outcome = dim - 1;
    double cum = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        cum += p[k];
        if (u < cum) {
            outcome = k;
            break;
        }
    }

    const double inv_sqrt_p = 1.0 / std::sqrt(p[outcome]);
    std::vector<Branch> kept;
    kept.reserve(branches_.size());
    for (Branch &br : branches_) {
        const double w = component_weight(br, reg.value, outcome);
        if (w < 1e-24) {
            continue;
        }
        project_register(br, reg.value, outcome);
        br.amp *= inv_sqrt_p;
        kept.push_back(std::move(br));
    }
    if (kept.empty()) {
        throw std::logic_error("measure: all branches inconsistent with outcome");
    }
    branches_ = std::move(kept);

    if (observer_ != nullptr) {
        observer_->on_measure(reg, outcome, p[outcome]);
    }
    return MeasurementRecord{reg, outcome, p[outcome]};
}

void BranchedState::drop(RegisterId reg) {
    check_live(reg, "drop");
    const std::optional<std::size_t> value = definite_value(reg);
    if (!value.has_value()) {
        throw std::invalid_argument("drop: register is not in a shared definite basis state");
    }
    for (Branch &br : branches_) {
        project_register(br, reg.value, *value);
        const std::size_t fpos = factor_pos(br, reg.value);
        br.factors.erase(br.factors.begin() + static_cast<std::ptrdiff_t>(fpos));
    }
    registry_[reg.value].live = false;
    if (observer_ != nullptr) {
        observer_->on_drop(reg, *value);
    }
}

std::optional<std::size_t> BranchedState::branch_register_value(std::size_t branch,
                                                                RegisterId reg) const {
    check_live(reg, "branch_register_value");
    const std::size_t dim = register_dim(reg);
    for (std::size_t k = 0; k < dim; ++k) {
        if (component_weight(branches_[branch], reg.value, k) > 1.0 - 1e-9) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> BranchedState::definite_value(RegisterId reg) const {
    std::optional<std::size_t> shared;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const std::optional<std::size_t> v = branch_register_value(b, reg);
        if (!v.has_value()) {
            return std::nullopt;
        }
        if (shared.has_value() && *shared != *v) {
            return std::nullopt;
        }
        shared = v;
    }
    return shared;
}

double BranchedState::total_weight() const {
    double s = 0.0;
    for (const Branch &br : branches_) {
        s += std::norm(br.amp);
    }
    return s;
}

cplx BranchedState::branch_overlap(const BranchedState &x, std::size_t bx, const BranchedState &y,
                                   std::size_t by) {
    const Branch &a = x.branches_[bx];
    const Branch &b = y.branches_[by];
    if (a.factors.size() != b.factors.size()) {
        throw std::invalid_argument("branch_overlap: factor partitions differ");
    }
    cplx prod = std::conj(a.amp) * b.amp;
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
        if (a.factors[i].regs != b.factors[i].regs) {
            throw std::invalid_argument("branch_overlap: factor partitions differ");
        }
        prod *= inner(a.factors[i].state, b.factors[i].state);
    }
    return prod;
}

Vec BranchedState::to_dense(std::span<const RegisterId> order) const {
    const std::vector<RegisterId> live = live_registers();
    if (order.size() != live.size()) {
        throw std::invalid_argument("to_dense: order must cover all live registers");
    }
    std::vector<bool> seen(registry_.size(), false);
    std::size_t total = 1;
    for (RegisterId r : order) {
        check_live(r, "to_dense");
        if (seen[r.value]) {
            throw std::invalid_argument("to_dense: duplicate register in order");
        }
        seen[r.value] = true;
        total *= register_dim(r);
        if (total > dense_cap_) {
            throw std::runtime_error("to_dense: dimension exceeds dense cap");
        }
    }

    // Target strides per register id.
    std::vector<std::size_t> tstride(registry_.size(), 0);
    {
        std::size_t s = 1;
        for (std::size_t i = order.size(); i-- > 0;) {
            tstride[order[i].value] = s;
            s *= register_dim(order[i]);
        }
    }

    Vec out(total);
    for (const Branch &br : branches_) {
        // Kronecker accumulation over the branch's own factor order.
        Vec acc{cplx{1.0, 0.0}};
        std::vector<std::uint32_t> acc_regs;
        for (const Factor &f : br.factors) {
            acc = tensor(acc, f.state);
            acc_regs.insert(acc_regs.end(), f.regs.begin(), f.regs.end());
        }
        // Scatter into the requested order via a mixed-radix counter.
        std::vector<std::size_t> dims(acc_regs.size());
        std::vector<std::size_t> contrib(acc_regs.size());
        for (std::size_t i = 0; i < acc_regs.size(); ++i) {
            dims[i] = registry_[acc_regs[i]].dim;
            contrib[i] = tstride[acc_regs[i]];
        }
        std::vector<std::size_t> digits(acc_regs.size(), 0);
        std::size_t tgt = 0;
        for (std::size_t flat = 0; flat < acc.dim(); ++flat) {
            out[tgt] += br.amp * acc[flat];
            for (std::size_t d = acc_regs.size(); d-- > 0;) {
                tgt += contrib[d];
                if (++digits[d] < dims[d]) {
                    break;
                }
                tgt -= contrib[d] * dims[d];
                digits[d] = 0;
            }
        }
    }

    if (std::abs(out.norm_sq() - 1.0) > 1e-9) {
        throw std::logic_error("to_dense: expanded state is not normalized");
    }
    return out;
}

std::string BranchedState::dump(int significant_digits) const {
    std::ostringstream os;
    os << "registers:\n";
    for (std::uint32_t i = 0; i < registry_.size(); ++i) {
        if (registry_[i].live) {
            os << "  " << i << " " << registry_[i].label << " dim=" << registry_[i].dim << "\n";
        }
    }
    os << "branches: " << branches_.size() << "\n";
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const Branch &br = branches_[b];
        os << "  branch " << b << " amp=" << format_cplx(br.amp, significant_digits) << "\n";
        for (const Factor &f : br.factors) {
            os << "    (";
            for (std::size_t i = 0; i < f.regs.size(); ++i) {
                os << (i > 0 ? "," : "") << registry_[f.regs[i]].label;
            }
            os << ") [";
            for (std::size_t i = 0; i < f.state.dim(); ++i) {
                os << (i > 0 ? ", " : "") << format_cplx(f.state[i], significant_digits);
            }
            os << "]\n";
        }
    }
    return os.str();
}

Vec prepare_bb84(int a, int g) {
    if ((a != 0 && a != 1) || (g != 0 && g != 1)) {
        throw std::invalid_argument("prepare_bb84: bits must be 0 or 1");
    }
    if (a == 0) {
        return Vec::basis(2, static_cast<std::size_t>(g));
    }
    const double inv = 1.0 / std::sqrt(2.0);
    Vec v(2);
    v[0] = cplx{inv, 0.0};
    v[1] = cplx{g == 0 ? inv : -inv, 0.0};
    return v;
}

} // namespace qot
