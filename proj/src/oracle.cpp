#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adversary.hpp"

namespace qot {

DenseSim::DenseSim(std::size_t dim_limit) : dim_limit_(dim_limit) {
    state_ = Vec{cplx{1.0, 0.0}};
}

std::size_t DenseSim::pos_of(RegisterId reg) const {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (regs_[i].id == reg) {
            return i;
        }
    }
    throw std::invalid_argument("DenseSim: unknown register");
}

std::size_t DenseSim::stride_of(std::size_t pos) const {
    std::size_t s = 1;
    for (std::size_t i = regs_.size(); i-- > pos + 1;) {
        s *= regs_[i].dim;
    }
    return s;
}

void DenseSim::add_register(RegisterId id, const Vec &init) {
    if (state_.dim() * init.dim() > dim_limit_) {
        throw std::runtime_error("DenseSim: dimension limit exceeded");
    }
    state_ = tensor(state_, init);
    regs_.push_back(Entry{id, init.dim()});
}

void DenseSim::apply(std::span<const RegisterId> regs, const Mat &u) {
    std::vector<std::size_t> tpos, tdims, tstrides;
    std::size_t gdim = 1;
    for (RegisterId r : regs) {
        const std::size_t p = pos_of(r);
        tpos.push_back(p);
        tdims.push_back(regs_[p].dim);
        tstrides.push_back(stride_of(p));
        gdim *= regs_[p].dim;
    }
    if (u.rows() != gdim || u.cols() != gdim) {
        throw std::invalid_argument("DenseSim: operator dims mismatch");
    }

    std::vector<std::size_t> toffset(gdim);
    for (std::size_t t = 0; t < gdim; ++t) {
        std::size_t rem = t, off = 0;
        for (std::size_t i = tpos.size(); i-- > 0;) {
            off += (rem % tdims[i]) * tstrides[i];
            rem /= tdims[i];
        }
        toffset[t] = off;
    }

    // Everything that isn't a target: iterate with a mixed-radix
    // counter, maintaining the flat offset incrementally.
    std::vector<std::size_t> rdims, rstrides;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (std::find(tpos.begin(), tpos.end(), i) == tpos.end()) {
            rdims.push_back(regs_[i].dim);
            rstrides.push_back(stride_of(i));
        }
    }
    std::size_t rest_total = 1;
    for (std::size_t d : rdims) {
        rest_total *= d;
    }

    std::vector<cplx> column(gdim), result(gdim);
    std::vector<std::size_t> digits(rdims.size(), 0);
    std::size_t base = 0;
    for (std::size_t r = 0; r < rest_total; ++r) {
        for (std::size_t t = 0; t < gdim; ++t) {
            column[t] = state_[base + toffset[t]];
        }
        for (std::size_t to = 0; to < gdim; ++to) {
            cplx s{0.0, 0.0};
            for (std::size_t ti = 0; ti < gdim; ++ti) {
                s += u(to, ti) * column[ti];
            }
            result[to] = s;
        }
        for (std::size_t to = 0; to < gdim; ++to) {
            state_[base + toffset[to]] = result[to];
        }
        for (std::size_t d = rdims.size(); d-- > 0;) {
            base += rstrides[d];
            if (++digits[d] < rdims[d]) {
                break;
            }
            base -= rstrides[d] * rdims[d];
            digits[d] = 0;
        }
    }
}

double DenseSim::marginal(RegisterId reg, std::size_t value) const {
    const std::size_t p = pos_of(reg);
    const std::size_t stride = stride_of(p);
    const std::size_t d = regs_[p].dim;
    if (value >= d) {
        throw std::invalid_argument("DenseSim: value out of range");
    }
    const std::size_t block = stride * d;
    double w = 0.0;
    for (std::size_t base = 0; base < state_.dim(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            w += std::norm(state_[base + value * stride + off]);
        }
    }
    return w;
}

double DenseSim::project(RegisterId reg, std::size_t value) {
    const double w = marginal(reg, value);
    if (w < 1e-300) {
        throw std::logic_error("DenseSim: projecting onto a zero-weight outcome");
    }
    const std::size_t p = pos_of(reg);
    const std::size_t stride = stride_of(p);
    const std::size_t d = regs_[p].dim;
    const std::size_t block = stride * d;
    const double scale = 1.0 / std::sqrt(w);
    for (std::size_t base = 0; base < state_.dim(); base += block) {
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t off = 0; off < stride; ++off) {
                cplx &z = state_[base + k * stride + off];
                z = k == value ? z * scale : cplx{0.0, 0.0};
            }
        }
    }
    return w;
}

void DenseSim::drop(RegisterId reg) {
    const std::size_t p = pos_of(reg);
    const std::size_t d = regs_[p].dim;
    std::size_t definite = d;
    for (std::size_t k = 0; k < d; ++k) {
        if (marginal(reg, k) > 1.0 - 1e-9) {
            definite = k;
            break;
        }
    }
    if (definite == d) {
        throw std::invalid_argument("DenseSim: dropping a non-definite register");
    }
    const std::size_t stride = stride_of(p);
    const std::size_t block = stride * d;
    Vec next(state_.dim() / d);
    std::size_t out = 0;
    for (std::size_t base = 0; base < state_.dim(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            next[out++] = state_[base + definite * stride + off];
        }
    }
    state_ = std::move(next);
    regs_.erase(regs_.begin() + static_cast<std::ptrdiff_t>(p));
}

std::vector<RegisterId> DenseSim::order() const {
    std::vector<RegisterId> out;
    out.reserve(regs_.size());
    for (const Entry &e : regs_) {
        out.push_back(e.id);
    }
    return out;
}

void DenseMirror::on_add_register(RegisterId id, const std::string &, const Vec &init) {
    sim_.add_register(id, init);
}

void DenseMirror::on_unitary(std::span<const RegisterId> regs, const Mat &u) {
    sim_.apply(regs, u);
}

void DenseMirror::on_controlled(RegisterId control, std::span<const RegisterId> targets,
                                std::span<const Mat> per_value) {
    const std::size_t cdim = per_value.size();
    const std::size_t tdim = per_value.front().rows();
    Mat block(cdim * tdim, cdim * tdim);
    for (std::size_t k = 0; k < cdim; ++k) {
        for (std::size_t a = 0; a < tdim; ++a) {
            for (std::size_t b = 0; b < tdim; ++b) {
                block(k * tdim + a, k * tdim + b) = per_value[k](a, b);
            }
        }
    }
    std::vector<RegisterId> regs;
    regs.push_back(control);
    regs.insert(regs.end(), targets.begin(), targets.end());
    sim_.apply(regs, block);
}

void DenseMirror::on_measure(RegisterId reg, std::size_t outcome, double probability) {
    const double w = sim_.marginal(reg, outcome);
    max_dev_ = std::max(max_dev_, std::abs(w - probability));
    sim_.project(reg, outcome);
}

void DenseMirror::on_drop(RegisterId reg, std::size_t) { sim_.drop(reg); }

double DenseMirror::fidelity_against(const BranchedState &branched) const {
    const std::vector<RegisterId> order = sim_.order();
    const Vec expanded = branched.to_dense(order);
    return std::abs(inner(sim_.vector(), expanded));
}

DenseEffective dense_effective_state(const DenseSim &sim, RegisterId switch_reg,
                                     std::span<const RegisterId> parity_regs,
                                     int good_switch_value, int beta) {
    DenseSim work = sim;
    std::uint32_t fresh = 0;
    for (RegisterId r : work.order()) {
        fresh = std::max(fresh, r.value + 1);
    }
    const RegisterId parity{fresh};
    work.add_register(parity, Vec::basis(2, 0));
    for (RegisterId h : parity_regs) {
        const RegisterId pair[] = {h, parity};
        work.apply(pair, cnot_gate());
    }

    DenseEffective out;
    out.good_weight = work.marginal(switch_reg, static_cast<std::size_t>(good_switch_value));
    out.fail_weight = 1.0 - out.good_weight;

    work.project(switch_reg, static_cast<std::size_t>(good_switch_value));
    const double p1 = work.marginal(parity, 1);
    if (p1 > 1.0 - 1e-9 || p1 < 1e-9) {
        out.parity_deterministic = true;
        const int parity_val = p1 > 0.5 ? 1 : 0;
        out.good_value = beta ^ parity_val;
    }
    return out;
}

} // namespace qot
