#include "z2metts/statevector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace z2metts {

namespace {

uint32_t to_index_space(uint32_t site_mask, int n) {
    uint32_t out = 0;
    while (site_mask) {
        const int i = std::countr_zero(site_mask);
        site_mask &= site_mask - 1;
        out |= 1u << (n - 1 - i);
    }
    return out;
}

void check_dims(const PauliSum& op, const Statevector& psi) {
    if (psi.dim() != (Eigen::Index(1) << op.n_sites()))
        throw std::invalid_argument("statevector: operator/state dimension mismatch");
}

inline double parity_sign(uint32_t bits) { return (std::popcount(bits) & 1) ? -1.0 : 1.0; }

constexpr cplx kIPow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

}  // namespace

Statevector Statevector::zero_state(int n_sites) {
    Statevector sv(n_sites, Eigen::VectorXcd::Zero(Eigen::Index(1) << n_sites));
    sv.amps[0] = 1.0;
    return sv;
}

IndexedTerm index_term(cplx coeff, const PauliString& s) {
    const int n = s.n_sites;
    IndexedTerm t;
    t.flip = to_index_space(s.x_mask, n);
    t.sign = to_index_space(s.z_mask, n);
    t.coeff = coeff * kIPow[std::popcount(s.x_mask & s.z_mask) & 3];
    return t;
}

Statevector apply(const PauliSum& op, const Statevector& psi) {
    check_dims(op, psi);
    std::vector<IndexedTerm> terms;
    terms.reserve(op.size());
    for (const auto& t : op.terms()) terms.push_back(index_term(t.coeff, t.string));

    const Eigen::Index dim = psi.dim();
    Statevector out(psi.n_sites, Eigen::VectorXcd(dim));
    const cplx* in = psi.amps.data();
    cplx* o = out.amps.data();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < dim; ++j) {
        cplx acc(0, 0);
        for (const auto& t : terms) {
            const uint32_t b = uint32_t(j) ^ t.flip;
            acc += t.coeff * parity_sign(b & t.sign) * in[b];
        }
        o[j] = acc;
    }
    return out;
}

Statevector apply_serial(const PauliSum& op, const Statevector& psi) {
    check_dims(op, psi);
    Statevector out(psi.n_sites, Eigen::VectorXcd::Zero(psi.dim()));
    for (const auto& t : op.terms()) accumulate_string(out.amps, t.coeff, t.string, psi.amps);
    return out;
}

Statevector apply(const PauliString& s, const Statevector& psi) {
    if (psi.dim() != (Eigen::Index(1) << s.n_sites))
        throw std::invalid_argument("statevector: operator/state dimension mismatch");
    Statevector out(psi.n_sites, Eigen::VectorXcd::Zero(psi.dim()));
    accumulate_string(out.amps, cplx(1, 0), s, psi.amps);
    return out;
}

void accumulate_string(Eigen::VectorXcd& out, cplx coeff, const PauliString& s,
                       const Eigen::VectorXcd& src) {
    const IndexedTerm t = index_term(coeff, s);
    const Eigen::Index dim = src.size();
    for (Eigen::Index b = 0; b < dim; ++b)
        out[Eigen::Index(uint32_t(b) ^ t.flip)] += t.coeff * parity_sign(uint32_t(b) & t.sign) * src[b];
}

cplx inner(const Statevector& a, const Statevector& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("statevector: inner dimension mismatch");
    return a.amps.dot(b.amps);  // conjugates the left argument
}

double expectation(const PauliSum& op, const Statevector& psi) {
    check_dims(op, psi);
    if (!op.is_hermitian())
        throw std::invalid_argument("statevector: expectation of non-Hermitian operator");
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("statevector: expectation of unnormalized state");
    cplx acc(0, 0);
    for (const auto& term : op.terms()) {
        const IndexedTerm t = index_term(term.coeff, term.string);
        const Eigen::Index dim = psi.dim();
        const cplx* a = psi.amps.data();
        cplx local(0, 0);
#pragma omp parallel
        {
            cplx mine(0, 0);
#pragma omp for schedule(static) nowait
            for (Eigen::Index b = 0; b < dim; ++b)
                mine += std::conj(a[uint32_t(b) ^ t.flip]) * parity_sign(uint32_t(b) & t.sign) * a[b];
#pragma omp critical
            local += mine;
        }
        acc += t.coeff * local;
    }
    if (std::abs(acc.imag()) >= 1e-10)
        throw std::runtime_error("statevector: expectation has non-negligible imaginary part");
    return acc.real();
}

double expectation(const PauliString& s, const Statevector& psi) {
    PauliSum op(s.n_sites);
    op.add(cplx(1, 0), s);
    return expectation(op, psi);
}

double fidelity(const Statevector& a, const Statevector& b) {
    return std::norm(inner(a, b));
}

}  // namespace z2metts
