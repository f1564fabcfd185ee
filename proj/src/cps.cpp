#include "z2metts/cps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace z2metts {

char basis_char(Basis b) {
    switch (b) {
        case Basis::X: return 'x';
        case Basis::Y: return 'y';
        default: return 'z';
    }
}

Basis parse_basis(char c) {
    switch (c) {
        case 'x': case 'X': return Basis::X;
        case 'y': case 'Y': return Basis::Y;
        case 'z': case 'Z': return Basis::Z;
        default: throw std::invalid_argument(std::string("cps: unknown basis '") + c + "'");
    }
}

ClassicalProductState ClassicalProductState::uniform(int n_sites, Basis b, uint32_t bits) {
    ClassicalProductState cps;
    cps.bases.assign(n_sites, b);
    cps.outcomes.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) cps.outcomes[i] = (bits >> (n_sites - 1 - i)) & 1u;
    return cps;
}

std::string ClassicalProductState::label() const {
    std::string out;
    const bool uniform =
        std::all_of(bases.begin(), bases.end(), [&](Basis b) { return b == bases.front(); });
    if (uniform) {
        out += basis_char(bases.front());
    } else {
        for (Basis b : bases) out += basis_char(b);
    }
    out += ':';
    for (uint8_t o : outcomes) out += char('0' + o);
    return out;
}

ClassicalProductState random_cps(int n_sites, Basis b, Rng& rng) {
    ClassicalProductState cps;
    cps.bases.assign(n_sites, b);
    cps.outcomes.resize(n_sites);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < n_sites; ++i) cps.outcomes[i] = static_cast<uint8_t>(bit(rng));
    return cps;
}

Statevector cps_to_state(const ClassicalProductState& cps) {
    const int n = cps.n_sites();
    if (n == 0 || static_cast<int>(cps.outcomes.size()) != n)
        throw std::invalid_argument("cps: inconsistent site count");
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd v(1);
    v[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        cplx a0, a1;
        const bool minus = cps.outcomes[i] != 0;
        switch (cps.bases[i]) {
            case Basis::Z:
                a0 = minus ? 0.0 : 1.0;
                a1 = minus ? 1.0 : 0.0;
                break;
            case Basis::X:
                a0 = r;
                a1 = minus ? -r : r;
                break;
            case Basis::Y:
                a0 = r;
                a1 = minus ? cplx(0, -r) : cplx(0, r);
                break;
        }
        // site i becomes the new least significant bit, so site 0 stays MSB
        Eigen::VectorXcd next(v.size() * 2);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            next[2 * k] = a0 * v[k];
            next[2 * k + 1] = a1 * v[k];
        }
        v.swap(next);
    }
    return Statevector(n, std::move(v));
}

namespace {

PauliString basis_pauli(Basis b, int site, int n) {
    switch (b) {
        case Basis::X: return PauliString::x(site, n);
        case Basis::Y: return PauliString::y(site, n);
        default: return PauliString::z(site, n);
    }
}

}  // namespace

std::pair<ClassicalProductState, double> collapse(const Statevector& state,
                                                  const std::vector<Basis>& bases, Rng& rng) {
    const int n = state.n_sites;
    if (static_cast<int>(bases.size()) != n)
        throw std::invalid_argument("cps: collapse basis list size mismatch");
    if (std::abs(state.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("cps: collapse of unnormalized state");

    Statevector psi = state;
    ClassicalProductState cps;
    cps.bases = bases;
    cps.outcomes.resize(n);
    double prob = 1.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int s = 0; s < n; ++s) {
        const Statevector bpsi = apply(basis_pauli(bases[s], s, n), psi);
        const double expect = std::clamp(inner(psi, bpsi).real(), -1.0, 1.0);
        const double p0 = 0.5 * (1.0 + expect);
        const double u = uni(rng);
        const int outcome = (u < p0) ? 0 : 1;
        const double p = (outcome == 0) ? p0 : 1.0 - p0;
        cps.outcomes[s] = static_cast<uint8_t>(outcome);
        prob *= p;
        const double sign = (outcome == 0) ? 1.0 : -1.0;
        psi.amps = 0.5 * (psi.amps + sign * bpsi.amps);
        const double nrm = psi.norm();
        if (nrm < 1e-154) throw std::runtime_error("cps: collapse hit a zero-probability branch");
        psi.amps /= nrm;
    }
    return {cps, prob};
}

std::pair<ClassicalProductState, double> collapse(const Statevector& state, Basis basis,
                                                  Rng& rng) {
    return collapse(state, std::vector<Basis>(state.n_sites, basis), rng);
}

std::vector<uint32_t> sample_bitstrings(const Statevector& state, int shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("cps: shots must be >= 1");
    const Eigen::Index dim = state.dim();
    std::vector<double> cdf(dim);
    double run = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
        run += std::norm(state.amps[j]);
        cdf[j] = run;
    }
    std::uniform_real_distribution<double> uni(0.0, run);
    std::vector<uint32_t> out(shots);
    for (int k = 0; k < shots; ++k) {
        const double u = uni(rng);
        out[k] = static_cast<uint32_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    return out;
}

std::string bitstring_to_string(uint32_t bits, int n_sites) {
    std::string s(n_sites, '0');
    for (int i = 0; i < n_sites; ++i)
        if ((bits >> (n_sites - 1 - i)) & 1u) s[i] = '1';
    return s;
}

}  // namespace z2metts
