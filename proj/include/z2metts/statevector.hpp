#pragma once

#include <Eigen/Dense>

#include "z2metts/pauli.hpp"

namespace z2metts {

// Normalized complex amplitude vector over n_sites spins.
// Basis ordering: site 0 is the most significant bit of the index.
struct Statevector {
    int n_sites = 0;
    Eigen::VectorXcd amps;

    Statevector() = default;
    Statevector(int n, Eigen::VectorXcd a) : n_sites(n), amps(std::move(a)) {}
    static Statevector zero_state(int n_sites);

    Eigen::Index dim() const { return amps.size(); }
    double norm() const { return amps.norm(); }
    void normalize() { amps /= amps.norm(); }
};

// Index-space view of a Pauli string, with the coefficient folded together
// with the i^(#Y) prefactor. Site i maps to index bit n_sites-1-i.
struct IndexedTerm {
    uint32_t flip = 0;   // x_mask in index space
    uint32_t sign = 0;   // z_mask in index space
    cplx coeff{0, 0};    // coeff * i^(#Y)
};

IndexedTerm index_term(cplx coeff, const PauliString& s);

// O|psi> (unnormalized). The parallel kernel writes each output amplitude
// exactly once; apply_serial is the term-major reference implementation.
Statevector apply(const PauliSum& op, const Statevector& psi);
Statevector apply_serial(const PauliSum& op, const Statevector& psi);
Statevector apply(const PauliString& s, const Statevector& psi);

// In-place psi += coeff * S|src| for a single string.
void accumulate_string(Eigen::VectorXcd& out, cplx coeff, const PauliString& s,
                       const Eigen::VectorXcd& src);

cplx inner(const Statevector& a, const Statevector& b);

// <psi|op|psi> for Hermitian op and normalized psi.
double expectation(const PauliSum& op, const Statevector& psi);
double expectation(const PauliString& s, const Statevector& psi);

// |<a|b>|^2
double fidelity(const Statevector& a, const Statevector& b);

}  // namespace z2metts
