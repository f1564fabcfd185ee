#pragma once

#include <vector>

#include "z2metts/cps.hpp"
#include "z2metts/pauli.hpp"

namespace z2metts {

// L fermion sites; the spin register has L+1 sites indexed 0..L.
// Spins 0 and L label the frozen boundary gauge links: H never flips them.
struct ModelParams {
    int L = 2;
    double h = 0.0;
    double mu = 0.0;

    int n_spins() const { return L + 1; }
    void validate() const;
};

// H = (1/4) sum_{i=1}^{L-1} (X_i - Z_{i-1} X_i Z_{i+1}) + h sum_{i=0}^{L} Z_i
PauliSum build_hamiltonian(const ModelParams& params);

// N = sum_{i=1}^{L} (I - Z_{i-1} Z_i)/2, the Ising domain-wall count.
PauliSum build_number_operator(int L);

// H - mu * N
PauliSum build_grand_canonical(const ModelParams& params);

// Per-site occupation n_i = (I - Z_{i-1} Z_i)/2, i in 1..L.
PauliSum build_site_occupation(int L, int i);

// Generators for adaptive ansatz growth, keyed by the CPS collapse basis.
// Ordering is deterministic: (weight, site tuple, letters).
struct OperatorPool {
    Basis basis_tag = Basis::Z;
    std::vector<PauliString> generators;
};

OperatorPool build_pool(Basis basis_tag, int L);

// Analytic grand-canonical reference for h = 0: open-chain hopping 1/2 gives
// single-particle energies eps_m = cos(m pi / (L+1)), m = 1..L.
struct FreeFermionPoint {
    double epsilon = 0.0;  // <H>/L
    double n = 0.0;        // <N>/L
};

FreeFermionPoint free_fermion_reference(int L, double beta, double mu);

}  // namespace z2metts
