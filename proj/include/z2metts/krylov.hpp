#pragma once

#include <functional>

#include "z2metts/cps.hpp"
#include "z2metts/pauli.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

// A METTS |phi_i> together with log P_i = log <i|e^{-beta(H-muN)}|i>,
// where beta = 2 tau.
struct MettsRecord {
    Statevector state;
    double logP = 0.0;
    ClassicalProductState source_cps;
};

struct KrylovOptions {
    int max_subspace = 30;
    double substep_tol = 1e-13;  // per-substep relative truncation estimate
    double initial_substep = 1.0;
};

// state <- normalized e^{-tau * gen} |psi0|, returns log of the norm of the
// unnormalized result (assumes |psi0| normalized). Lanczos propagation with
// adaptive substeps.
std::pair<Statevector, double> ite_propagate(const PauliSum& gen, const Statevector& psi0,
                                             double tau, const KrylovOptions& opts = {});

MettsRecord exact_ite(const ClassicalProductState& cps, const PauliSum& generator, double tau,
                      const KrylovOptions& opts = {});

// Lowest eigenvalue of a real symmetric operator given as a matvec,
// by Lanczos with full reorthogonalization.
double lanczos_lowest(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                      Eigen::Index dim, uint64_t seed = 12345, int max_iters = 400,
                      double tol = 1e-11);

}  // namespace z2metts
