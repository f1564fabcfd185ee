#pragma once

#include <string>
#include <vector>

#include "z2metts/avqite.hpp"
#include "z2metts/cps.hpp"
#include "z2metts/krylov.hpp"
#include "z2metts/model.hpp"
#include "z2metts/pauli.hpp"
#include "z2metts/rng.hpp"

namespace z2metts {

// Measurement basis per thermal step. Steps are 1-based; alternating
// schedules apply basis_odd at step 1 ("yz" means y first).
struct CollapseSchedule {
    Basis basis_odd = Basis::Z;
    Basis basis_even = Basis::Z;

    static CollapseSchedule fixed(Basis b) { return {b, b}; }
    static CollapseSchedule alternating(Basis odd, Basis even) { return {odd, even}; }
    // "z", "x", "y", "xz", "yz", ... (two letters = alternating, first is odd)
    static CollapseSchedule parse(const std::string& text);

    Basis at(int step) const { return (step % 2 == 1) ? basis_odd : basis_even; }
    bool is_fixed() const { return basis_odd == basis_even; }
    std::string label() const;
};

enum class BackendKind { Exact, Avqite };

struct WalkConfig {
    int s_w = 1;      // independent walks
    int s_0 = 1;      // kept (post-warmup) steps per walk
    int warmup = 10;  // discarded initial steps (1 is typical for the
                      // variational backend, 10 for the exact backend)
    CollapseSchedule schedule;
    uint64_t master_seed = 0;
    BackendKind backend = BackendKind::Exact;
    KrylovOptions krylov;
    AvqiteOptions avqite;

    int total_steps() const { return warmup + s_0; }
    void validate() const;
};

// Scalar observables plus optional per-site occupation and z-basis
// bitstring-sampling hooks, evaluated on every evolved state.
struct ObservableSet {
    std::vector<std::string> names;
    std::vector<PauliSum> ops;
    bool site_occupations = false;
    int bitstring_shots = 0;

    void add(std::string name, PauliSum op);
};

struct StepRecord {
    int walk = 0;
    int step = 0;  // 1-based
    bool kept = false;
    Basis collapse_basis = Basis::Z;  // basis used to produce the next CPS
    std::string source_cps;           // label of the CPS that was evolved
    double log_weight = 0.0;          // log <i|e^{-beta(H-muN)}|i> (exact backend)
    std::vector<double> values;       // aligned with ObservableSet::names
    std::vector<double> occupations;  // size L when enabled
    std::vector<std::string> bitstrings;
    long n_cx = 0;  // variational backend only
    int n_theta = 0;
};

struct SampleSet {
    ModelParams params;
    double beta = 0.0;
    WalkConfig config;
    std::vector<std::string> names;
    std::vector<StepRecord> records;  // ordered by (walk, step)

    std::vector<double> kept_values(const std::string& name) const;
    // walk, step, kept, collapse_basis, log_weight, observables, occupations
    void write_csv(const std::string& path) const;
};

// The Markov chain: per step, imaginary-time evolve the current CPS to
// tau = beta/2 with the configured backend, record observables on the
// evolved state, then collapse the full register in the scheduled basis to
// obtain the next CPS. Deterministic under (master_seed, walk, step).
SampleSet run_chain(const ModelParams& params, double beta, const WalkConfig& config,
                    const ObservableSet& observables);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

// Mean over kept records, stderr = sample stddev / sqrt(S), walks pooled.
Estimate estimate(const SampleSet& samples, const std::string& observable_name);

// Per-walk means treated as independent samples (autocorrelation guard).
Estimate estimate_blocked(const SampleSet& samples, const std::string& observable_name);

// Running mean over kept steps pooled across walks: entry k averages the
// first k+1 kept steps of every walk.
std::vector<Estimate> running_estimate(const SampleSet& samples,
                                       const std::string& observable_name);

}  // namespace z2metts
