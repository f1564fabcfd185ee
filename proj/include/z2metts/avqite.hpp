#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "z2metts/cps.hpp"
#include "z2metts/model.hpp"
#include "z2metts/pauli.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

// |psi(theta)> = prod_j e^{-(i/2) theta_j G_j} |reference>, applied
// left-to-right in index order. Zero generators is a valid ansatz.
struct Ansatz {
    ClassicalProductState reference;
    std::vector<PauliString> generators;
    Eigen::VectorXd thetas;

    int n_params() const { return static_cast<int>(generators.size()); }
};

Statevector ansatz_state(const Ansatz& a);

// CNOT upper bound sum_j 2 (W_j - 1); weight-1 generators contribute 0.
long cnot_count(const Ansatz& a);

struct EomSolution {
    Eigen::VectorXd theta_dot;
    Eigen::MatrixXd metric;     // Fubini-Study metric g
    Eigen::VectorXd gradient;   // V
    double mclachlan_sq = 0.0;  // at the regularized theta_dot, clipped to >= 0
    double optimal_sq = 0.0;    // at the pseudo-inverse optimum; growth trigger
    double residual = 0.0;      // |g theta_dot - V|
};

struct AvqiteOptions {
    double step_cap = 0.02;   // fixed max_j |theta_dot_j| * dtau
    double dt_min = 1e-4;
    double dt_max = 0.1;
    double threshold = 1e-3;  // McLachlan distance trigger
    double tikhonov = 1e-6;
    bool prefer_low_weight_ties = true;
    double tie_tol = 1e-9;
    double min_improvement = 1e-12;
    std::string trace_path;  // JSON-lines per-step trace, appended if set
};

struct GrowthEvent {
    double tau = 0.0;
    PauliString generator;
};

struct EvolutionReport {
    int steps = 0;
    double final_mclachlan_sq = 0.0;
    std::vector<GrowthEvent> growth_events;
    int n_theta = 0;
    long n_cx = 0;
};

struct EvolutionResult {
    Ansatz ansatz;
    Statevector state;
    EvolutionReport report;
};

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Metric g_ij = Re[<d_i psi|d_j psi> + <psi|d_i psi><psi|d_j psi>] and
// gradient V_i = -Re[<d_i psi|H|psi>], with derivative states evaluated
// exactly by inserting -(i/2) G_j into the circuit.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> metric_and_gradient(const Ansatz& a,
                                                                const PauliSum& h_gc);

// Tikhonov-regularized solve (g + lambda I) theta_dot = V.
Eigen::VectorXd solve_eom(const Eigen::MatrixXd& g, const Eigen::VectorXd& v,
                          double lambda = 1e-6);

// L^2 = 2 (<H^2> - <H>^2 - sum_i V_i theta_dot_i), clipped to >= 0.
double mclachlan_sq(const Ansatz& a, const PauliSum& h_gc,
                    const Eigen::VectorXd& theta_dot);

// Append pool generators (theta = 0) until L^2 <= threshold; each candidate
// is scored by the L^2 reached after re-solving the EOM with it appended.
// Throws NonConvergenceError if the pool cannot reach the threshold.
std::pair<Ansatz, std::vector<PauliString>> grow(const Ansatz& a, const OperatorPool& pool,
                                                 const PauliSum& h_gc, double threshold,
                                                 const AvqiteOptions& opts = {});

// Full adaptive variational imaginary-time evolution of a CPS to tau_final,
// with variable time step dtau = step_cap / max_j |theta_dot_j| clamped to
// [dt_min, dt_max]; the last step lands exactly on tau_final.
EvolutionResult evolve(const ClassicalProductState& cps, const PauliSum& h_gc,
                       double tau_final, const OperatorPool& pool,
                       const AvqiteOptions& opts = {});

}  // namespace z2metts
