#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "z2metts/model.hpp"
#include "z2metts/pauli.hpp"

namespace z2metts {

// Desk-scale guard for anything that materializes the full Hilbert space.
constexpr Eigen::Index kMaxDenseDim = Eigen::Index(1) << 17;

Eigen::MatrixXcd to_dense(const PauliSum& op);
// Throws if any term carries a Y or a complex coefficient.
Eigen::MatrixXd to_dense_real(const PauliSum& op);

// Tr(obs e^{-beta h_gc}) / Tr(e^{-beta h_gc}) by full dense diagonalization.
// Reference path, no caching; intended for small dimensions in tests.
double ed_thermal_dense(const PauliSum& obs, const PauliSum& h_gc, double beta);

// Exact thermal averages of H(L, h) - mu N, block-diagonalized by the
// conserved domain-wall number. The decomposition is independent of both
// beta and mu (mu only shifts sector energies), so one instance serves
// every (beta, mu) pair; per-observable eigenvector diagonals are memoized.
class ThermalEd {
public:
    ThermalEd(int L, double h);

    int L() const { return L_; }
    double h() const { return h_; }
    int n_spins() const { return L_ + 1; }

    // <obs>_{mu,beta}; obs must be Hermitian with real matrix elements.
    double average(const PauliSum& obs, double beta, double mu) const;
    // <n_i> for i = 1..L
    std::vector<double> site_profile(double beta, double mu) const;
    // min eigenvalue of H restricted to domain-wall sector k
    double sector_ground_energy(int k) const;
    // ground-state particle number of H - mu N (lower envelope over sectors)
    int ground_state_particle_number(double mu) const;

    // Process-wide cache, built once per (L, h) and then read-shared.
    static std::shared_ptr<const ThermalEd> shared(int L, double h);

private:
    struct Sector {
        int k = 0;
        std::vector<uint32_t> basis;  // global indices, ascending
        Eigen::VectorXd evals;
        Eigen::MatrixXd evecs;
    };

    std::vector<Eigen::VectorXd> observable_diagonals(const PauliSum& obs) const;

    int L_;
    double h_;
    std::vector<Sector> sectors_;
    std::vector<int32_t> local_index_;  // global index -> index within its sector
    std::vector<int8_t> sector_of_;     // global index -> domain-wall count
    mutable std::mutex memo_mutex_;
    mutable std::map<std::string, std::vector<Eigen::VectorXd>> diag_memo_;
};

// Domain-wall count of a basis index (site 0 = MSB convention).
int domain_wall_count(uint32_t index, int n_spins);

// Per-sector ground energies of H(L, h) via Lanczos; usable for system sizes
// where the full sector diagonalization is out of reach.
std::vector<double> sector_ground_energies(int L, double h);

}  // namespace z2metts
