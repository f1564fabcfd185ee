#include "z2metts/dense.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "z2metts/krylov.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

namespace {

Eigen::Index dense_dim(const PauliSum& op) {
    const Eigen::Index dim = Eigen::Index(1) << op.n_sites();
    if (dim > kMaxDenseDim) throw std::invalid_argument("dense: dimension guard exceeded");
    return dim;
}

void require_real_terms(const PauliSum& op, const char* who) {
    for (const auto& t : op.terms()) {
        if (t.string.x_mask & t.string.z_mask)
            throw std::invalid_argument(std::string(who) + ": operator carries Y terms");
        if (std::abs(t.coeff.imag()) > 1e-12)
            throw std::invalid_argument(std::string(who) + ": operator has complex coefficients");
    }
}

inline double parity_sign(uint32_t bits) { return (std::popcount(bits) & 1) ? -1.0 : 1.0; }

}  // namespace

Eigen::MatrixXcd to_dense(const PauliSum& op) {
    const Eigen::Index dim = dense_dim(op);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        const IndexedTerm it = index_term(t.coeff, t.string);
        for (Eigen::Index b = 0; b < dim; ++b)
            m(Eigen::Index(uint32_t(b) ^ it.flip), b) +=
                it.coeff * parity_sign(uint32_t(b) & it.sign);
    }
    return m;
}

Eigen::MatrixXd to_dense_real(const PauliSum& op) {
    require_real_terms(op, "dense");
    const Eigen::Index dim = dense_dim(op);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        const IndexedTerm it = index_term(t.coeff, t.string);
        for (Eigen::Index b = 0; b < dim; ++b)
            m(Eigen::Index(uint32_t(b) ^ it.flip), b) +=
                it.coeff.real() * parity_sign(uint32_t(b) & it.sign);
    }
    return m;
}

double ed_thermal_dense(const PauliSum& obs, const PauliSum& h_gc, double beta) {
    if (beta < 0) throw std::invalid_argument("dense: beta must be >= 0");
    if (obs.n_sites() != h_gc.n_sites())
        throw std::invalid_argument("dense: observable/Hamiltonian size mismatch");
    const Eigen::MatrixXd hm = to_dense_real(h_gc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::MatrixXcd om = to_dense(obs);
    const double lam0 = lam.minCoeff();
    double z = 0.0, acc = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double w = std::exp(-beta * (lam[i] - lam0));
        const Eigen::VectorXcd vi = v.col(i).cast<cplx>();
        acc += w * (vi.adjoint() * om * vi)(0).real();
        z += w;
    }
    return acc / z;
}

int domain_wall_count(uint32_t index, int n_spins) {
    const uint32_t bonds = (index ^ (index >> 1)) & ((1u << (n_spins - 1)) - 1u);
    return std::popcount(bonds);
}

ThermalEd::ThermalEd(int L, double h) : L_(L), h_(h) {
    const ModelParams params{L, h, 0.0};
    params.validate();
    const int n = params.n_spins();
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (dim > kMaxDenseDim) throw std::invalid_argument("dense: dimension guard exceeded");

    const PauliSum ham = build_hamiltonian(params);
    const PauliSum num = build_number_operator(L);
    if ((ham * num - num * ham).size() != 0)
        throw std::logic_error("dense: Hamiltonian does not conserve domain-wall number");
    require_real_terms(ham, "dense");

    sectors_.resize(L + 1);
    local_index_.assign(dim, -1);
    sector_of_.assign(dim, 0);
    for (uint32_t idx = 0; idx < uint32_t(dim); ++idx) {
        const int k = domain_wall_count(idx, n);
        sector_of_[idx] = static_cast<int8_t>(k);
        local_index_[idx] = static_cast<int32_t>(sectors_[k].basis.size());
        sectors_[k].k = k;
        sectors_[k].basis.push_back(idx);
    }

    std::vector<IndexedTerm> terms;
    for (const auto& t : ham.terms()) terms.push_back(index_term(t.coeff, t.string));

    for (auto& sec : sectors_) {
        const Eigen::Index d = static_cast<Eigen::Index>(sec.basis.size());
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index c = 0; c < d; ++c) {
            const uint32_t b = sec.basis[c];
            for (const auto& t : terms) {
                const uint32_t dst = b ^ t.flip;
                if (sector_of_[dst] != sec.k) continue;  // cancels in the conserved total
                block(local_index_[dst], c) += t.coeff.real() * parity_sign(b & t.sign);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        sec.evals = es.eigenvalues();
        sec.evecs = es.eigenvectors();
    }
}

std::vector<Eigen::VectorXd> ThermalEd::observable_diagonals(const PauliSum& obs) const {
    require_real_terms(obs, "dense");
    if (obs.n_sites() != L_ + 1)
        throw std::invalid_argument("dense: observable size mismatch");
    std::vector<IndexedTerm> terms;
    for (const auto& t : obs.terms()) terms.push_back(index_term(t.coeff, t.string));

    std::vector<Eigen::VectorXd> out;
    out.reserve(sectors_.size());
    for (const auto& sec : sectors_) {
        const Eigen::Index d = static_cast<Eigen::Index>(sec.basis.size());
        // In-sector scatter of obs; out-of-sector elements cannot contribute
        // to diagonal matrix elements of in-sector vectors.
        Eigen::MatrixXd scattered = Eigen::MatrixXd::Zero(d, sec.evecs.cols());
        for (Eigen::Index c = 0; c < d; ++c) {
            const uint32_t b = sec.basis[c];
            for (const auto& t : terms) {
                const uint32_t dst = b ^ t.flip;
                if (sector_of_[dst] != sec.k) continue;
                scattered.row(local_index_[dst]) +=
                    t.coeff.real() * parity_sign(b & t.sign) * sec.evecs.row(c);
            }
        }
        Eigen::VectorXd diag(d);
        for (Eigen::Index i = 0; i < d; ++i) diag[i] = sec.evecs.col(i).dot(scattered.col(i));
        out.push_back(std::move(diag));
    }
    return out;
}

double ThermalEd::average(const PauliSum& obs, double beta, double mu) const {
    if (beta < 0) throw std::invalid_argument("dense: beta must be >= 0");
    const std::string key = obs.to_text();
    const std::vector<Eigen::VectorXd>* diags;
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = diag_memo_.find(key);
        if (it == diag_memo_.end())
            it = diag_memo_.emplace(key, observable_diagonals(obs)).first;
        diags = &it->second;
    }
    double shift = std::numeric_limits<double>::infinity();
    for (const auto& sec : sectors_)
        shift = std::min(shift, (sec.evals.array() - mu * sec.k).minCoeff());
    double z = 0.0, acc = 0.0;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
        const auto& sec = sectors_[s];
        const Eigen::ArrayXd w = (-beta * (sec.evals.array() - mu * sec.k - shift)).exp();
        z += w.sum();
        acc += (w * (*diags)[s].array()).sum();
    }
    return acc / z;
}

std::vector<double> ThermalEd::site_profile(double beta, double mu) const {
    std::vector<double> profile(L_);
    for (int i = 1; i <= L_; ++i)
        profile[i - 1] = average(build_site_occupation(L_, i), beta, mu);
    return profile;
}

double ThermalEd::sector_ground_energy(int k) const {
    if (k < 0 || k > L_) throw std::invalid_argument("dense: sector index out of range");
    return sectors_[k].evals.minCoeff();
}

int ThermalEd::ground_state_particle_number(double mu) const {
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sec : sectors_) {
        const double e = sec.evals.minCoeff() - mu * sec.k;
        if (e < best - 1e-12) {
            best = e;
            best_k = sec.k;
        }
    }
    return best_k;
}

std::shared_ptr<const ThermalEd> ThermalEd::shared(int L, double h) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const ThermalEd>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{L, h}];
    if (!slot) slot = std::make_shared<const ThermalEd>(L, h);
    return slot;
}

std::vector<double> sector_ground_energies(int L, double h) {
    const ModelParams params{L, h, 0.0};
    params.validate();
    const int n = params.n_spins();
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (dim > kMaxDenseDim) throw std::invalid_argument("dense: dimension guard exceeded");
    const PauliSum ham = build_hamiltonian(params);
    require_real_terms(ham, "dense");
    std::vector<IndexedTerm> terms;
    for (const auto& t : ham.terms()) terms.push_back(index_term(t.coeff, t.string));

    std::vector<std::vector<uint32_t>> basis(L + 1);
    std::vector<int32_t> local(dim);
    std::vector<int8_t> sector(dim);
    for (uint32_t idx = 0; idx < uint32_t(dim); ++idx) {
        const int k = domain_wall_count(idx, n);
        sector[idx] = static_cast<int8_t>(k);
        local[idx] = static_cast<int32_t>(basis[k].size());
        basis[k].push_back(idx);
    }

    std::vector<double> energies(L + 1);
    for (int k = 0; k <= L; ++k) {
        const auto& bas = basis[k];
        const Eigen::Index d = static_cast<Eigen::Index>(bas.size());
        auto matvec = [&](const Eigen::VectorXd& x) {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
            for (Eigen::Index c = 0; c < d; ++c) {
                const uint32_t b = bas[c];
                for (const auto& t : terms) {
                    const uint32_t dst = b ^ t.flip;
                    if (sector[dst] != k) continue;
                    w[local[dst]] += t.coeff.real() * parity_sign(b & t.sign) * x[c];
                }
            }
            return w;
        };
        energies[k] = lanczos_lowest(matvec, d, /*seed=*/971 + k);
    }
    return energies;
}

}  // namespace z2metts
