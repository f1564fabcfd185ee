#include "z2metts/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace z2metts {

void ModelParams::validate() const {
    if (L < 2) throw std::invalid_argument("model: L must be >= 2");
}

PauliSum build_hamiltonian(const ModelParams& params) {
    params.validate();
    const int n = params.n_spins();
    std::vector<PauliTerm> terms;
    for (int i = 1; i <= params.L - 1; ++i) {
        terms.push_back({cplx(0.25, 0), PauliString::x(i, n)});
        PauliString zxz(n, 1u << i, (1u << (i - 1)) | (1u << (i + 1)));
        terms.push_back({cplx(-0.25, 0), zxz});
    }
    if (params.h != 0.0)
        for (int i = 0; i <= params.L; ++i)
            terms.push_back({cplx(params.h, 0), PauliString::z(i, n)});
    return PauliSum(n, std::move(terms));
}

PauliSum build_number_operator(int L) {
    if (L < 2) throw std::invalid_argument("model: L must be >= 2");
    const int n = L + 1;
    std::vector<PauliTerm> terms;
    terms.push_back({cplx(0.5 * L, 0), PauliString::identity(n)});
    for (int i = 1; i <= L; ++i)
        terms.push_back({cplx(-0.5, 0), PauliString(n, 0, (1u << (i - 1)) | (1u << i))});
    return PauliSum(n, std::move(terms));
}

PauliSum build_grand_canonical(const ModelParams& params) {
    params.validate();
    return build_hamiltonian(params) - cplx(params.mu, 0) * build_number_operator(params.L);
}

PauliSum build_site_occupation(int L, int i) {
    if (i < 1 || i > L) throw std::invalid_argument("model: occupation site out of range");
    const int n = L + 1;
    std::vector<PauliTerm> terms;
    terms.push_back({cplx(0.5, 0), PauliString::identity(n)});
    terms.push_back({cplx(-0.5, 0), PauliString(n, 0, (1u << (i - 1)) | (1u << i))});
    return PauliSum(n, std::move(terms));
}

namespace {

// Sort key: weight, then the tuple of acting sites, then the letters at
// those sites (X < Y < Z).
std::tuple<int, std::vector<int>, std::string> pool_key(const PauliString& p) {
    std::vector<int> sites;
    std::string letters;
    for (int i = 0; i < p.n_sites; ++i) {
        const bool bx = (p.x_mask >> i) & 1u, bz = (p.z_mask >> i) & 1u;
        if (!bx && !bz) continue;
        sites.push_back(i);
        letters += bx ? (bz ? 'Y' : 'X') : 'Z';
    }
    return {weight(p), std::move(sites), std::move(letters)};
}

PauliString two_site(int n, char a, int i, char b, int j) {
    auto [phase, p] = multiply(PauliString::parse(std::string(1, a) + std::to_string(i), n),
                               PauliString::parse(std::string(1, b) + std::to_string(j), n));
    (void)phase;  // disjoint supports
    return p;
}

}  // namespace

OperatorPool build_pool(Basis basis_tag, int L) {
    if (L < 2) throw std::invalid_argument("model: L must be >= 2");
    const int n = L + 1;
    std::vector<PauliString> gen;
    switch (basis_tag) {
        case Basis::Z:
        case Basis::X: {
            for (int i = 0; i < n; ++i) gen.push_back(PauliString::y(i, n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) gen.push_back(two_site(n, 'Y', i, 'Z', j));
            if (basis_tag == Basis::X) {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j) gen.push_back(two_site(n, 'Y', i, 'X', j));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            if (i == j || j == k || i == k) continue;
                            PauliString p(n, (1u << i) | (1u << k),
                                          (1u << i) | (1u << j));  // Y_i Z_j X_k
                            gen.push_back(p);
                        }
            }
            break;
        }
        case Basis::Y: {
            for (int i = 0; i < n; ++i) gen.push_back(PauliString::z(i, n));
            for (int i = 0; i < n; ++i) gen.push_back(PauliString::x(i, n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) gen.push_back(two_site(n, 'Z', i, 'X', j));
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = j + 1; k < n; ++k)
                        gen.push_back(PauliString(n, 0, (1u << i) | (1u << j) | (1u << k)));
            break;
        }
    }
    // The set notation can produce the same string twice (Y_i Z_j X_k vs
    // Y_i X_k Z_j is not possible here, but keep the pool duplicate-free).
    std::sort(gen.begin(), gen.end(),
              [](const PauliString& a, const PauliString& b) { return pool_key(a) < pool_key(b); });
    gen.erase(std::unique(gen.begin(), gen.end()), gen.end());
    return {basis_tag, std::move(gen)};
}

FreeFermionPoint free_fermion_reference(int L, double beta, double mu) {
    if (beta <= 0) throw std::invalid_argument("model: beta must be > 0");
    FreeFermionPoint out;
    for (int m = 1; m <= L; ++m) {
        const double eps = std::cos(m * M_PI / (L + 1));
        const double f = 1.0 / (1.0 + std::exp(beta * (eps - mu)));
        out.n += f;
        out.epsilon += eps * f;
    }
    out.n /= L;
    out.epsilon /= L;
    return out;
}

}  // namespace z2metts
