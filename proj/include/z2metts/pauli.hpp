#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace z2metts {

using cplx = std::complex<double>;

// Pauli string over n_sites spins in symplectic (mask) form.
// Bit i of x_mask / z_mask refers to site i. A site carries
// X if only the x bit is set, Z if only the z bit, Y if both, I if neither.
struct PauliString {
    int n_sites = 0;
    uint32_t x_mask = 0;
    uint32_t z_mask = 0;

    PauliString() = default;
    PauliString(int n, uint32_t x, uint32_t z);

    // Single-site constructors, e.g. PauliString::x(5, n).
    static PauliString identity(int n);
    static PauliString x(int site, int n);
    static PauliString y(int site, int n);
    static PauliString z(int site, int n);

    bool is_identity() const { return x_mask == 0 && z_mask == 0; }

    bool operator==(const PauliString& o) const {
        return n_sites == o.n_sites && x_mask == o.x_mask && z_mask == o.z_mask;
    }
    bool operator<(const PauliString& o) const {
        if (x_mask != o.x_mask) return x_mask < o.x_mask;
        return z_mask < o.z_mask;
    }

    // "X0 Z2 Y5" with ascending site index; "I" for the identity.
    std::string label() const;
    static PauliString parse(const std::string& label, int n_sites);
};

// Number of non-identity sites.
int weight(const PauliString& p);

// Group product a*b = phase * product, phase in {1, i, -1, -i}.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

bool commutes(const PauliString& a, const PauliString& b);

struct PauliTerm {
    cplx coeff;
    PauliString string;
};

// Canonicalized weighted sum of Pauli strings: terms sorted by mask key,
// duplicates merged, coefficients below drop_tol removed.
class PauliSum {
public:
    static constexpr double drop_tol = 1e-14;

    PauliSum() = default;
    explicit PauliSum(int n_sites) : n_(n_sites) {}
    PauliSum(int n_sites, std::vector<PauliTerm> terms);

    int n_sites() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    void add(cplx coeff, const PauliString& s);

    PauliSum& operator+=(const PauliSum& o);
    PauliSum& operator-=(const PauliSum& o);
    PauliSum& operator*=(cplx a);
    friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
    friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
    friend PauliSum operator*(cplx a, PauliSum s) { return s *= a; }
    friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

    // All coefficients real (every Pauli string is self-adjoint).
    bool is_hermitian(double tol = 1e-12) const;

    // Lines of "coeff<TAB>label".
    std::string to_text() const;
    static PauliSum from_text(const std::string& text, int n_sites);

    bool operator==(const PauliSum& o) const;

private:
    void canonicalize();

    int n_ = 0;
    std::vector<PauliTerm> terms_;
};

}  // namespace z2metts
