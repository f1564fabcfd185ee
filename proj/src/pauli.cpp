#include "z2metts/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace z2metts {

namespace {

void check_site(int site, int n) {
    if (site < 0 || site >= n)
        throw std::invalid_argument("pauli: site index out of range");
}

// Exponent t (mod 4) in sigma(ax,az) * sigma(bx,bz) = i^t sigma(ax^bx, az^bz),
// indexed by (ax<<3)|(az<<2)|(bx<<1)|bz. Y is the bare (1,1) letter.
constexpr int kPhaseExp[16] = {
    // a = I
    0, 0, 0, 0,
    // a = Z: Z*I=Z, Z*Z=I, Z*X=iY, Z*Y=-iX
    0, 0, 1, 3,
    // a = X: X*I=X, X*Z=-iY, X*X=I, X*Y=iZ
    0, 3, 0, 1,
    // a = Y: Y*I=Y, Y*Z=iX, Y*X=-iZ, Y*Y=I
    0, 1, 3, 0};

constexpr cplx kIPow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

}  // namespace

PauliString::PauliString(int n, uint32_t x, uint32_t z) : n_sites(n), x_mask(x), z_mask(z) {
    if (n <= 0 || n > 31) throw std::invalid_argument("pauli: n_sites must be in [1, 31]");
    const uint32_t valid = (n == 31) ? 0x7fffffffu : ((1u << n) - 1);
    if ((x & ~valid) || (z & ~valid))
        throw std::invalid_argument("pauli: mask bits beyond n_sites");
}

PauliString PauliString::identity(int n) { return PauliString(n, 0, 0); }
PauliString PauliString::x(int site, int n) {
    check_site(site, n);
    return PauliString(n, 1u << site, 0);
}
PauliString PauliString::y(int site, int n) {
    check_site(site, n);
    return PauliString(n, 1u << site, 1u << site);
}
PauliString PauliString::z(int site, int n) {
    check_site(site, n);
    return PauliString(n, 0, 1u << site);
}

std::string PauliString::label() const {
    if (is_identity()) return "I";
    std::string out;
    for (int i = 0; i < n_sites; ++i) {
        const bool bx = (x_mask >> i) & 1u, bz = (z_mask >> i) & 1u;
        if (!bx && !bz) continue;
        if (!out.empty()) out += ' ';
        out += bx ? (bz ? 'Y' : 'X') : 'Z';
        out += std::to_string(i);
    }
    return out;
}

PauliString PauliString::parse(const std::string& label, int n_sites) {
    PauliString p = identity(n_sites);
    std::istringstream in(label);
    std::string tok;
    while (in >> tok) {
        if (tok == "I") continue;
        if (tok.size() < 2) throw std::invalid_argument("pauli: bad token '" + tok + "'");
        const char c = tok[0];
        const int site = std::stoi(tok.substr(1));
        check_site(site, n_sites);
        const uint32_t bit = 1u << site;
        if ((p.x_mask | p.z_mask) & bit)
            throw std::invalid_argument("pauli: duplicate site in label");
        if (c == 'X' || c == 'Y') p.x_mask |= bit;
        if (c == 'Z' || c == 'Y') p.z_mask |= bit;
        if (c != 'X' && c != 'Y' && c != 'Z')
            throw std::invalid_argument("pauli: bad letter in '" + tok + "'");
    }
    return p;
}

int weight(const PauliString& p) { return std::popcount(p.x_mask | p.z_mask); }

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
    if (a.n_sites != b.n_sites)
        throw std::invalid_argument("pauli: multiply size mismatch");
    int t = 0;
    uint32_t support = a.x_mask | a.z_mask | b.x_mask | b.z_mask;
    while (support) {
        const int i = std::countr_zero(support);
        support &= support - 1;
        const int idx = (((a.x_mask >> i) & 1u) << 3) | (((a.z_mask >> i) & 1u) << 2) |
                        (((b.x_mask >> i) & 1u) << 1) | ((b.z_mask >> i) & 1u);
        t += kPhaseExp[idx];
    }
    return {kIPow[t & 3], PauliString(a.n_sites, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)};
}

bool commutes(const PauliString& a, const PauliString& b) {
    if (a.n_sites != b.n_sites)
        throw std::invalid_argument("pauli: commutes size mismatch");
    const int anti = std::popcount(a.x_mask & b.z_mask) + std::popcount(a.z_mask & b.x_mask);
    return (anti & 1) == 0;
}

PauliSum::PauliSum(int n_sites, std::vector<PauliTerm> terms)
    : n_(n_sites), terms_(std::move(terms)) {
    for (const auto& t : terms_)
        if (t.string.n_sites != n_)
            throw std::invalid_argument("pauli: term size mismatch");
    canonicalize();
}

void PauliSum::add(cplx coeff, const PauliString& s) {
    if (n_ == 0) n_ = s.n_sites;
    if (s.n_sites != n_) throw std::invalid_argument("pauli: term size mismatch");
    terms_.push_back({coeff, s});
    canonicalize();
}

void PauliSum::canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const PauliTerm& a, const PauliTerm& b) { return a.string < b.string; });
    std::vector<PauliTerm> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().string == t.string)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    terms_.clear();
    for (const auto& t : merged)
        if (std::abs(t.coeff) >= drop_tol) terms_.push_back(t);
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
    if (n_ == 0) n_ = o.n_;
    if (o.n_ != 0 && o.n_ != n_) throw std::invalid_argument("pauli: sum size mismatch");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    canonicalize();
    return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
    PauliSum neg = o;
    neg *= cplx(-1, 0);
    return *this += neg;
}

PauliSum& PauliSum::operator*=(cplx a) {
    for (auto& t : terms_) t.coeff *= a;
    canonicalize();
    return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("pauli: product size mismatch");
    std::vector<PauliTerm> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) {
            auto [phase, s] = multiply(ta.string, tb.string);
            terms.push_back({ta.coeff * tb.coeff * phase, s});
        }
    return PauliSum(a.n_, std::move(terms));
}

bool PauliSum::is_hermitian(double tol) const {
    for (const auto& t : terms_)
        if (std::abs(t.coeff.imag()) > tol) return false;
    return true;
}

std::string PauliSum::to_text() const {
    std::string out;
    char buf[96];
    for (const auto& t : terms_) {
        if (std::abs(t.coeff.imag()) < drop_tol)
            std::snprintf(buf, sizeof buf, "%.17g", t.coeff.real());
        else
            std::snprintf(buf, sizeof buf, "%.17g%+.17gi", t.coeff.real(), t.coeff.imag());
        out += buf;
        out += '\t';
        out += t.string.label();
        out += '\n';
    }
    return out;
}

PauliSum PauliSum::from_text(const std::string& text, int n_sites) {
    PauliSum sum(n_sites);
    std::istringstream in(text);
    std::string line;
    std::vector<PauliTerm> terms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::invalid_argument("pauli: bad serialized line '" + line + "'");
        const std::string num = line.substr(0, tab);
        cplx c;
        if (!num.empty() && num.back() == 'i') {
            // re+imi form: split at the sign of the imaginary part.
            std::size_t pos = num.find_last_of("+-", num.size() - 2);
            while (pos != std::string::npos && pos > 0 &&
                   (num[pos - 1] == 'e' || num[pos - 1] == 'E'))
                pos = num.find_last_of("+-", pos - 1);
            if (pos == std::string::npos || pos == 0)
                throw std::invalid_argument("pauli: bad coefficient '" + num + "'");
            c = cplx(std::stod(num.substr(0, pos)),
                     std::stod(num.substr(pos, num.size() - 1 - pos)));
        } else {
            c = cplx(std::stod(num), 0);
        }
        terms.push_back({c, PauliString::parse(line.substr(tab + 1), n_sites)});
    }
    return PauliSum(n_sites, std::move(terms));
}

bool PauliSum::operator==(const PauliSum& o) const {
    if (n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (!(terms_[i].string == o.terms_[i].string) ||
            std::abs(terms_[i].coeff - o.terms_[i].coeff) > 1e-13)
            return false;
    return true;
}

}  // namespace z2metts
