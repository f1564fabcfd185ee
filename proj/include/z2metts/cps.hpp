#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "z2metts/rng.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

enum class Basis : uint8_t { X, Y, Z };

char basis_char(Basis b);
Basis parse_basis(char c);

// Classical product state: per-site single-qubit eigenbasis label plus
// outcome bit (0 = +1 eigenstate, 1 = -1 eigenstate).
struct ClassicalProductState {
    std::vector<Basis> bases;
    std::vector<uint8_t> outcomes;

    int n_sites() const { return static_cast<int>(bases.size()); }
    static ClassicalProductState uniform(int n_sites, Basis b, uint32_t bits);
    bool operator==(const ClassicalProductState& o) const {
        return bases == o.bases && outcomes == o.outcomes;
    }
    // e.g. "z:0101" for a uniform basis, "xyz:010" otherwise
    std::string label() const;
};

// Uniformly random outcomes in a fixed basis.
ClassicalProductState random_cps(int n_sites, Basis b, Rng& rng);

// Tensor product of single-site eigenstates; site 0 is the MSB.
Statevector cps_to_state(const ClassicalProductState& cps);

// Full-register projective measurement, one site at a time from site 0 to
// site n-1. Distributionally identical to sampling the 2^n outcomes at once.
// Returns the sampled CPS and its Born probability.
std::pair<ClassicalProductState, double> collapse(const Statevector& state,
                                                  const std::vector<Basis>& bases, Rng& rng);
std::pair<ClassicalProductState, double> collapse(const Statevector& state, Basis basis,
                                                  Rng& rng);

// Independent z-basis shots; bit of site i is bit n-1-i of each entry
// (i.e. the entry is the basis index of the outcome).
std::vector<uint32_t> sample_bitstrings(const Statevector& state, int shots, Rng& rng);

std::string bitstring_to_string(uint32_t bits, int n_sites);

}  // namespace z2metts
