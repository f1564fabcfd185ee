#pragma once

#include <cstdint>
#include <random>

namespace z2metts {

// splitmix64 step; used to derive independent, reproducible streams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

enum class RngPurpose : uint64_t { InitCps = 1, Collapse = 2, Shots = 3, Generic = 4 };

// Deterministic seed for (master_seed, walk, step, purpose); independent of
// thread scheduling by construction.
inline uint64_t derive_seed(uint64_t master, uint64_t walk, uint64_t step,
                            RngPurpose purpose = RngPurpose::Generic) {
    uint64_t s = master;
    splitmix64(s);
    s ^= 0x2545f4914f6cdd1dull * (walk + 1);
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ull * (step + 1);
    splitmix64(s);
    s ^= static_cast<uint64_t>(purpose) * 0xd1342543de82ef95ull;
    return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, uint64_t walk, uint64_t step,
                    RngPurpose purpose = RngPurpose::Generic) {
    return Rng(derive_seed(master, walk, step, purpose));
}

}  // namespace z2metts
