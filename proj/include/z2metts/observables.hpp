#pragma once

#include <map>
#include <string>
#include <vector>

#include "z2metts/model.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

// <H>/L with the bare Hamiltonian (no chemical-potential term).
double energy_density(const Statevector& state, const PauliSum& hamiltonian, int L);

// <N>/L
double particle_density(const Statevector& state, const PauliSum& number_op, int L);

// Per-site fermion occupations <n_i>, i = 1..L; sums to <N>.
struct OccupationProfile {
    std::vector<double> values;

    double sum() const;
};

OccupationProfile site_occupations(const Statevector& state, int L);

// Strict local maxima of the profile, excluding the first and last entries.
int count_interior_peaks(const std::vector<double>& profile);

// Runs of 1s (strings) and 0s (antistrings) in z-basis bitstrings, keyed by
// run length l. C_l = run count / total_samples; values can exceed 1.
struct StringHistogram {
    std::map<int, double> strings;
    std::map<int, double> antistrings;
    long total_samples = 0;
};

StringHistogram string_histogram(const std::vector<std::string>& bitstrings);

// Length mean/variance of one histogram side, weighting length l by C_l.
double histogram_mean(const std::map<int, double>& hist);
double histogram_variance(const std::map<int, double>& hist);

// |mean - reference| / |reference|
double relative_error(double mean, double ed_value);

// D_O = (1/M) sum_i |(O_i - ref)/ref|
double spread_metric(const std::vector<double>& per_sample_values, double ed_value);

// |av - ite| / |ed|
double avqite_deviation(double av_value, double ite_value, double ed_value);

}  // namespace z2metts
