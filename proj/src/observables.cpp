#include "z2metts/observables.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace z2metts {

double energy_density(const Statevector& state, const PauliSum& hamiltonian, int L) {
    return expectation(hamiltonian, state) / L;
}

double particle_density(const Statevector& state, const PauliSum& number_op, int L) {
    return expectation(number_op, state) / L;
}

double OccupationProfile::sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

OccupationProfile site_occupations(const Statevector& state, int L) {
    OccupationProfile profile;
    profile.values.resize(L);
    for (int i = 1; i <= L; ++i)
        profile.values[i - 1] = expectation(build_site_occupation(L, i), state);
    return profile;
}

int count_interior_peaks(const std::vector<double>& profile) {
    int peaks = 0;
    for (size_t i = 1; i + 1 < profile.size(); ++i)
        if (profile[i] > profile[i - 1] && profile[i] > profile[i + 1]) ++peaks;
    return peaks;
}

StringHistogram string_histogram(const std::vector<std::string>& bitstrings) {
    if (bitstrings.empty()) throw std::invalid_argument("no bitstrings given");
    StringHistogram hist;
    hist.total_samples = static_cast<long>(bitstrings.size());
    const size_t len = bitstrings.front().size();
    std::map<int, long> s_counts, a_counts;
    for (const std::string& bits : bitstrings) {
        if (bits.size() != len) throw std::invalid_argument("bitstring lengths differ");
        size_t i = 0;
        while (i < len) {
            size_t j = i;
            while (j < len && bits[j] == bits[i]) ++j;
            const int l = static_cast<int>(j - i);
            (bits[i] == '1' ? s_counts : a_counts)[l] += 1;
            i = j;
        }
    }
    for (auto [l, c] : s_counts) hist.strings[l] = static_cast<double>(c) / hist.total_samples;
    for (auto [l, c] : a_counts) hist.antistrings[l] = static_cast<double>(c) / hist.total_samples;
    return hist;
}

double histogram_mean(const std::map<int, double>& hist) {
    double w = 0.0, m = 0.0;
    for (auto [l, c] : hist) {
        w += c;
        m += l * c;
    }
    if (w == 0.0) throw std::invalid_argument("empty histogram");
    return m / w;
}

double histogram_variance(const std::map<int, double>& hist) {
    const double mean = histogram_mean(hist);
    double w = 0.0, v = 0.0;
    for (auto [l, c] : hist) {
        w += c;
        v += c * (l - mean) * (l - mean);
    }
    return v / w;
}

double relative_error(double mean, double ed_value) {
    if (ed_value == 0.0) throw std::invalid_argument("relative error undefined: zero reference");
    return std::abs(mean - ed_value) / std::abs(ed_value);
}

double spread_metric(const std::vector<double>& per_sample_values, double ed_value) {
    if (ed_value == 0.0) throw std::invalid_argument("spread metric undefined: zero reference");
    if (per_sample_values.empty()) throw std::invalid_argument("spread metric needs samples");
    double acc = 0.0;
    for (double v : per_sample_values) acc += std::abs((v - ed_value) / ed_value);
    return acc / per_sample_values.size();
}

double avqite_deviation(double av_value, double ite_value, double ed_value) {
    if (ed_value == 0.0) throw std::invalid_argument("deviation undefined: zero reference");
    return std::abs(av_value - ite_value) / std::abs(ed_value);
}

}  // namespace z2metts
