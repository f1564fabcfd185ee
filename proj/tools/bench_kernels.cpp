// Compares the parallel statevector kernels against their serial reference
// implementations: operator application and a full imaginary-time step.
#include <chrono>
#include <cstdio>

#include "z2metts/krylov.hpp"
#include "z2metts/model.hpp"
#include "z2metts/rng.hpp"
#include "z2metts/statevector.hpp"

using namespace z2metts;

namespace {

Statevector random_state(int n, uint64_t seed) {
    Rng rng = make_rng(seed, 0, 0);
    std::normal_distribution<double> dist;
    Statevector psi = Statevector::zero_state(n);
    for (Eigen::Index i = 0; i < psi.dim(); ++i) psi.amps[i] = cplx(dist(rng), dist(rng));
    psi.normalize();
    return psi;
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::printf("%-4s %-22s %12s %12s %10s %12s\n", "L", "kernel", "serial_ms",
                "parallel_ms", "speedup", "max_diff");
    for (int L : {8, 12, 14, 16}) {
        const ModelParams p{L, 0.1, -0.4};
        const PauliSum h_gc = build_grand_canonical(p);
        const Statevector psi = random_state(p.n_spins(), 42 + L);
        const int reps = L <= 12 ? 50 : 5;

        Statevector a, b;
        const double ts = time_ms([&] { a = apply_serial(h_gc, psi); }, reps);
        const double tp = time_ms([&] { b = apply(h_gc, psi); }, reps);
        std::printf("%-4d %-22s %12.3f %12.3f %10.2f %12.3e\n", L, "apply", ts, tp,
                    ts / tp, (a.amps - b.amps).cwiseAbs().maxCoeff());

        KrylovOptions kopts;
        const double ti = time_ms([&] { ite_propagate(h_gc, psi, 0.5, kopts); }, reps);
        std::printf("%-4d %-22s %12s %12.3f %10s %12s\n", L, "ite_tau_0.5", "-", ti, "-",
                    "-");
    }
    return 0;
}
