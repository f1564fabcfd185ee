#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "z2metts/dense.hpp"
#include "z2metts/krylov.hpp"
#include "z2metts/model.hpp"
#include "z2metts/statevector.hpp"

using namespace z2metts;

namespace {

Statevector dense_ite(const PauliSum& gen, const Statevector& psi0, double tau) {
    const oracle::Mat prop = oracle::expm_hermitian(oracle::dense_of(gen), -tau);
    Statevector out = psi0;
    out.amps = oracle::normalized(prop * psi0.amps);
    return out;
}

}  // namespace

TEST_CASE("tau = 0 is the identity with zero log-weight") {
    const auto cps = ClassicalProductState::uniform(4, Basis::Z, 0b0110u);
    const PauliSum gc = build_grand_canonical({3, 0.1, -0.4});
    const MettsRecord rec = exact_ite(cps, gc, 0.0);
    CHECK((rec.state.amps - cps_to_state(cps).amps).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(rec.logP == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(exact_ite(cps, gc, -0.1));
}

TEST_CASE("eigenstates are stationary with logP = -2 tau lambda") {
    const ModelParams p{3, 0.1, -0.4};
    const PauliSum gc = build_grand_canonical(p);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::dense_of(gc));
    const double tau = 0.8;
    for (int k : {0, 3, 10}) {
        Statevector psi(4, es.eigenvectors().col(k));
        auto [out, log_norm] = ite_propagate(gc, psi, tau);
        CHECK(fidelity(out, psi) == doctest::Approx(1.0).epsilon(1e-12));
        // logP = 2 log||e^{-tau gc} psi|| = -2 tau lambda
        CHECK(2.0 * log_norm ==
              doctest::Approx(-2.0 * tau * es.eigenvalues()[k]).epsilon(1e-10));
    }
}

TEST_CASE("Krylov propagation matches the dense matrix exponential") {
    const ModelParams p{4, 0.1, -0.4};
    const PauliSum gc = build_grand_canonical(p);
    const auto cps = ClassicalProductState::uniform(5, Basis::Z, 0);
    SUBCASE("long evolution from an all-z CPS") {
        const MettsRecord rec = exact_ite(cps, gc, 5.0);
        const Statevector ref = dense_ite(gc, cps_to_state(cps), 5.0);
        CHECK(fidelity(rec.state, ref) > 1.0 - 1e-10);
    }
    SUBCASE("several taus and bases") {
        for (double tau : {0.25, 1.0, 2.5})
            for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
                const auto c = ClassicalProductState::uniform(5, b, 0b10110u);
                const MettsRecord rec = exact_ite(c, gc, tau);
                const Statevector ref = dense_ite(gc, cps_to_state(c), tau);
                CHECK(fidelity(rec.state, ref) > 1.0 - 1e-10);
            }
    }
    SUBCASE("logP matches the dense norm") {
        const double tau = 2.0;
        const MettsRecord rec = exact_ite(cps, gc, tau);
        const oracle::Mat prop = oracle::expm_hermitian(oracle::dense_of(gc), -tau);
        const double norm = (prop * cps_to_state(cps).amps).norm();
        CHECK(rec.logP == doctest::Approx(2.0 * std::log(norm)).epsilon(1e-9));
    }
}

TEST_CASE("semigroup property of the propagator") {
    const PauliSum gc = build_grand_canonical({4, 0.1, -0.4});
    const auto cps = ClassicalProductState::uniform(5, Basis::X, 0b01011u);
    const MettsRecord direct = exact_ite(cps, gc, 1.7);
    auto [half, n1] = ite_propagate(gc, cps_to_state(cps), 0.9);
    auto [full, n2] = ite_propagate(gc, half, 0.8);
    CHECK(fidelity(full, direct.state) > 1.0 - 1e-10);
    CHECK(direct.logP == doctest::Approx(2.0 * (n1 + n2)).epsilon(1e-9));
}

TEST_CASE("energy is non-increasing along the imaginary-time flow") {
    const PauliSum gc = build_grand_canonical({4, 0.1, -0.4});
    Statevector psi = cps_to_state(ClassicalProductState::uniform(5, Basis::Y, 0b00110u));
    double last = expectation(gc, psi);
    for (int k = 0; k < 10; ++k) {
        psi = ite_propagate(gc, psi, 0.3).first;
        const double e = expectation(gc, psi);
        CHECK(e <= last + 1e-10);
        last = e;
    }
}

TEST_CASE("dense conversion agrees with the Kronecker oracle") {
    const PauliSum h = build_grand_canonical({3, 0.2, 0.5});
    CHECK((to_dense(h) - oracle::dense_of(h)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((to_dense_real(h).cast<cplx>() - oracle::dense_of(h)).cwiseAbs().maxCoeff() <
          1e-13);
    PauliSum with_y(2);
    with_y.add(1.0, PauliString::y(0, 2));
    CHECK_THROWS(to_dense_real(with_y));
}

TEST_CASE("domain wall count hand cases") {
    CHECK(domain_wall_count(0b0000, 4) == 0);
    CHECK(domain_wall_count(0b0101, 4) == 3);
    CHECK(domain_wall_count(0b0011, 4) == 1);
    CHECK(domain_wall_count(0b1000, 4) == 1);
}

TEST_CASE("lanczos_lowest matches dense ground energies") {
    const ModelParams p{4, 0.1, 0.0};
    const oracle::Mat hd = oracle::dense_of(build_hamiltonian(p));
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(hd);
    const Eigen::MatrixXd hr = hd.real();
    const double e0 = lanczos_lowest(
        [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(hr * v); }, hr.rows());
    CHECK(e0 == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-10));
}
