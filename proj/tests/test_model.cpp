#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support/oracles.hpp"
#include "z2metts/dense.hpp"
#include "z2metts/model.hpp"

using namespace z2metts;

TEST_CASE("hamiltonian term structure") {
    SUBCASE("L=2, h=0.1 has the five expected terms") {
        const PauliSum h = build_hamiltonian({2, 0.1, 0.0});
        REQUIRE(h.size() == 5);
        PauliSum expect(3);
        expect.add(0.25, PauliString::parse("X1", 3));
        expect.add(-0.25, PauliString::parse("Z0 X1 Z2", 3));
        for (int i = 0; i <= 2; ++i) expect.add(0.1, PauliString::z(i, 3));
        CHECK(h == expect);
    }
    SUBCASE("L=12, h=0 has 22 kinetic terms of weight 1 or 3") {
        const PauliSum h = build_hamiltonian({12, 0.0, 0.0});
        REQUIRE(h.size() == 22);
        for (const auto& t : h.terms()) {
            CHECK(std::abs(std::abs(t.coeff.real()) - 0.25) < 1e-15);
            const int w = weight(t.string);
            CHECK((w == 1 || w == 3));
        }
    }
    SUBCASE("no X or Y on the frozen boundary sites") {
        const PauliSum h = build_hamiltonian({6, 0.3, 0.0});
        for (const auto& t : h.terms()) {
            CHECK((t.string.x_mask & 1u) == 0);
            CHECK((t.string.x_mask >> 6) == 0);
        }
    }
    SUBCASE("L < 2 rejected") { CHECK_THROWS(build_hamiltonian({1, 0.0, 0.0})); }
}

TEST_CASE("L=2 h=0 ground energy is -1/2 (dense oracle)") {
    const PauliSum h = build_hamiltonian({2, 0.0, 0.0});
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::dense_of(h));
    CHECK(es.eigenvalues()[0] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("number operator structure and eigenvalues") {
    const PauliSum n_op = build_number_operator(3);
    REQUIRE(n_op.size() == 4);  // identity + 3 ZZ terms
    const oracle::Mat dense = oracle::dense_of(n_op);
    auto walls = [&](uint32_t idx) {
        return std::real(dense(idx, idx));
    };
    CHECK(walls(0b0000) == doctest::Approx(0.0));
    CHECK(walls(0b0101) == doctest::Approx(3.0));
    CHECK(walls(0b0011) == doctest::Approx(1.0));
    for (uint32_t idx = 0; idx < 16; ++idx)
        CHECK(walls(idx) == doctest::Approx(double(domain_wall_count(idx, 4))));
}

TEST_CASE("grand canonical operator") {
    SUBCASE("mu = 0 equals the bare hamiltonian") {
        CHECK(build_grand_canonical({4, 0.2, 0.0}) == build_hamiltonian({4, 0.2, 0.0}));
    }
    SUBCASE("identity coefficient is -mu L / 2") {
        const PauliSum gc = build_grand_canonical({2, 0.0, 1.0});
        bool found = false;
        for (const auto& t : gc.terms())
            if (t.string.is_identity()) {
                found = true;
                CHECK(t.coeff.real() == doctest::Approx(-1.0).epsilon(1e-14));
            }
        CHECK(found);
    }
    SUBCASE("equals H - mu N coefficient-wise") {
        const ModelParams p{5, 0.1, -0.4};
        const PauliSum gc = build_grand_canonical(p);
        const PauliSum diff = gc - (build_hamiltonian(p) - 0.4 * build_number_operator(5));
        // -mu N with mu=-0.4 means +0.4 N, i.e. H - (-0.4) N
        const PauliSum expect = build_hamiltonian(p) + 0.4 * build_number_operator(5);
        CHECK(gc == expect);
    }
}

TEST_CASE("H commutes with N symbolically and densely") {
    for (int L : {2, 3, 4, 5, 6}) {
        const PauliSum h = build_hamiltonian({L, 0.17, 0.0});
        const PauliSum n_op = build_number_operator(L);
        CHECK((h * n_op - n_op * h).size() == 0);
    }
    const PauliSum h = build_hamiltonian({4, 0.3, 0.0});
    const PauliSum n_op = build_number_operator(4);
    const oracle::Mat hd = oracle::dense_of(h), nd = oracle::dense_of(n_op);
    CHECK((hd * nd - nd * hd).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("H at h=0 is invariant under global spin flip") {
    const int L = 5;
    const PauliSum h = build_hamiltonian({L, 0.0, 0.0});
    PauliSum flipped(L + 1);
    const PauliString flip(L + 1, (1u << (L + 1)) - 1, 0);
    for (const auto& t : h.terms()) {
        auto [p1, s1] = multiply(flip, t.string);
        auto [p2, s2] = multiply(s1, flip);
        flipped.add(t.coeff * p1 * p2, s2);
    }
    CHECK(flipped == h);
}

TEST_CASE("pool sizes match the set definitions") {
    CHECK(build_pool(Basis::Z, 12).generators.size() == 169);
    CHECK(build_pool(Basis::Y, 12).generators.size() == 468);
    CHECK(build_pool(Basis::X, 12).generators.size() == 2041);
}

TEST_CASE("pools are duplicate-free with deterministic low-weight-first order") {
    for (Basis b : {Basis::X, Basis::Y, Basis::Z}) {
        const OperatorPool pool = build_pool(b, 6);
        std::set<std::pair<uint32_t, uint32_t>> seen;
        int last_weight = 0;
        for (const auto& g : pool.generators) {
            CHECK(g.n_sites == 7);
            CHECK(seen.insert({g.x_mask, g.z_mask}).second);
            CHECK(weight(g) >= last_weight);
            last_weight = weight(g);
        }
    }
}

TEST_CASE("free fermion reference limits") {
    SUBCASE("mu = 0 gives half filling") {
        for (double beta : {0.5, 2.0, 10.0})
            CHECK(free_fermion_reference(8, beta, 0.0).n ==
                  doctest::Approx(0.5).epsilon(1e-13));
    }
    SUBCASE("beta -> 0 gives n = 1/2, eps = 0") {
        const FreeFermionPoint p = free_fermion_reference(6, 1e-9, 0.37);
        CHECK(p.n == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(p.epsilon == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("L=12, mu=-0.55 approaches one-third filling as T -> 0") {
        // At T=0 exactly four of the twelve modes lie below mu = -0.55. The
        // mode at cos(9 pi / 13) = -0.568 sits only 0.018 below mu, so at
        // beta=20 it is about 59% occupied and n evaluates to 0.299; the
        // one-third plateau is only resolved at lower temperature.
        CHECK(free_fermion_reference(12, 20.0, -0.55).n ==
              doctest::Approx(0.29909).epsilon(1e-4));
        CHECK(std::abs(free_fermion_reference(12, 200.0, -0.55).n - 1.0 / 3.0) < 0.01);
    }
}

TEST_CASE("thermal oracle at h=0 matches the free fermion reference") {
    for (int L : {4, 6}) {
        const auto ed = ThermalEd::shared(L, 0.0);
        const PauliSum ham = build_hamiltonian({L, 0.0, 0.0});
        const PauliSum num = build_number_operator(L);
        for (double beta : {1.0, 5.0, 10.0})
            for (double mu : {-0.55, 0.0, 0.3}) {
                const FreeFermionPoint ff = free_fermion_reference(L, beta, mu);
                CHECK(ed->average(ham, beta, mu) / L ==
                      doctest::Approx(ff.epsilon).epsilon(1e-10));
                CHECK(ed->average(num, beta, mu) / L == doctest::Approx(ff.n).epsilon(1e-10));
            }
    }
}

TEST_CASE("thermal oracle hand limits") {
    SUBCASE("beta = 0 energy vanishes (traceless H)") {
        const PauliSum h = build_hamiltonian({3, 0.2, 0.0});
        const PauliSum gc = build_grand_canonical({3, 0.2, 0.1});
        CHECK(ed_thermal_dense(h, gc, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("large beta reaches the ground state") {
        const PauliSum h = build_hamiltonian({2, 0.0, 0.0});
        CHECK(ed_thermal_dense(h, h, 200.0) == doctest::Approx(-0.5).epsilon(1e-10));
    }
    SUBCASE("sector-blocked oracle agrees with the dense reference path") {
        const ModelParams p{4, 0.1, -0.4};
        const auto ed = ThermalEd::shared(4, 0.1);
        const PauliSum h = build_hamiltonian(p);
        const PauliSum gc = build_grand_canonical(p);
        for (double beta : {0.7, 3.0, 10.0})
            CHECK(ed->average(h, beta, -0.4) ==
                  doctest::Approx(ed_thermal_dense(h, gc, beta)).epsilon(1e-11));
    }
}

TEST_CASE("sector ground energies agree with dense sector minima") {
    const int L = 4;
    const auto ed = ThermalEd::shared(L, 0.1);
    const auto lanczos = sector_ground_energies(L, 0.1);
    REQUIRE(lanczos.size() == size_t(L + 1));
    for (int k = 0; k <= L; ++k)
        CHECK(lanczos[k] == doctest::Approx(ed->sector_ground_energy(k)).epsilon(1e-9));
}
