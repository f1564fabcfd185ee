#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "support/oracles.hpp"
#include "z2metts/pauli.hpp"

using namespace z2metts;

TEST_CASE("single-string constructors and labels") {
    CHECK(PauliString::identity(4).label() == "I");
    CHECK(PauliString::x(0, 4).label() == "X0");
    CHECK(PauliString::y(2, 4).label() == "Y2");
    CHECK(PauliString::z(3, 4).label() == "Z3");
    PauliString s(6, 0b100001u, 0b100100u);  // X0 Z2 Y5
    CHECK(s.label() == "X0 Z2 Y5");
    CHECK(PauliString::parse("X0 Z2 Y5", 6) == s);
    CHECK(PauliString::parse("I", 3) == PauliString::identity(3));
}

TEST_CASE("weight counts non-identity sites") {
    CHECK(weight(PauliString::identity(5)) == 0);
    PauliString a = PauliString::parse("Y1 Z3", 5);
    CHECK(weight(a) == 2);
    CHECK(weight(PauliString::parse("Y0 Z2 X5", 6)) == 3);
}

TEST_CASE("multiply hand cases") {
    const int n = 2;
    auto [p1, s1] = multiply(PauliString::x(0, n), PauliString::x(0, n));
    CHECK(p1 == cplx(1, 0));
    CHECK(s1.is_identity());

    auto [p2, s2] = multiply(PauliString::x(0, n), PauliString::z(0, n));
    CHECK(p2 == cplx(0, -1));
    CHECK(s2 == PauliString::y(0, n));

    auto [p3, s3] = multiply(PauliString::x(0, n), PauliString::z(1, n));
    CHECK(p3 == cplx(1, 0));
    CHECK(s3 == PauliString::parse("X0 Z1", n));
}

TEST_CASE("multiply exhaustive n=2 against dense oracle") {
    const int n = 2;
    for (uint32_t ax = 0; ax < 4; ++ax)
        for (uint32_t az = 0; az < 4; ++az)
            for (uint32_t bx = 0; bx < 4; ++bx)
                for (uint32_t bz = 0; bz < 4; ++bz) {
                    PauliString a(n, ax, az), b(n, bx, bz);
                    auto [phase, prod] = multiply(a, b);
                    const oracle::Mat lhs = oracle::dense_of(a) * oracle::dense_of(b);
                    const oracle::Mat rhs = phase * oracle::dense_of(prod);
                    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
                }
}

TEST_CASE("multiply phase symmetry under commutation parity") {
    const int n = 2;
    for (uint32_t ax = 0; ax < 4; ++ax)
        for (uint32_t az = 0; az < 4; ++az)
            for (uint32_t bx = 0; bx < 4; ++bx)
                for (uint32_t bz = 0; bz < 4; ++bz) {
                    PauliString a(n, ax, az), b(n, bx, bz);
                    auto [pab, sab] = multiply(a, b);
                    auto [pba, sba] = multiply(b, a);
                    CHECK(sab == sba);
                    const double sign = commutes(a, b) ? 1.0 : -1.0;
                    CHECK(std::abs(pab - sign * pba) < 1e-15);
                }
}

TEST_CASE("PauliSum canonicalization merges and drops") {
    PauliSum s(3);
    s.add(0.5, PauliString::x(1, 3));
    s.add(0.5, PauliString::x(1, 3));
    s.add(1e-16, PauliString::z(0, 3));
    s.add(2.0, PauliString::identity(3));
    s.add(-2.0, PauliString::identity(3));
    REQUIRE(s.size() == 1);
    CHECK(s.terms()[0].coeff == cplx(1.0, 0.0));
    CHECK(s.terms()[0].string == PauliString::x(1, 3));
}

TEST_CASE("PauliSum arithmetic and hermiticity") {
    PauliSum a(2), b(2);
    a.add(1.0, PauliString::x(0, 2));
    b.add(cplx(0.0, 1.0), PauliString::y(1, 2));
    CHECK(a.is_hermitian());
    CHECK_FALSE((a + b).is_hermitian());
    PauliSum c = 2.0 * a;
    CHECK(c.terms()[0].coeff == cplx(2.0, 0.0));
    CHECK((a - a).size() == 0);
}

TEST_CASE("PauliSum product matches dense oracle") {
    PauliSum a(2), b(2);
    a.add(0.5, PauliString::x(0, 2));
    a.add(-0.25, PauliString::parse("Z0 X1", 2));
    b.add(1.0, PauliString::parse("Y0 Y1", 2));
    b.add(0.75, PauliString::z(1, 2));
    const PauliSum ab = a * b;
    const oracle::Mat lhs = oracle::dense_of(a) * oracle::dense_of(b);
    CHECK((lhs - oracle::dense_of(ab)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("text serialization round-trips") {
    PauliSum s(6);
    s.add(0.25, PauliString::parse("X0 Z2 Y5", 6));
    s.add(-1.0 / 3.0, PauliString::identity(6));
    const PauliSum back = PauliSum::from_text(s.to_text(), 6);
    CHECK(back == s);
}
