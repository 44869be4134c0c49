#include "helpers.hpp"

#include "qmediate/statevector.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qmediate;

namespace {

double amp_distance(const Statevector& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        worst = std::max(worst, std::abs(a.amplitude(i) - b[i]));
    }
    return worst;
}

} // namespace

TEST_CASE("X gate flips qubit 0 of |0>") {
    Statevector s(1);
    s.apply_1q_gate(0, pauli_x_gate());
    CHECK(std::abs(s.amplitude(0)) < 1e-12);
    CHECK(std::abs(s.amplitude(1) - cplx(1, 0)) < 1e-12);
}

TEST_CASE("identity leaves |0> unchanged") {
    Statevector s(2);
    s.apply_1q_gate(1, identity_gate());
    CHECK(std::abs(s.amplitude(0) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("RY(pi/2) creates the equal superposition") {
    Statevector s(1);
    s.apply_ry(0, std::numbers::pi / 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // By hand from RY(theta) = exp(-i theta Y / 2): column (cos pi/4, sin pi/4).
    CHECK(std::abs(s.amplitude(0) - cplx(inv_sqrt2, 0)) < 1e-12);
    CHECK(std::abs(s.amplitude(1) - cplx(inv_sqrt2, 0)) < 1e-12);
}

TEST_CASE("CNOT truth table on |10> and |00>") {
    Statevector s(2);
    s.apply_1q_gate(0, pauli_x_gate()); // |10>
    s.apply_cnot(0, 1);
    CHECK(std::abs(s.amplitude(3) - cplx(1, 0)) < 1e-15); // |11>

    Statevector zeros(2);
    zeros.apply_cnot(0, 1);
    CHECK(std::abs(zeros.amplitude(0) - cplx(1, 0)) < 1e-15); // control unset
}

TEST_CASE("CNOT after a superposition prepares the Bell state") {
    Statevector s(2);
    s.apply_ry(0, std::numbers::pi / 2); // (|00> + |10>)/sqrt 2
    s.apply_cnot(0, 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(s.amplitude(0) - cplx(inv_sqrt2, 0)) < 1e-12);
    CHECK(std::abs(s.amplitude(3) - cplx(inv_sqrt2, 0)) < 1e-12);
    CHECK(std::abs(s.amplitude(1)) < 1e-12);
    CHECK(std::abs(s.amplitude(2)) < 1e-12);
}

TEST_CASE("gate errors: bad qubit, equal control/target, non-unitary matrix") {
    Statevector s(2);
    CHECK_THROWS_AS(s.apply_1q_gate(2, pauli_x_gate()), std::out_of_range);
    CHECK_THROWS_AS(s.apply_cnot(1, 1), std::invalid_argument);
    Gate2 skew = identity_gate();
    skew.m[1] = cplx(0.5, 0);
    CHECK_THROWS_AS(s.apply_1q_gate(0, skew), std::invalid_argument);
}

TEST_CASE("norm preserved across 100 random gates") {
    Rng rng(1234);
    Statevector s(4);
    for (int i = 0; i < 100; ++i) {
        const int qubit = static_cast<int>(rng.uniform_below(4));
        const int which = static_cast<int>(rng.uniform_below(4));
        const double angle = 6.0 * rng.uniform() - 3.0;
        switch (which) {
        case 0: s.apply_rx(qubit, angle); break;
        case 1: s.apply_ry(qubit, angle); break;
        case 2: s.apply_rz(qubit, angle); break;
        default: {
            const int target = (qubit + 1 + static_cast<int>(rng.uniform_below(3))) % 4;
            s.apply_cnot(qubit, target);
        }
        }
    }
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
}

TEST_CASE("rotation followed by its inverse is the identity") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Statevector s(3);
        // Scramble into a generic state first.
        for (int q = 0; q < 3; ++q) {
            s.apply_ry(q, rng.uniform() * 3.0);
            s.apply_rx(q, rng.uniform() * 3.0);
        }
        const std::vector<cplx> before = s.amplitudes();
        const int qubit = static_cast<int>(rng.uniform_below(3));
        const double angle = 6.0 * rng.uniform() - 3.0;
        const int which = static_cast<int>(rng.uniform_below(3));
        switch (which) {
        case 0: s.apply_rx(qubit, angle); s.apply_rx(qubit, -angle); break;
        case 1: s.apply_ry(qubit, angle); s.apply_ry(qubit, -angle); break;
        default: s.apply_rz(qubit, angle); s.apply_rz(qubit, -angle); break;
        }
        CHECK(amp_distance(s, before) < 1e-10);
    }
}

TEST_CASE("Z expectation on qubit 0") {
    Statevector zeros(4);
    CHECK(zeros.expectation_z0() == doctest::Approx(1.0));

    Statevector flipped(4);
    flipped.apply_1q_gate(0, pauli_x_gate());
    CHECK(flipped.expectation_z0() == doctest::Approx(-1.0));

    Statevector mixed(4);
    mixed.apply_ry(0, std::numbers::pi / 2); // (|0000> + |1000>)/sqrt 2
    CHECK(std::abs(mixed.expectation_z0()) < 1e-12);
}

TEST_CASE("kernels match dense matrix algebra on random circuits") {
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(2));
        Statevector s(n);
        std::vector<cplx> dense(s.dim(), cplx(0, 0));
        dense[0] = cplx(1, 0);
        for (int step = 0; step < 12; ++step) {
            const int qubit = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            if (rng.uniform() < 0.3 && n > 1) {
                const int target = (qubit + 1) % n;
                s.apply_cnot(qubit, target);
                dense = testutil::matvec(testutil::cnot_matrix(qubit, target, n), dense);
            } else {
                const double angle = 6.0 * rng.uniform() - 3.0;
                s.apply_ry(qubit, angle);
                dense = testutil::matvec(testutil::lift_1q(ry_gate(angle), qubit, n), dense);
            }
        }
        CHECK(amp_distance(s, dense) < 1e-12);
    }
}
