#include "helpers.hpp"

#include "qmediate/circuit.hpp"
#include "qmediate/qinfo.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qmediate;

namespace {

Statevector ghz4() {
    Statevector s(4);
    s.apply_ry(0, std::numbers::pi / 2);
    s.apply_cnot(0, 1);
    s.apply_cnot(1, 2);
    s.apply_cnot(2, 3);
    return s;
}

double matrix_distance(const DensityMatrix& a, const DensityMatrix& b) {
    double worst = 0.0;
    for (int r = 0; r < a.dim(); ++r) {
        for (int c = 0; c < a.dim(); ++c) {
            worst = std::max(worst, std::abs(a.at(r, c) - b.at(r, c)));
        }
    }
    return worst;
}

Statevector random_state(int n, Rng& rng) {
    std::vector<cplx> amps(std::size_t{1} << n);
    double norm2 = 0.0;
    for (cplx& a : amps) {
        a = cplx(rng.normal(), rng.normal());
        norm2 += std::norm(a);
    }
    for (cplx& a : amps) {
        a /= std::sqrt(norm2);
    }
    return Statevector::from_amplitudes(n, std::move(amps));
}

} // namespace

TEST_CASE("bipartition defaults and validation") {
    const Bipartition half = Bipartition::front_half(5);
    CHECK(half.subsystem_a == std::vector<int>{0, 1, 2});
    CHECK(half.subsystem_b() == std::vector<int>{3, 4});

    Bipartition bad;
    bad.n_qubits = 3;
    bad.subsystem_a = {0, 1, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.subsystem_a = {1, 0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reduced density matrix of product and Bell states") {
    Bipartition first;
    first.n_qubits = 2;
    first.subsystem_a = {0};

    const Statevector zeros(2);
    const DensityMatrix rho0 = reduced_density_matrix(zeros, first);
    CHECK(std::abs(rho0.at(0, 0) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(rho0.at(1, 1)) < 1e-12);

    Statevector bell(2);
    bell.apply_ry(0, std::numbers::pi / 2);
    bell.apply_cnot(0, 1);
    const DensityMatrix rho_bell = reduced_density_matrix(bell, first);
    CHECK(std::abs(rho_bell.at(0, 0) - cplx(0.5, 0)) < 1e-12);
    CHECK(std::abs(rho_bell.at(1, 1) - cplx(0.5, 0)) < 1e-12);
    CHECK(std::abs(rho_bell.at(0, 1)) < 1e-12);
}

TEST_CASE("partial trace matches the double-loop oracle on random states") {
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(4)); // up to 5 qubits
        const Statevector s = random_state(n, rng);
        Bipartition part;
        part.n_qubits = n;
        for (int q = 0; q < n; ++q) {
            if (rng.uniform() < 0.5) {
                part.subsystem_a.push_back(q);
            }
        }
        if (part.subsystem_a.empty() || static_cast<int>(part.subsystem_a.size()) == n) {
            part = Bipartition::front_half(n);
        }
        const DensityMatrix fast = reduced_density_matrix(s, part);
        const DensityMatrix oracle = testutil::partial_trace_oracle(s, part);
        CHECK(matrix_distance(fast, oracle) < 1e-10);
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("density matrix invariants on simulated states") {
    Rng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const Statevector s = random_state(4, rng);
        const DensityMatrix rho = reduced_density_matrix(s, Bipartition::front_half(4));
        CHECK(rho.hermiticity_defect() < 1e-10);
        CHECK(std::abs(rho.trace_real() - 1.0) < 1e-10);
        for (const double lambda : hermitian_eigenvalues(rho)) {
            CHECK(lambda > -1e-10);
        }
    }
}

TEST_CASE("hermitian eigenvalues of pinned matrices") {
    DensityMatrix half(2);
    half.at(0, 0) = cplx(0.5, 0);
    half.at(1, 1) = cplx(0.5, 0);
    const auto flat = hermitian_eigenvalues(half);
    CHECK(flat[0] == doctest::Approx(0.5));
    CHECK(flat[1] == doctest::Approx(0.5));

    DensityMatrix pure(4);
    pure.at(0, 0) = cplx(1, 0);
    const auto spike = hermitian_eigenvalues(pure);
    CHECK(spike[0] == doctest::Approx(1.0));
    CHECK(spike[3] == doctest::Approx(0.0));

    // Characteristic polynomial by hand: 0.5 +- sqrt(0.05).
    DensityMatrix two(2);
    two.at(0, 0) = cplx(0.6, 0);
    two.at(0, 1) = cplx(0.2, 0);
    two.at(1, 0) = cplx(0.2, 0);
    two.at(1, 1) = cplx(0.4, 0);
    const auto pair = hermitian_eigenvalues(two);
    CHECK(pair[0] == doctest::Approx(0.5 + std::sqrt(0.05)).epsilon(1e-10));
    CHECK(pair[1] == doctest::Approx(0.5 - std::sqrt(0.05)).epsilon(1e-10));

    DensityMatrix skew(2);
    skew.at(0, 1) = cplx(0.3, 0);
    CHECK_THROWS_AS(hermitian_eigenvalues(skew), std::invalid_argument);
}

TEST_CASE("eigenvalues sum to the trace") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Statevector s = random_state(5, rng);
        const DensityMatrix rho = reduced_density_matrix(s, Bipartition::front_half(5));
        const auto values = hermitian_eigenvalues(rho);
        double sum = 0.0;
        for (const double v : values) {
            sum += v;
        }
        CHECK(std::abs(sum - rho.trace_real()) < 1e-9);
    }
}

TEST_CASE("von Neumann entropy on pinned spectra") {
    DensityMatrix pure(2);
    pure.at(0, 0) = cplx(1, 0);
    CHECK(std::abs(von_neumann_entropy(pure)) < 1e-12);

    DensityMatrix mixed(4);
    for (int i = 0; i < 4; ++i) {
        mixed.at(i, i) = cplx(0.25, 0);
    }
    CHECK(von_neumann_entropy(mixed) == doctest::Approx(2.0).epsilon(1e-12));

    DensityMatrix skewed(2);
    skewed.at(0, 0) = cplx(0.9, 0);
    skewed.at(1, 1) = cplx(0.1, 0);
    // Independent evaluation: -0.9 log2 0.9 - 0.1 log2 0.1.
    CHECK(von_neumann_entropy(skewed) == doctest::Approx(0.4689955936).epsilon(1e-9));
}

TEST_CASE("purity and linear entropy") {
    DensityMatrix pure(2);
    pure.at(0, 0) = cplx(1, 0);
    CHECK(purity(pure) == doctest::Approx(1.0));
    CHECK(linear_entropy(pure) == doctest::Approx(0.0));

    DensityMatrix mixed(2);
    mixed.at(0, 0) = cplx(0.5, 0);
    mixed.at(1, 1) = cplx(0.5, 0);
    CHECK(purity(mixed) == doctest::Approx(0.5));
    CHECK(linear_entropy(mixed) == doctest::Approx(0.5));

    DensityMatrix skewed(2);
    skewed.at(0, 0) = cplx(0.9, 0);
    skewed.at(1, 1) = cplx(0.1, 0);
    CHECK(purity(skewed) == doctest::Approx(0.82));
    CHECK(linear_entropy(skewed) == doctest::Approx(0.18));
}

TEST_CASE("mutual information: product, Bell, and random pure states") {
    Bipartition cut;
    cut.n_qubits = 2;
    cut.subsystem_a = {0};

    const Statevector product = encode_features({1.1, -0.4});
    Bipartition cut2 = cut;
    CHECK(std::abs(mutual_information(product, cut2)) < 1e-9);

    Statevector bell(2);
    bell.apply_ry(0, std::numbers::pi / 2);
    bell.apply_cnot(0, 1);
    CHECK(mutual_information(bell, cut) == doctest::Approx(2.0).epsilon(1e-9));

    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const Statevector s = random_state(4, rng);
        const Bipartition half = Bipartition::front_half(4);
        const double i_ab = mutual_information(s, half);
        const double s_a = von_neumann_entropy(reduced_density_matrix(s, half));
        CHECK(std::abs(i_ab - 2.0 * s_a) < 1e-9);
    }
}

TEST_CASE("Schmidt symmetry: S_A equals S_B for pure states") {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_below(2));
        const Statevector s = random_state(n, rng);
        const Bipartition part = Bipartition::front_half(n);
        Bipartition flipped;
        flipped.n_qubits = n;
        flipped.subsystem_a = part.subsystem_b();
        const double s_a = von_neumann_entropy(reduced_density_matrix(s, part));
        const double s_b = von_neumann_entropy(reduced_density_matrix(s, flipped));
        CHECK(std::abs(s_a - s_b) < 1e-9);
        CHECK(s_a > -1e-12);
        CHECK(s_a < static_cast<double>(part.subsystem_a.size()) + 1e-9);
    }
}

TEST_CASE("mediator vector on pinned states") {
    const Bipartition half = Bipartition::front_half(4);

    SUBCASE("product state") {
        const MediatorResult r = compute_mediators(Statevector(4), half);
        CHECK(std::abs(r.m.s_a) < 1e-12);
        CHECK(r.m.gamma_a == doctest::Approx(1.0));
        CHECK(std::abs(r.m.l_a) < 1e-12);
        CHECK(std::abs(r.m.i_ab) < 1e-9);
        CHECK(r.s_ab < 1e-10);
    }

    SUBCASE("GHZ state: rho_A = diag(1/2, 0, 0, 1/2) by hand") {
        const MediatorResult r = compute_mediators(ghz4(), half);
        CHECK(r.m.s_a == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.m.gamma_a == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r.m.l_a == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r.m.i_ab == doctest::Approx(2.0).epsilon(1e-9));
    }

    SUBCASE("two Bell pairs straddling the cut: rho_A maximally mixed") {
        // Bell pairs on (0,2) and (1,3); A = {0,1} holds one qubit of each.
        Statevector s(4);
        s.apply_ry(0, std::numbers::pi / 2);
        s.apply_cnot(0, 2);
        s.apply_ry(1, std::numbers::pi / 2);
        s.apply_cnot(1, 3);
        const MediatorResult r = compute_mediators(s, half);
        CHECK(r.m.s_a == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(r.m.gamma_a == doctest::Approx(0.25).epsilon(1e-9));
        CHECK(r.m.l_a == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(r.m.i_ab == doctest::Approx(4.0).epsilon(1e-9));
        // Cross-check against the independent partial-trace oracle.
        const DensityMatrix oracle = testutil::partial_trace_oracle(s, half);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(oracle.at(i, i) - cplx(0.25, 0)) < 1e-10);
        }
    }
}

TEST_CASE("rank-2 mediator identities on random circuits") {
    Rng rng(808);
    const Bipartition half = Bipartition::front_half(4);
    for (int trial = 0; trial < 40; ++trial) {
        const Topology topology =
            all_topologies()[static_cast<std::size_t>(rng.uniform_below(5))];
        const CircuitSpec spec{topology, 4, 1 + static_cast<int>(rng.uniform_below(3))};
        std::vector<double> x(4);
        for (double& v : x) {
            v = 4.0 * rng.uniform() - 2.0;
        }
        Statevector s = encode_features(x);
        apply_ansatz(s, spec, testutil::random_theta(spec, rng));
        const MediatorResult r = compute_mediators(s, half);
        CHECK(r.s_ab < 1e-10);
        CHECK(std::abs(r.m.i_ab - 2.0 * r.m.s_a) < 1e-9);
        CHECK(std::abs(r.m.l_a - (1.0 - r.m.gamma_a)) < 1e-12);
        CHECK(r.m.s_a > -1e-12);
        CHECK(r.m.s_a < 2.0 + 1e-9);
    }
}
