#include "doctest.h"
#include "laxkit/calogero.hpp"

#include <cmath>
#include <random>

using namespace laxkit;

namespace {

const std::vector<Family> families{Family::A, Family::B, Family::C, Family::D};

// Square lattice with periods 8 and 8i: the layouts from sample_state keep every frequency well resolved
// at dt = 1e-3.
Lattice wide_lattice() { return Lattice(cplx(4, 0), cplx(0, 4)); }

CMState state(std::initializer_list<double> q, std::initializer_list<double> p) {
    CMState s{CVector(static_cast<Eigen::Index>(q.size())), CVector(static_cast<Eigen::Index>(p.size()))};
    Eigen::Index i = 0;
    for (double x : q) s.q(i++) = x;
    i = 0;
    for (double x : p) s.p(i++) = x;
    return s;
}

}  // namespace

TEST_CASE("A-family entries obey the addition theorem") {
    const CMSystem sys = CMSystem::make(Family::A, 3);
    const CMState s = state({0.1, 0.37, 0.71}, {0.2, -0.4, 0.1});
    for (cplx z : {cplx(0.23, 0.11), cplx(-0.3, 0.41), cplx(0.05, -0.2)}) {
        const CMatrix l = lax_matrix(sys, s, z);
        for (int i = 0; i < 3; ++i) {
            CHECK(l(i, i) == s.p(i));
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(std::abs(-l(i, j) * l(j, i) - sys.lattice.wp(s.q(i) - s.q(j)) + sys.lattice.wp(z)) < 1e-9);
        }
        // Elliptic in z entry by entry.
        const CMatrix shifted = lax_matrix(sys, s, z + 2.0 * sys.lattice.omega1());
        const CMatrix shifted2 = lax_matrix(sys, s, z - 2.0 * sys.lattice.omega2());
        CHECK((shifted - l).cwiseAbs().maxCoeff() < 1e-9 * l.cwiseAbs().maxCoeff());
        CHECK((shifted2 - l).cwiseAbs().maxCoeff() < 1e-9 * l.cwiseAbs().maxCoeff());
    }
    CMSystem free = sys;
    free.couplings.f.setZero();
    CHECK(lax_matrix(free, state({0.1, 0.37, 0.71}, {0, 0, 0}), cplx(0.2, 0.1)).isZero());
}

TEST_CASE("B-family columns and block structure") {
    const CMSystem sys = CMSystem::make(Family::B, 2);
    const CMState s = state({0.12, 0.31}, {0.3, -0.2});
    const cplx z(0.27, -0.18);
    const CMatrix l = lax_matrix(sys, s, z);
    REQUIRE(l.rows() == 5);
    for (int i = 0; i < 2; ++i) {
        const cplx ab = l(i, 2) * l(3 + i, 2);
        CHECK(std::abs(ab - (sys.lattice.wp(s.q(i)) - sys.lattice.wp(z - sys.q0))) < 1e-9);
        CHECK(l(2, 3 + i) == -l(i, 2));
    }
    CHECK(l(2, 2) == cplx(0));
    CHECK(algebra_membership_residual(sys, l) < 1e-12);
}

TEST_CASE("Lax samples lie in the algebra") {
    std::mt19937_64 rng(3);
    for (Family f : families)
        for (int n : {1, 2, 3}) {
            const CMSystem sys = CMSystem::make(f, n);
            const CMState s = sample_state(sys, rng);
            for (cplx z : {cplx(0.3, 0.2), cplx(-0.11, 0.37)}) {
                const CMatrix l = lax_matrix(sys, s, z);
                CHECK(l.rows() == sys.matrix_size());
                CHECK(algebra_membership_residual(sys, l) < 1e-12);
            }
        }
}

TEST_CASE("closed-form Hamiltonians") {
    // wp on the lattice Z + iZ from theta functions (mpmath, 30 digits).
    const CMSystem a = CMSystem::make(Family::A, 2);
    CHECK(hamiltonian(a, state({0.1, 0.45}, {0.3, -0.2})).real() == doctest::Approx(9.312319026134304).epsilon(1e-12));
    const CMSystem c = CMSystem::make(Family::C, 1);
    CHECK(hamiltonian(c, state({0.22}, {0.3})).real() == doctest::Approx(14.358220142586565).epsilon(1e-12));
    CMSystem phys = a;
    phys.physical_sign = true;
    const CMState s = state({0.1, 0.45}, {0.3, -0.2});
    CHECK(hamiltonian(phys, s) == -hamiltonian(a, s));
}

TEST_CASE("residue Hamiltonians reproduce the closed forms") {
    std::mt19937_64 rng(5);
    for (Family f : families)
        for (int n : {1, 2, 3})
            for (bool physical : {false, true}) {
                CMSystem sys = CMSystem::make(f, n, Lattice::from_tau(cplx(0.3, 1.2)));
                sys.physical_sign = physical;
                const CMState s = sample_state(sys, rng);
                const cplx closed = hamiltonian(sys, s) + residue_offset(sys);
                const cplx res = residue_hamiltonian(sys, s, 2, 1);
                CHECK(std::abs(res - closed) <= 1e-9 * std::abs(closed) + 1e-12);  // A with n = 1 has H = 0
            }
    const CMSystem b = CMSystem::make(Family::B, 2);
    CHECK(std::abs(residue_offset(b) + 4.0 * b.lattice.wp(b.q0)) < 1e-12);
    CHECK_THROWS_AS(residue_hamiltonian(b, sample_state(b, rng), 3, 1), std::invalid_argument);
}

TEST_CASE("trace of the A-family Lax matrix is the total momentum") {
    const CMSystem sys = CMSystem::make(Family::A, 3);
    const CMState s = state({0.1, 0.37, 0.71}, {0.2, -0.5, 0.1});
    const cplx total = s.p.sum();
    for (cplx z : {cplx(0.3, 0.2), cplx(0.6, -0.1), cplx(-0.2, 0.45), cplx(0.9, 0.3), cplx(0.01, 0.02)})
        CHECK(std::abs(spectral_invariants(sys, s, z, 1).traces[0] - total) < 1e-10);
    CHECK(std::abs(trace_residue(sys, s, 1, 1) - total) < 1e-10);
    // z^{m-1} lies below the pole order of tr L^2.
    CHECK(trace_residue(sys, s, 2, -2) == cplx(0));
}

TEST_CASE("equations of motion") {
    std::mt19937_64 rng(7);
    for (Family f : families)
        for (int n : {1, 2, 3}) {
            CMSystem sys = CMSystem::make(f, n, Lattice(), cplx(0, 1));
            sys.physical_sign = (n % 2 == 0);
            const CMState s = sample_state(sys, rng);
            const PhaseVelocity v = equations_of_motion(sys, s);
            const Gradient g = numeric_gradient([&](const CMState& x) { return hamiltonian(sys, x); }, s);
            const double scale = std::max(1.0, v.pdot.norm());
            CHECK((g.dp - v.qdot).norm() < 1e-6 * scale);
            CHECK((g.dq + v.pdot).norm() < 1e-6 * scale);
            if (f == Family::A) CHECK(std::abs(v.pdot.sum()) < 1e-9 * scale);
            CMState rest = s;
            rest.p.setZero();
            CHECK(equations_of_motion(sys, rest).qdot.isZero());
        }
}

TEST_CASE("integration") {
    CMSystem sys = CMSystem::make(Family::A, 3, Lattice(), cplx(0, 1));
    sys.physical_sign = true;
    const CMState s = state({0.15, 0.5, 0.82}, {0.4, -0.1, -0.3});
    const cplx h0 = hamiltonian(sys, s);

    const Trajectory none = integrate(sys, s, 0.0, 1e-3, Scheme::rk4);
    REQUIRE(none.states.size() == 1);
    CHECK(none.states[0].q == s.q);

    // Halving dt cuts the final energy error of rk4 by at least the fourth-order factor (measured ~32).
    auto err = [&](double dt) {
        return std::abs(hamiltonian(sys, integrate(sys, s, 2.0, dt, Scheme::rk4, 1 << 30).states.back()) - h0);
    };
    const double e1 = err(4e-3), e2 = err(2e-3);
    CHECK(e1 / e2 > 12.0);

    const Trajectory tr = integrate(sys, s, 10.0, 1e-3, Scheme::rk4, 100);
    CHECK_FALSE(tr.aborted);
    CHECK(tr.t.back() == doctest::Approx(10.0));
    double drift = 0;
    for (const auto& x : tr.states) drift = std::max(drift, std::abs(hamiltonian(sys, x) - h0) / std::abs(h0));
    CHECK(drift < 1e-6);

    // Leapfrog keeps the energy error bounded at second order.
    const Trajectory lf = integrate(sys, s, 2.0, 2e-3, Scheme::leapfrog, 1);
    double lf_drift = 0;
    for (const auto& x : lf.states) lf_drift = std::max(lf_drift, std::abs(hamiltonian(sys, x) - h0));
    CHECK(lf_drift < 1e-3);

    CHECK_THROWS_AS(integrate(sys, s, 1.0, 0.0, Scheme::rk4), std::invalid_argument);
    CHECK_THROWS_AS(parse_scheme("euler"), std::invalid_argument);
}

TEST_CASE("attractive collision stops the integration at the last good state") {
    CMSystem sys = CMSystem::make(Family::A, 2);
    sys.physical_sign = true;
    const Trajectory tr = integrate(sys, state({0.4, 0.6}, {0.5, -0.5}), 5.0, 1e-3, Scheme::rk4);
    CHECK(tr.aborted);
    CHECK_FALSE(tr.reason.empty());
    CHECK(tr.t.back() < 5.0);
    CHECK_NOTHROW(check_state(sys, tr.states.back()));
}

TEST_CASE("spectral invariants and isospectrality of the A and D2 flows") {
    CMSystem sys = CMSystem::make(Family::A, 3, wide_lattice(), cplx(0, 1));
    sys.physical_sign = true;
    std::mt19937_64 rng(9);
    const CMState s = sample_state(sys, rng);
    const cplx z0(2.4, 1.3);
    const SpectralInvariants inv = spectral_invariants(sys, s, z0, 4);
    // Characteristic polynomial vanishes at the eigenvalues.
    for (cplx ev : inv.eigenvalues) {
        cplx v = 0;
        for (cplx c : inv.charpoly) v = v * ev + c;
        CHECK(std::abs(v) < 1e-8 * std::pow(std::max(1.0, std::abs(ev)), 3));
    }
    for (Family f : {Family::A, Family::D}) {
        CMSystem g = CMSystem::make(f, f == Family::A ? 3 : 2, wide_lattice(), cplx(0, 1));
        g.physical_sign = true;
        const CMState g0 = sample_state(g, rng);
        const Trajectory tr = integrate(g, g0, 2.0, 1e-3, Scheme::rk4, 250);
        REQUIRE_FALSE(tr.aborted);
        const SpectralInvariants a = spectral_invariants(g, g0, z0, 4);
        for (const auto& x : tr.states) {
            const SpectralInvariants b = spectral_invariants(g, x, z0, 4);
            for (int p = 0; p < 4; ++p) CHECK(std::abs(a.traces[p] - b.traces[p]) < 1e-6 * std::max(1.0, std::abs(a.traces[p])));
            CHECK(eigenvalue_drift(a.eigenvalues, b.eigenvalues) < 1e-6);
        }
    }
}

TEST_CASE("eigenvalue matching") {
    const std::vector<cplx> a{1.0, cplx(0, 2), -3.0, 0.5};
    const std::vector<cplx> b{-3.0, 0.5, 1.0, cplx(0, 2)};
    CHECK(eigenvalue_drift(a, b) == 0.0);
    std::vector<cplx> c = b;
    c[0] += 0.03;  // relative 0.01 against |-3|
    CHECK(eigenvalue_drift(a, c) == doctest::Approx(0.01));
    CHECK_THROWS_AS(eigenvalue_drift(a, {1.0}), std::invalid_argument);
}

TEST_CASE("Poisson brackets") {
    CMSystem sys = CMSystem::make(Family::A, 3, wide_lattice(), cplx(0, 1));
    std::mt19937_64 rng(13);
    const CMState s = sample_state(sys, rng);
    const PhaseFunction h = [&](const CMState& x) { return hamiltonian(sys, x); };
    const PhaseFunction total = [](const CMState& x) { return x.p.sum(); };
    CHECK(poisson_bracket(h, h, s, true) == cplx(0));
    CHECK(std::abs(poisson_bracket(h, total, s)) < 1e-8);
    const PhaseFunction h2 = [&](const CMState& x) { return residue_hamiltonian(sys, x, 2, 1); };
    const PhaseFunction h3 = [&](const CMState& x) { return residue_hamiltonian(sys, x, 3, 1); };
    CHECK(std::abs(poisson_bracket(h2, h3, s)) < 1e-6);
    // Canonical pair: {q_1, p_1} = 1.
    const PhaseFunction q1 = [](const CMState& x) { return x.q(0); };
    const PhaseFunction p1 = [](const CMState& x) { return x.p(0); };
    CHECK(std::abs(poisson_bracket(q1, p1, s) - 1.0) < 1e-12);
}

TEST_CASE("Tyurin residue structure") {
    std::mt19937_64 rng(17);
    for (int n : {2, 3, 4}) {
        const CMSystem sys = CMSystem::make(Family::A, n);
        const TyurinResidueReport rep = tyurin_residue_check(sys, sample_state(sys, rng));
        REQUIRE(rep.residues.size() == static_cast<std::size_t>(n));
        CHECK(rep.passed(1e-9));
        for (const auto& r : rep.residues) CHECK(r.norm > 0.1);
    }
    const CMSystem one = CMSystem::make(Family::A, 1);
    const TyurinResidueReport single = tyurin_residue_check(one, state({0.3}, {0.7}));
    CHECK(single.residues[0].norm < 1e-12);
    CHECK_THROWS_AS(tyurin_residue_check(CMSystem::make(Family::D, 2), state({0.1, 0.3}, {0, 0})), std::invalid_argument);
}

TEST_CASE("rejected inputs") {
    CHECK_THROWS_AS(CMSystem::make(Family::G2, 2), std::invalid_argument);
    CHECK_THROWS_AS(CMSystem::make(Family::A, 0), std::invalid_argument);
    const CMSystem a = CMSystem::make(Family::A, 2);
    CHECK_THROWS_AS(hamiltonian(a, state({0.3, 0.3}, {0, 0})), CollisionError);
    CHECK_THROWS_AS(hamiltonian(a, state({0.3, 1.3}, {0, 0})), CollisionError);
    CHECK_THROWS_AS(lax_matrix(a, state({0.1, 0.4}, {0, 0}), cplx(0.4, 0)), PoleProximityError);
    CHECK_THROWS_AS(lax_matrix(a, state({0.1, 0.4}, {0, 0}), cplx(1.0, 1.0)), PoleProximityError);
    const CMSystem d = CMSystem::make(Family::D, 2);
    CHECK_THROWS_AS(hamiltonian(d, state({0.3, -0.3}, {0, 0})), CollisionError);
    CMSystem b = CMSystem::make(Family::B, 2);
    b.q0 = 0.2;
    CHECK_THROWS_AS(lax_matrix(b, state({0.2, 0.35}, {0, 0}), cplx(0.1, 0.3)), CollisionError);
    CHECK_THROWS_AS(hamiltonian(a, state({0.3}, {0})), std::invalid_argument);
}
