#include "doctest.h"
#include "laxkit/elliptic.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace laxkit;

namespace {

std::vector<cplx> samples(const Lattice& l, std::mt19937_64& rng, std::size_t count, double keep_out) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<cplx> out;
    while (out.size() < count) {
        const cplx z(u(rng), u(rng));
        if (l.lattice_distance(z) >= keep_out) out.push_back(z);
    }
    return out;
}

std::vector<Lattice> lattices() { return {Lattice::from_tau(cplx(0, 1)), Lattice::from_tau(cplx(0.3, 1.2))}; }

}  // namespace

TEST_CASE("square lattice constants") {
    const Lattice l;
    // g2 of the lattice Z + iZ (lemniscatic case), g3 = 0.
    CHECK(l.g2().real() == doctest::Approx(189.07272012923385).epsilon(1e-12));
    CHECK(std::abs(l.g3()) < 1e-9);
    CHECK(l.legendre_residual() < 1e-12);
    CHECK(std::abs(l.eta1() - cplx(M_PI / 2, 0)) < 1e-12);
}

TEST_CASE("parity, normalization and the pole guard") {
    std::mt19937_64 rng(1);
    for (const auto& l : lattices()) {
        for (const auto& z : samples(l, rng, 50, 0.1)) {
            CHECK(std::abs(l.sigma(-z) + l.sigma(z)) < 1e-12 * std::abs(l.sigma(z)));
            CHECK(std::abs(l.wp(-z) - l.wp(z)) < 1e-12 * std::abs(l.wp(z)));
            CHECK(std::abs(l.zeta(-z) + l.zeta(z)) < 1e-12 * std::abs(l.zeta(z)));
        }
        // wp(z) - 1/z^2 = g2 z^2 / 20 + O(z^4)
        const cplx z(1e-2, 5e-3);
        CHECK(std::abs(l.wp(z) - 1.0 / (z * z) - l.g2() * z * z / 20.0) < 1e-6);
        CHECK(std::abs(l.sigma(z) - z) < 1e-8);
        CHECK(std::abs(l.sigma(2.0 * l.omega1())) < 1e-12);
        CHECK_THROWS_AS(l.wp(2.0 * l.omega2() + cplx(1e-5, 0)), PoleProximityError);
        CHECK_THROWS_AS(l.zeta(cplx(0, 0)), PoleProximityError);
        CHECK_THROWS_AS(l.addition_identity_residual(cplx(0.3, 0.2), cplx(0.3, 0.2)), PoleProximityError);
    }
}

TEST_CASE("addition theorem, differential equation and periodicity") {
    std::mt19937_64 rng(2);
    for (const auto& l : lattices()) {
        const auto zs = samples(l, rng, 300, 0.25);
        const auto us = samples(l, rng, 300, 0.25);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const cplx z = zs[i], u = us[i];
            if (l.lattice_distance(z + u) < 0.25 || l.lattice_distance(z - u) < 0.25) continue;
            const double r = l.addition_identity_residual(z, u);
            CHECK(r < 1e-10);
            CHECK(l.addition_identity_residual(z + 2.0 * l.omega1(), u) < 1e-9);
            const cplx p = l.wp(z), pp = l.wp_prime(z);
            CHECK(std::abs(pp * pp - 4.0 * p * p * p + l.g2() * p + l.g3()) < 1e-9);
            CHECK(std::abs(l.wp(z + 2.0 * l.omega1()) - p) < 1e-10);
            CHECK(std::abs(l.wp(z + 2.0 * l.omega2()) - p) < 1e-10);
            const cplx s = l.sigma(z);
            CHECK(std::abs(l.sigma(z + 2.0 * l.omega1()) + s * std::exp(2.0 * l.eta1() * (z + l.omega1()))) <
                  1e-10 * std::abs(l.sigma(z + 2.0 * l.omega1())));
            CHECK(std::abs(l.zeta(z + 2.0 * l.omega2()) - l.zeta(z) - 2.0 * l.eta2()) < 1e-10);
            const double h = 1e-4;
            CHECK(std::abs((l.zeta(z + h) - l.zeta(z - h)) / (2 * h) + p) < 1e-6 * std::max(1.0, std::abs(p)));
            CHECK(std::abs((l.wp(z + h) - l.wp(z - h)) / (2 * h) - pp) < 1e-6 * std::max(1.0, std::abs(pp)));
        }
    }
}

TEST_CASE("reduction to the fundamental domain does not change the lattice functions") {
    // tau and (tau + 1), -1/tau describe the same lattice up to basis change.
    const cplx tau(0.3, 1.2);
    const Lattice a = Lattice::from_tau(tau);
    const Lattice b(cplx(0.5, 0), (tau + 1.0) / 2.0);
    const Lattice c(tau / 2.0, cplx(-0.5, 0));
    std::mt19937_64 rng(3);
    for (const auto& z : samples(a, rng, 40, 0.2)) {
        CHECK(std::abs(a.wp(z) - b.wp(z)) < 1e-10 * std::abs(a.wp(z)));
        CHECK(std::abs(a.wp(z) - c.wp(z)) < 1e-10 * std::abs(a.wp(z)));
        CHECK(std::abs(a.sigma(z) - c.sigma(z)) < 1e-10 * std::abs(a.sigma(z)));
    }
    CHECK(b.legendre_residual() < 1e-12);
    CHECK(c.legendre_residual() < 1e-12);
    CHECK_THROWS_AS(Lattice(cplx(0.5, 0), cplx(0, -0.5)), std::invalid_argument);
}
