#include "doctest.h"
#include "laxkit/formal.hpp"

#include <random>

using namespace laxkit;

namespace {

struct Grading {
    Family f;
    int n;
    int root;
};

const std::vector<Grading> kSmallCatalog{{Family::A, 3, 1}, {Family::D, 3, 1}, {Family::C, 2, 1}, {Family::C, 2, 2},
                                         {Family::B, 2, 1}, {Family::B, 2, 2}, {Family::G2, 2, 2}};

}  // namespace

TEST_CASE("commutator of Lax expansions") {
    for (const auto& c : kSmallCatalog) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        const int k = dec->depth();
        std::mt19937_64 rng(100 + static_cast<unsigned>(c.n));
        for (int trial = 0; trial < 15; ++trial) {
            const MatrixLaurent l = random_lax(dec, rng, 2 * k + 1);
            const MatrixLaurent l2 = random_lax(dec, rng, 2 * k);
            CHECK(commutator(l, l).is_zero());
            const MatrixLaurent c12 = commutator(l, l2);
            CHECK(c12.pmin() == -2 * k);
            CHECK(c12.trunc() == k);
            CHECK(validate_lax(c12).empty());
            CHECK(commutator(l2, l) == c12 * Exact(-1));
        }
    }
}

TEST_CASE("validate_lax") {
    const auto gl2 = catalog_grading(Family::A, 2, 1);
    CHECK(validate_lax(MatrixLaurent::zero(gl2, -1, 3)).empty());

    // depth 1: a g_0 component at z^-1 is a violation at p = -1
    MatrixLaurent bad = MatrixLaurent::zero(gl2, -1, 1);
    bad.set(-1, gl2->subspace(0).front());
    const auto v = validate_lax(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].degree == -1);
    CHECK(v[0].component_degree == 0);

    // sp(4) by alpha_1 (depth 2): g_-2 inside the z^-1 coefficient is allowed, g_-1 at z^-2 is not
    const auto sp = catalog_grading(Family::C, 2, 1);
    MatrixLaurent ok = MatrixLaurent::zero(sp, -2, 2);
    ok.set(-1, sp->subspace(-2).front());
    CHECK(validate_lax(ok).empty());
    MatrixLaurent low = MatrixLaurent::zero(sp, -2, 2);
    low.set(-2, sp->subspace(-1).front());
    REQUIRE(validate_lax(low).size() == 1);
    CHECK(validate_lax(low)[0].component_degree == -1);
    // anything below -k is a violation
    MatrixLaurent deep = MatrixLaurent::zero(sp, -3, 2);
    deep.set(-3, sp->subspace(-2).front());
    CHECK_FALSE(validate_lax(deep).empty());
}

TEST_CASE("M-operator commutator carries the nu h / z term") {
    for (const auto& c : kSmallCatalog) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        const int k = dec->depth();
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 5; ++trial) {
            const MatrixLaurent l = random_lax(dec, rng, 2 * k + 2);
            const MOpExpansion m = random_mop(dec, rng, 2 * k + 2);
            CHECK(validate_mop(m).empty());
            const MatrixLaurent t = commutator(l, m);
            for (int p = t.pmin(); p < -k - 1; ++p) CHECK(t.coefficient(p).is_zero());
            CHECK(t.coefficient(-k - 1) == l.coefficient(-k) * (m.nu * Exact(k)));
        }
    }
}

TEST_CASE("pole elimination") {
    for (const auto& c : kSmallCatalog) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        const int k = dec->depth();
        std::mt19937_64 rng(3);

        MatrixLaurent single = MatrixLaurent::zero(dec, -k, k);
        single.set(-k, dec->subspace(-k).front());
        const MatrixLaurent moved = conjugate_pole_elimination(single);
        CHECK(moved.lowest_degree() == 0);
        CHECK(moved.coefficient(0) == dec->subspace(-k).front());

        for (int trial = 0; trial < 10; ++trial) {
            const MatrixLaurent l = random_lax(dec, rng, 3 * k + 2);
            const MatrixLaurent e = conjugate_pole_elimination(l);
            REQUIRE(e.lowest_degree());
            CHECK(*e.lowest_degree() >= 0);
            const MatrixLaurent back = conjugate_pole_elimination(e, -1);
            CHECK(back.trunc() == l.trunc() - 2 * k);
            CHECK(back == l);
        }

        MOpExpansion m = random_mop(dec, rng, k + 1);
        ExactMatrix m0 = m.series.coefficient(0);
        m0 += dec->subspace(1).front();
        m.series.set(0, m0);
        const MatrixLaurent em = conjugate_pole_elimination(m.series);
        REQUIRE(em.lowest_degree());
        CHECK(*em.lowest_degree() < 0);
    }
}

TEST_CASE("tangency relations") {
    for (const auto& c : kSmallCatalog) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        const int k = dec->depth();
        std::mt19937_64 rng(19);
        const MatrixLaurent l = random_lax(dec, rng, 2 * k + 2);

        MOpExpansion zero_m{Exact(0), MatrixLaurent::zero(dec, -k, 2 * k + 2)};
        CHECK(tangency_relations_residual(l, MatrixLaurent::zero(dec, -k, 0), zero_m, Exact(0)).vanishes());

        const MOpExpansion m = random_mop(dec, rng, 2 * k + 2);
        const MatrixLaurent ldot = tangency_velocity(l, m);
        const Exact zdot = -m.nu;
        CHECK(tangency_relations_residual(l, ldot, m, zdot).vanishes());
        CHECK_FALSE(tangency_relations_residual(l, ldot, m, Exact(0)).vanishes());

        const MatrixLaurent lm = commutator(l, m);
        const auto lhs = total_derivative(l, ldot, zdot, -k - 1, 0);
        for (const auto& [p, coeff] : lhs) CHECK(lm.coefficient(p) == coeff);
        for (int p = lm.pmin(); p < -k - 1; ++p) CHECK(lm.coefficient(p).is_zero());
    }
}

TEST_CASE("Tyurin forms under random conjugation") {
    const std::vector<Grading> cases{{Family::A, 2, 1}, {Family::A, 3, 1}, {Family::A, 4, 1}, {Family::D, 3, 1},
                                     {Family::D, 4, 1}, {Family::B, 2, 1}, {Family::B, 3, 1}, {Family::C, 2, 1},
                                     {Family::C, 3, 1}, {Family::G2, 2, 2}};
    for (const auto& c : cases) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 6; ++trial) {
            const ExactMatrix g = random_conjugator(dec->algebra(), rng);
            if (c.f != Family::A) CHECK(g.transpose() * dec->algebra().form() * g == dec->algebra().form());
            const MatrixLaurent e = conjugated(random_lax(dec, rng, 2), g);
            const TyurinReport r = validate_tyurin_form(*dec, e, g);
            CHECK_MESSAGE(r.passed(), dec->algebra().name());
            if (c.f == Family::A) {
                const ExactMatrix lm1 = e.coefficient(-1);
                CHECK((lm1 * lm1).is_zero());
                CHECK(rank(lm1) <= 1);
                CHECK(r.kappa.has_value());
            }
        }
    }
}

TEST_CASE("Tyurin validator rejects what it should") {
    const auto gl3 = catalog_grading(Family::A, 3, 1);
    std::mt19937_64 rng(2);
    const ExactMatrix g = random_conjugator(gl3->algebra(), rng);
    const ExactMatrix other = random_conjugator(gl3->algebra(), rng);
    const MatrixLaurent e = conjugated(random_lax(gl3, rng, 2), g);
    CHECK_FALSE(validate_tyurin_form(*gl3, e, other).passed());

    const auto sp = catalog_grading(Family::C, 2, 1);
    const ExactMatrix gs = random_conjugator(sp->algebra(), rng);
    MatrixLaurent es = conjugated(random_lax(sp, rng, 2), gs);
    es.set(-2, es.coefficient(-2) + gs * sp->subspace(-1).front() * inverse(gs));
    CHECK_FALSE(validate_tyurin_form(*sp, es, gs).passed());

    CHECK_THROWS_AS(validate_tyurin_form(*catalog_grading(Family::G2, 2, 1), e, g), std::invalid_argument);
    CHECK_THROWS_AS(validate_tyurin_form(*catalog_grading(Family::C, 2, 2), e, g), std::invalid_argument);
    CHECK_THROWS_AS(validate_tyurin_form(*catalog_grading(Family::D, 2, 1), e, g), std::invalid_argument);
}
