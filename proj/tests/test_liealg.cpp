#include "doctest.h"
#include "laxkit/liealg.hpp"

#include <random>

using namespace laxkit;

namespace {

std::vector<int> expansion_of(const RootSystem& rs) { return rs.highest_expansion; }

std::vector<std::size_t> degree_dims(const GradedDecomposition& dec) {
    std::vector<std::size_t> out;
    for (int p = -dec.depth(); p <= dec.depth(); ++p) out.push_back(dec.dim(p));
    return out;
}

}  // namespace

TEST_CASE("root systems") {
    const auto d4 = build_root_system(Family::D, 4);
    CHECK(d4.positive_roots.size() == 12);
    CHECK(expansion_of(d4) == std::vector<int>{1, 2, 1, 1});

    for (int n = 2; n <= 5; ++n) {
        const auto c = build_root_system(Family::C, n);
        std::vector<int> theta(static_cast<std::size_t>(n), 2);
        theta.back() = 1;
        CHECK(expansion_of(c) == theta);
        CHECK(c.positive_roots.size() == static_cast<std::size_t>(n * n));
        const auto b = build_root_system(Family::B, n);
        CHECK(b.positive_roots.size() == static_cast<std::size_t>(n * n));
        const auto a = build_root_system(Family::A, n + 1);
        CHECK(a.positive_roots.size() == static_cast<std::size_t>(n * (n + 1) / 2));
        CHECK(a.highest_expansion == std::vector<int>(static_cast<std::size_t>(n), 1));
    }
    for (int n = 3; n <= 6; ++n)
        CHECK(build_root_system(Family::D, n).positive_roots.size() == static_cast<std::size_t>(n * (n - 1)));

    const auto g2 = build_root_system(Family::G2, 2);
    CHECK(g2.positive_roots.size() == 6);
    CHECK(expansion_of(g2) == std::vector<int>{3, 2});

    CHECK_THROWS(build_root_system(Family::G2, 3));
    CHECK_THROWS(build_root_system(Family::D, 2));
    CHECK_THROWS(build_root_system(Family::A, 1));
}

TEST_CASE("depth of simple-root gradings") {
    CHECK(grading_by_simple_root(build_root_system(Family::A, 4), 1).depth == 1);
    CHECK(grading_by_simple_root(build_root_system(Family::C, 3), 1).depth == 2);
    CHECK(grading_by_simple_root(build_root_system(Family::C, 3), 3).depth == 1);
    CHECK(grading_by_simple_root(build_root_system(Family::B, 3), 3).depth == 2);
    CHECK(grading_by_simple_root(build_root_system(Family::G2, 2), 1).depth == 3);
    CHECK(grading_by_simple_root(build_root_system(Family::G2, 2), 2).depth == 2);
    const auto g = grading_by_simple_root(build_root_system(Family::D, 4), 2);
    const auto gd = grading_by_simple_root(build_root_system(Family::D, 4), 2, true);
    for (std::size_t i = 0; i < g.degrees.size(); ++i) {
        CHECK(g.degrees[i] <= 0);
        CHECK(gd.degrees[i] == -g.degrees[i]);
    }
    CHECK_THROWS(grading_by_simple_root(build_root_system(Family::D, 4), 5));
}

TEST_CASE("matrix realizations") {
    CHECK(matrix_realization(Family::A, 3).dim() == 9);
    CHECK(matrix_realization(Family::D, 2).dim() == 6);
    CHECK(matrix_realization(Family::D, 4).dim() == 28);
    CHECK(matrix_realization(Family::C, 3).dim() == 21);
    CHECK(matrix_realization(Family::B, 3).dim() == 21);
    CHECK(special_linear(3).dim() == 8);

    const auto g2 = matrix_realization(Family::G2, 2);
    CHECK(g2.dim() == 14);
    CHECK(g2.size() == 7);
    const ExactMatrix& s = g2.form();
    for (const auto& x : g2.basis()) {
        CHECK((x.transpose() * s + s * x).is_zero());
        CHECK(g2.contains(x.transpose()));
    }
    // a generic 7x7 so(7) element is not in G2
    const auto so7 = matrix_realization(Family::B, 3);
    int outside = 0;
    for (const auto& x : so7.basis())
        if (!g2.contains(x)) ++outside;
    CHECK(outside > 0);

    for (Family f : {Family::B, Family::C, Family::D}) {
        const auto alg = matrix_realization(f, 3);
        for (const auto& x : alg.basis()) CHECK((x.transpose() * alg.form() + alg.form() * x).is_zero());
    }
}

TEST_CASE("graded subspaces") {
    auto gl3 = std::make_shared<const MatrixAlgebra>(matrix_realization(Family::A, 3));
    ExactVector d{Exact(-1), Exact(0), Exact(0)};
    const auto dec = graded_subspaces(gl3, ExactMatrix::diagonal(d));
    CHECK(dec.depth() == 1);
    CHECK(degree_dims(dec) == std::vector<std::size_t>{2, 5, 2});

    const auto zero = graded_subspaces(gl3, ExactMatrix(3, 3));
    CHECK(zero.depth() == 0);
    CHECK(zero.dim(0) == 9);

    ExactVector half{Exact::fraction(1, 2), Exact(0), Exact(0)};
    CHECK_THROWS_AS(graded_subspaces(gl3, ExactMatrix::diagonal(half)), std::invalid_argument);

    for (int n = 2; n <= 4; ++n) {
        const auto sp = catalog_grading(Family::C, n, 1);
        CHECK(sp->depth() == 2);
        CHECK(sp->dim(-2) == 1);
        CHECK(sp->dim(-1) == static_cast<std::size_t>(2 * n - 2));
    }
    const auto c3 = catalog_grading(Family::C, 3, 1);
    CHECK(degree_dims(*c3) == std::vector<std::size_t>{1, 4, 11, 4, 1});
    CHECK(catalog_grading(Family::G2, 2, 1)->depth() == 3);
    CHECK(catalog_grading(Family::G2, 2, 2)->depth() == 2);
}

TEST_CASE("ad h eigenvalues agree with root-system degrees") {
    struct Case {
        Family f;
        int n;
        int root;
    };
    for (const Case c : {Case{Family::A, 4, 2}, Case{Family::B, 3, 1}, Case{Family::B, 3, 3}, Case{Family::C, 3, 2},
                         Case{Family::D, 4, 2}, Case{Family::D, 4, 4}, Case{Family::G2, 2, 1}, Case{Family::G2, 2, 2}}) {
        const auto rs = build_root_system(c.f, c.n);
        const auto rg = grading_by_simple_root(rs, c.root);
        const auto dec = catalog_grading(c.f, c.n, c.root);
        CHECK(dec->depth() == rg.depth);
        for (int p = 1; p <= rg.depth; ++p) {
            const auto count = static_cast<std::size_t>(std::count(rg.degrees.begin(), rg.degrees.end(), -p));
            CHECK(dec->dim(-p) == count);
            CHECK(dec->dim(p) == count);
        }
    }
}

TEST_CASE("grading diagnostics on the catalog") {
    struct Case {
        Family f;
        int n;
        int root;
    };
    for (const Case c : {Case{Family::A, 3, 1}, Case{Family::D, 3, 1}, Case{Family::D, 2, 1}, Case{Family::C, 2, 1},
                         Case{Family::C, 2, 2}, Case{Family::B, 2, 1}, Case{Family::B, 2, 2}, Case{Family::G2, 2, 2},
                         Case{Family::G2, 2, 1}}) {
        const auto dec = catalog_grading(c.f, c.n, c.root);
        const auto diag = check_grading(*dec);
        CHECK(diag.all());
        std::mt19937_64 rng(5);
        const ExactMatrix x = dec->algebra().random_element(rng);
        ExactMatrix sum(x.rows(), x.cols());
        for (const auto& [p, part] : dec->components(x)) {
            CHECK(commutator(dec->grading_element(), part) == part * Exact(p));
            sum += part;
        }
        CHECK(sum == x);
    }
}

TEST_CASE("mist identity") {
    for (int n = 2; n <= 5; ++n) {
        CHECK(check_mist_identity(*catalog_grading(Family::A, n, 1)) == 0);
        CHECK(check_mist_identity(*catalog_grading(Family::C, n, 1)) == 0);
        if (n >= 3) CHECK(check_mist_identity(*catalog_grading(Family::D, n, 1)) == 0);
        const auto b = catalog_grading(Family::B, n, 1);
        CHECK(check_mist_identity(*b) != 0);
        CHECK(mist_balance(*b, 2, 2 * n + 1) == 0);
    }
    CHECK(check_mist_identity(*catalog_grading(Family::G2, 2, 2)) == 0);
    CHECK(check_mist_identity(*catalog_grading(Family::G2, 2, 1)) != 0);
}

TEST_CASE("invariant degrees and Hamiltonian counts") {
    CHECK(invariant_degrees(Family::C, 2) == std::vector<int>{2, 4});
    CHECK(invariant_degrees(Family::G2, 2) == std::vector<int>{2, 6});
    CHECK(invariant_degrees(Family::D, 4) == std::vector<int>{2, 4, 4, 6});
    CHECK(check_degree_identity(Family::A, 2) == 0);
    for (int n = 2; n <= 7; ++n) {
        CHECK(check_degree_identity(Family::A, n) == 0);
        CHECK(check_degree_identity(Family::B, n) == 0);
        CHECK(check_degree_identity(Family::C, n) == 0);
        if (n >= 3) CHECK(check_degree_identity(Family::D, n) == 0);
    }
    CHECK(check_degree_identity(Family::G2, 2) == 0);

    CHECK(hamiltonian_count(Family::C, 2, 4, 2).count == 22);
    CHECK(hamiltonian_count(Family::C, 2, 0, 1).count == 0);
    for (long genus = 2; genus <= 4; ++genus)
        for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::G2}) {
            const int n = f == Family::G2 ? 2 : 4;
            const auto hc = hamiltonian_count(f, n, 2 * genus - 2, genus);
            CHECK(hc.count == simple_dimension(f, n) * (genus - 1));
            CHECK(hc.identity_residual == 0);
        }
}
