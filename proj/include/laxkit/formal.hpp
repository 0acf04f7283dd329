#pragma once

#include "laxkit/liealg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace laxkit {

// Truncated matrix Laurent series sum_{p=pmin}^{trunc} X_p z^p. Coefficients above `trunc` are
// unknown, not zero. The decomposition pointer may be null for series with no attached grading.
class MatrixLaurent {
public:
    MatrixLaurent() = default;
    MatrixLaurent(std::shared_ptr<const GradedDecomposition> dec, std::size_t size, int pmin, int trunc);
    static MatrixLaurent zero(std::shared_ptr<const GradedDecomposition> dec, int pmin, int trunc);

    const std::shared_ptr<const GradedDecomposition>& dec() const { return dec_; }
    std::size_t size() const { return size_; }
    int pmin() const { return pmin_; }
    int trunc() const { return trunc_; }

    // Zero below pmin; throws std::out_of_range above trunc.
    ExactMatrix coefficient(int p) const;
    void set(int p, ExactMatrix m);

    bool is_zero() const;
    std::optional<int> lowest_degree() const;
    MatrixLaurent truncated(int trunc) const;

    MatrixLaurent& operator+=(const MatrixLaurent& o);
    MatrixLaurent& operator*=(const Exact& s);
    friend MatrixLaurent operator+(MatrixLaurent a, const MatrixLaurent& b) { return a += b; }
    friend MatrixLaurent operator*(MatrixLaurent a, const Exact& s) { return a *= s; }
    // Equal on the common reliable range.
    friend bool operator==(const MatrixLaurent& a, const MatrixLaurent& b);

private:
    std::shared_ptr<const GradedDecomposition> dec_;
    std::size_t size_ = 0;
    int pmin_ = 0;
    int trunc_ = -1;
    std::vector<ExactMatrix> coeffs_;
};

// Coefficient-wise bracket, reliable up to min(T_a + pmin_b, T_b + pmin_a).
MatrixLaurent commutator(const MatrixLaurent& a, const MatrixLaurent& b);

struct LaxViolation {
    int degree = 0;            // p
    int component_degree = 0;  // q > p
    ExactMatrix component;
};

// Every coefficient X_p with p < k must lie in the filtration space g~_p.
std::vector<LaxViolation> validate_lax(const MatrixLaurent& e);

MatrixLaurent random_lax(const std::shared_ptr<const GradedDecomposition>& dec, std::mt19937_64& rng, int trunc);

// M = nu h / z + series, series coefficients M_i in g~_i for i < 0. random_mop draws nu != 0.
struct MOpExpansion {
    Exact nu;
    MatrixLaurent series;

    MatrixLaurent full() const;
};

std::vector<LaxViolation> validate_mop(const MOpExpansion& m);
MOpExpansion random_mop(const std::shared_ptr<const GradedDecomposition>& dec, std::mt19937_64& rng, int trunc);

MatrixLaurent commutator(const MatrixLaurent& l, const MOpExpansion& m);

// Ad exp(-direction * h ln z): the g_s part of the z^i coefficient moves to z^{i - direction*s}.
MatrixLaurent conjugate_pole_elimination(const MatrixLaurent& e, int direction = 1);

struct TangencyResidual {
    Exact zdot;                         // zdot + nu
    std::map<int, ExactMatrix> degree;  // p = -k..0
    bool vanishes() const;
};

TangencyResidual tangency_relations_residual(const MatrixLaurent& l, const MatrixLaurent& ldot, const MOpExpansion& m,
                                             const Exact& zdot);
// The Ldot_p (p = -k..0) for which the residual vanishes.
MatrixLaurent tangency_velocity(const MatrixLaurent& l, const MOpExpansion& m);
// Coefficients of the total time derivative sum_p (Ldot_p + (p+1) L_{p+1} zdot) z^p for p in [from, to].
std::map<int, ExactMatrix> total_derivative(const MatrixLaurent& l, const MatrixLaurent& ldot, const Exact& zdot,
                                            int from, int to);

// g X_p g^{-1} for every coefficient. The result keeps the decomposition pointer for membership only.
MatrixLaurent conjugated(const MatrixLaurent& e, const ExactMatrix& g);

// Random group element preserving the algebra: invertible matrix (gl), Cayley transform (B/C/D),
// product of unipotent root exponentials (G2).
ExactMatrix random_conjugator(const MatrixAlgebra& alg, std::mt19937_64& rng);

struct TyurinReport {
    std::vector<std::pair<std::string, bool>> checks;
    ExactVector alpha;
    ExactVector beta;
    std::optional<Exact> kappa;  // gl: L_0 alpha = kappa alpha
    std::optional<Exact> nu;     // sp: L_{-2} = nu alpha alpha^t sigma
    bool passed() const;
    std::vector<std::string> failures() const;
};

// Supported: gl(n)/alpha_1, so(2n) (n >= 3)/alpha_1, so(2n+1)/alpha_1, sp(2n)/alpha_1, G2/alpha_2.
// `catalog` is the untwisted grading, `e` a Lax expansion for it conjugated by `g`.
// Throws std::invalid_argument for gradings without a catalogued form.
TyurinReport validate_tyurin_form(const GradedDecomposition& catalog, const MatrixLaurent& e, const ExactMatrix& g);

}  // namespace laxkit
