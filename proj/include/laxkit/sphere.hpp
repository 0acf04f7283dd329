#pragma once

#include "laxkit/formal.hpp"
#include "laxkit/liealg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace laxkit {

// A point of the rational line: a finite coordinate or infinity.
struct Point {
    bool infinite = false;
    Exact z;

    static Point at(Exact z) { return Point{false, std::move(z)}; }
    static Point infinity() { return Point{true, Exact(0)}; }
    std::string str() const;
    friend bool operator==(const Point& a, const Point& b) {
        return a.infinite == b.infinite && (a.infinite || a.z == b.z);
    }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

// sum_{e >= lo} c_e t^e in the standard local coordinate (t = z - z0, or w = 1/z at infinity),
// known up to hi().
struct LocalSeries {
    int lo = 0;
    std::vector<ExactMatrix> c;
    std::size_t rows = 0, cols = 0;

    int hi() const { return lo + static_cast<int>(c.size()) - 1; }
    ExactMatrix coefficient(int e) const;
    std::optional<int> lowest_nonzero() const;
};

LocalSeries multiply(const LocalSeries& a, const LocalSeries& b);
LocalSeries commutator(const LocalSeries& a, const LocalSeries& b);
LocalSeries derivative(const LocalSeries& a);

// Matrix of rational functions in partial-fraction form:
//   C + sum_P sum_j A_{P,j} (z - P)^{-j} + sum_j B_j z^j.
class RationalMatrixFunction {
public:
    RationalMatrixFunction() = default;
    RationalMatrixFunction(std::size_t rows, std::size_t cols);
    static RationalMatrixFunction constant(const ExactMatrix& c);
    // coeff * (z - at)^{-order}, or coeff * z^order when `at` is infinity. order >= 1.
    static RationalMatrixFunction pole(const Point& at, int order, const ExactMatrix& coeff);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const ExactMatrix& constant_term() const { return constant_; }
    std::vector<Point> poles() const;
    int pole_order(const Point& p) const;
    bool is_zero() const;

    // Laurent coefficients at `at` from -pole_order up to `hi`.
    LocalSeries expand(const Point& at, int hi) const;
    // Order of vanishing at `at` (negative for a pole); values above `cap` are reported as `cap`.
    int order_at(const Point& at, int cap) const;
    ExactMatrix evaluate(const Exact& z) const;

    // Partial-fraction data as one flat vector for the given pole layout (used for linear algebra).
    ExactVector flatten(const std::vector<std::pair<Point, int>>& layout) const;

    RationalMatrixFunction& operator+=(const RationalMatrixFunction& o);
    RationalMatrixFunction& operator-=(const RationalMatrixFunction& o);
    RationalMatrixFunction& operator*=(const Exact& s);
    friend RationalMatrixFunction operator+(RationalMatrixFunction a, const RationalMatrixFunction& b) { return a += b; }
    friend RationalMatrixFunction operator-(RationalMatrixFunction a, const RationalMatrixFunction& b) { return a -= b; }
    friend RationalMatrixFunction operator*(RationalMatrixFunction a, const Exact& s) { return a *= s; }
    friend RationalMatrixFunction operator*(const RationalMatrixFunction& a, const RationalMatrixFunction& b);
    friend bool operator==(const RationalMatrixFunction& a, const RationalMatrixFunction& b);

    // Scalar (1x1) function times a constant matrix.
    friend RationalMatrixFunction tensor(const RationalMatrixFunction& scalar, const ExactMatrix& m);
    // Entry-wise map X -> f(X) for a linear map f on constant matrices.
    template <class F>
    RationalMatrixFunction map_linear(F f, std::size_t rows, std::size_t cols) const;

private:
    struct PoleTerm {
        Exact at;
        std::vector<ExactMatrix> parts;  // parts[j-1] multiplies (z - at)^{-j}
    };
    PoleTerm* find_pole(const Exact& at);
    const PoleTerm* find_pole(const Exact& at) const;
    void trim();

    std::size_t rows_ = 0, cols_ = 0;
    ExactMatrix constant_;
    std::vector<PoleTerm> poles_;
    std::vector<ExactMatrix> poly_;  // poly_[j-1] multiplies z^j
};

RationalMatrixFunction commutator(const RationalMatrixFunction& a, const RationalMatrixFunction& b);

template <class F>
RationalMatrixFunction RationalMatrixFunction::map_linear(F f, std::size_t rows, std::size_t cols) const {
    RationalMatrixFunction out(rows, cols);
    out.constant_ = f(constant_);
    for (const auto& p : poles_) {
        PoleTerm t{p.at, {}};
        for (const auto& m : p.parts) t.parts.push_back(f(m));
        out.poles_.push_back(std::move(t));
    }
    for (const auto& m : poly_) out.poly_.push_back(f(m));
    out.trim();
    return out;
}

using Divisor = std::vector<std::pair<Point, int>>;

// Basis of scalar functions f with (f) + D >= 0 on the rational line, as 1x1 functions.
std::vector<RationalMatrixFunction> scalar_space(const Divisor& d);

// Divisor data for the homogeneous subspaces: order >= m at each P_i, pole order <= a_j m + b_{m,j}
// at Q_j, pole order <= k at each gamma.
struct DivisorSpec {
    std::vector<Point> P;
    std::vector<Point> Q;
    std::vector<mpq_class> a;  // weights of Q, sum equals |P|
    std::vector<Point> gamma;

    void validate() const;
    // a_j m + b_{m,j}: cumulative floors of (a_1 + ... + a_j) m, with N - 1 added at Q_1.
    std::vector<long> q_orders(int m) const;
    std::vector<mpq_class> b(int m) const;
    // N + max |a_j|; every |b_{m,j}| stays below it.
    mpq_class b_bound() const;
    Divisor divisor(int m, int k) const;
    long degree(int m, int k) const;
};

struct AlgebraSlice {
    int m = 0;
    std::vector<RationalMatrixFunction> basis;
    std::size_t expected_dim = 0;  // N dim g
    std::size_t candidate_dim = 0; // dim g (deg D_m + 1) before the gamma conditions
    bool dimension_matches() const { return basis.size() == expected_dim; }
};

AlgebraSlice build_homogeneous_subspace(const std::shared_ptr<const GradedDecomposition>& dec, const DivisorSpec& d,
                                        int m);
std::map<int, AlgebraSlice> build_slices(const std::shared_ptr<const GradedDecomposition>& dec, const DivisorSpec& d,
                                         int mlo, int mhi);

// Expansion condition at a point of Gamma for an arbitrary function.
std::vector<LaxViolation> gamma_violations(const GradedDecomposition& dec, const RationalMatrixFunction& f,
                                           const Point& gamma);

struct GradedBound {
    bool expanded = false;  // the commutators lie in L_{m+n} + ... + L_{m+n+max_s}
    int S = 0;              // smallest such s
};

// Smallest S with [L_m, L_n] inside L_{m+n} + ... + L_{m+n+S}, searched up to max_s. Adjacent slices
// can intersect, so this is a span test rather than a unique expansion.
GradedBound almost_graded_bound(const std::map<int, AlgebraSlice>& slices, int m, int n, int max_s);

// dim (A cap B) for two slices.
std::size_t slice_intersection_dim(const AlgebraSlice& a, const AlgebraSlice& b);

// omega = sum_gamma h (1/(z-gamma) - 1/(z-P_1)) dz, or sum_gamma h/(z-gamma) dz when P_1 is infinity.
RationalMatrixFunction canonical_omega(const GradedDecomposition& dec, const DivisorSpec& d);

class Cocycle {
public:
    // Throws std::invalid_argument unless omega = (h/z + g_0-valued regular part) dz at every gamma.
    Cocycle(std::shared_ptr<const GradedDecomposition> dec, DivisorSpec spec, RationalMatrixFunction omega);

    // sum_i res_{P_i} <L, (d - ad omega) L'>
    Exact eta(const RationalMatrixFunction& l, const RationalMatrixFunction& lp) const;
    // Negative-degree part of <L, (d - ad omega) L'> at gamma.
    std::map<int, Exact> holomorphy_tail(const RationalMatrixFunction& l, const RationalMatrixFunction& lp,
                                         const Point& gamma) const;
    // Residue of <L, dL'> at one point; summing over all poles (and infinity) gives zero.
    Exact residue_dform(const RationalMatrixFunction& l, const RationalMatrixFunction& lp, const Point& at) const;
    // Upper end of the locality window: m + n <= -1 - min_i(-1, ord_{P_i} omega).
    int locality_upper_bound() const;

    const DivisorSpec& spec() const { return spec_; }

private:
    Exact residue(const RationalMatrixFunction& l, const RationalMatrixFunction& lp, const Point& at,
                  bool with_omega) const;
    LocalSeries omega_at(const Point& at, int hi) const;

    std::shared_ptr<const GradedDecomposition> dec_;
    DivisorSpec spec_;
    RationalMatrixFunction omega_;
};

// p X^{p-1}, projected to the algebra through the trace form. Odd p is rejected for B, C, D and G2.
ExactMatrix gradient_invariant(const MatrixAlgebra& alg, const ExactMatrix& x, int p);

struct MOperatorResult {
    RationalMatrixFunction m;
    std::vector<Exact> nu;             // one per gamma
    int pole_order = 0;                // deg D of the M-operator divisor D = d P
    std::size_t unknowns = 0;
    std::size_t space_dim = 0;         // dim of the M-operator space before matching and normalization
    std::size_t expected_space_dim = 0;
    std::optional<long> l;             // (sum_{i<0} dim g~_i + 1) |Gamma| / dim g, when integral
    std::size_t rank = 0;          // rank of the full system including matching and normalization
    bool unique = false;
};

// M with its only pole outside Gamma at P, matching w^{-m} grad tr(L^p) up to O(1) there, in M-operator
// form at every gamma, vanishing at the normalization points. Free parameters left by the conditions
// are set to zero. Throws std::runtime_error (with ranks) if the linear system is inconsistent.
MOperatorResult construct_M_operator(const std::shared_ptr<const GradedDecomposition>& dec,
                                     const std::vector<Point>& gammas, const RationalMatrixFunction& l, int power,
                                     const Point& p, int m, const std::vector<Point>& normalization);

struct TangencyReport {
    std::vector<Exact> nu;
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

// `bounds` lists the allowed orders of [L, M] outside Gamma: (point, d) means order >= -d there;
// every other point outside Gamma must be regular.
TangencyReport lax_tangency_check(const std::shared_ptr<const GradedDecomposition>& dec,
                                  const std::vector<Point>& gammas, const RationalMatrixFunction& l,
                                  const RationalMatrixFunction& m, const Divisor& bounds);

// Random distinct rational points avoiding `avoid`.
std::vector<Point> random_points(std::mt19937_64& rng, std::size_t count, const std::vector<Point>& avoid);

}  // namespace laxkit
