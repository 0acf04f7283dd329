#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace laxkit {

// Element a + b*sqrt(d) of a real quadratic field over Q. Rationals carry d = 0.
// Mixing two different irrational radicands throws std::domain_error.
class Exact {
public:
    Exact() = default;
    Exact(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
    Exact(mpq_class a) : a_(std::move(a)) { a_.canonicalize(); }  // NOLINT
    Exact(mpq_class a, mpq_class b, long radicand);

    static Exact sqrt_of(long radicand);
    static Exact fraction(long num, long den);

    const mpq_class& rational_part() const { return a_; }
    const mpq_class& radical_part() const { return b_; }
    long radicand() const { return d_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    Exact conjugate() const;
    // a^2 - d b^2, rational.
    mpq_class norm() const;

    double to_double() const;
    std::string str() const;

    Exact operator-() const;
    Exact& operator+=(const Exact& o);
    Exact& operator-=(const Exact& o);
    Exact& operator*=(const Exact& o);
    Exact& operator/=(const Exact& o);

    friend Exact operator+(Exact x, const Exact& y) { return x += y; }
    friend Exact operator-(Exact x, const Exact& y) { return x -= y; }
    friend Exact operator*(Exact x, const Exact& y) { return x *= y; }
    friend Exact operator/(Exact x, const Exact& y) { return x /= y; }
    friend bool operator==(const Exact& x, const Exact& y);
    friend bool operator!=(const Exact& x, const Exact& y) { return !(x == y); }

private:
    long merged_radicand(const Exact& o) const;
    void normalize();

    mpq_class a_{0};
    mpq_class b_{0};
    long d_ = 0;
};

using ExactVector = std::vector<Exact>;

class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ExactMatrix identity(std::size_t n);
    static ExactMatrix unit(std::size_t n, std::size_t i, std::size_t j);
    static ExactMatrix diagonal(const ExactVector& d);
    static ExactMatrix column(const ExactVector& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Exact& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Exact& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    // Row-major flat view, used for coordinates.
    const ExactVector& flat() const { return data_; }

    bool is_zero() const;
    ExactMatrix transpose() const;
    Exact trace() const;
    ExactVector column_vector(std::size_t j) const;

    ExactMatrix& operator+=(const ExactMatrix& o);
    ExactMatrix& operator-=(const ExactMatrix& o);
    ExactMatrix& operator*=(const Exact& s);
    ExactMatrix operator-() const;

    friend ExactMatrix operator+(ExactMatrix x, const ExactMatrix& y) { return x += y; }
    friend ExactMatrix operator-(ExactMatrix x, const ExactMatrix& y) { return x -= y; }
    friend ExactMatrix operator*(ExactMatrix x, const Exact& s) { return x *= s; }
    friend ExactMatrix operator*(const Exact& s, ExactMatrix x) { return x *= s; }
    friend ExactMatrix operator*(const ExactMatrix& x, const ExactMatrix& y);
    friend bool operator==(const ExactMatrix& x, const ExactMatrix& y);
    friend bool operator!=(const ExactMatrix& x, const ExactMatrix& y) { return !(x == y); }

    std::vector<std::vector<std::string>> to_strings() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ExactVector data_;
};

ExactMatrix commutator(const ExactMatrix& x, const ExactMatrix& y);
// tr(x y) without forming the product.
Exact trace_product(const ExactMatrix& x, const ExactMatrix& y);
ExactVector operator*(const ExactMatrix& m, const ExactVector& v);
Exact dot(const ExactVector& x, const ExactVector& y);

// Reduced row echelon form over the exact field.
struct RowEchelon {
    ExactMatrix reduced;
    std::vector<std::size_t> pivots;
};

RowEchelon row_echelon(ExactMatrix m);
std::size_t rank(const ExactMatrix& m);
// Columns of the result span ker(m); shape cols(m) x nullity.
ExactMatrix nullspace(const ExactMatrix& m);
std::optional<ExactVector> solve(const ExactMatrix& a, const ExactVector& b);
ExactMatrix inverse(const ExactMatrix& m);

// Small random rationals p/q with |p| <= num_bound, 1 <= q <= den_bound.
Exact random_rational(std::mt19937_64& rng, long num_bound = 5, long den_bound = 3);

}  // namespace laxkit
