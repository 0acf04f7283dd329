#include "laxkit/exact.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace laxkit {

Exact::Exact(mpq_class a, mpq_class b, long radicand) : a_(std::move(a)), b_(std::move(b)), d_(radicand) {
    a_.canonicalize();
    b_.canonicalize();
    if (sgn(b_) != 0 && radicand <= 1) throw std::domain_error("radicand must be > 1");
    normalize();
}

Exact Exact::sqrt_of(long radicand) {
    if (radicand < 0) throw std::domain_error("negative radicand");
    const auto root = static_cast<long>(std::llround(std::sqrt(static_cast<double>(radicand))));
    if (root * root == radicand) return Exact(root);
    return Exact(mpq_class(0), mpq_class(1), radicand);
}

Exact Exact::fraction(long num, long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    return Exact(mpq_class(num, den));
}

void Exact::normalize() {
    if (sgn(b_) == 0) d_ = 0;
}

long Exact::merged_radicand(const Exact& o) const {
    if (d_ == 0) return o.d_;
    if (o.d_ == 0 || o.d_ == d_) return d_;
    throw std::domain_error("mixed quadratic radicands " + std::to_string(d_) + " and " + std::to_string(o.d_));
}

Exact Exact::conjugate() const {
    Exact r = *this;
    r.b_ = -r.b_;
    return r;
}

mpq_class Exact::norm() const { return a_ * a_ - mpq_class(d_) * b_ * b_; }

double Exact::to_double() const {
    double v = a_.get_d();
    if (d_ != 0) v += b_.get_d() * std::sqrt(static_cast<double>(d_));
    return v;
}

std::string Exact::str() const {
    if (d_ == 0) return a_.get_str();
    std::ostringstream os;
    if (sgn(a_) != 0) os << a_.get_str() << (sgn(b_) > 0 ? "+" : "");
    os << b_.get_str() << "*sqrt(" << d_ << ")";
    return os.str();
}

Exact Exact::operator-() const {
    Exact r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

Exact& Exact::operator+=(const Exact& o) {
    const long d = merged_radicand(o);
    a_ += o.a_;
    b_ += o.b_;
    d_ = d;
    normalize();
    return *this;
}

Exact& Exact::operator-=(const Exact& o) {
    const long d = merged_radicand(o);
    a_ -= o.a_;
    b_ -= o.b_;
    d_ = d;
    normalize();
    return *this;
}

Exact& Exact::operator*=(const Exact& o) {
    if (d_ == 0 && o.d_ == 0) {
        a_ *= o.a_;
        return *this;
    }
    const long d = merged_radicand(o);
    mpq_class a = a_ * o.a_ + mpq_class(d) * b_ * o.b_;
    mpq_class b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    d_ = d;
    normalize();
    return *this;
}

Exact& Exact::operator/=(const Exact& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    if (o.d_ == 0) {
        a_ /= o.a_;
        b_ /= o.a_;
        normalize();
        return *this;
    }
    const mpq_class n = o.norm();
    *this *= o.conjugate();
    a_ /= n;
    b_ /= n;
    normalize();
    return *this;
}

bool operator==(const Exact& x, const Exact& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && (sgn(x.b_) == 0 || x.d_ == y.d_);
}

// ---------------------------------------------------------------------------

ExactMatrix ExactMatrix::identity(std::size_t n) {
    ExactMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

ExactMatrix ExactMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
    ExactMatrix m(n, n);
    m(i, j) = 1;
    return m;
}

ExactMatrix ExactMatrix::diagonal(const ExactVector& d) {
    ExactMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ExactMatrix ExactMatrix::column(const ExactVector& v) {
    ExactMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

bool ExactMatrix::is_zero() const {
    for (const auto& x : data_)
        if (!x.is_zero()) return false;
    return true;
}

ExactMatrix ExactMatrix::transpose() const {
    ExactMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Exact ExactMatrix::trace() const {
    Exact s;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

ExactVector ExactMatrix::column_vector(std::size_t j) const {
    ExactVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

ExactMatrix& ExactMatrix::operator+=(const ExactMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch in +");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ExactMatrix& ExactMatrix::operator-=(const ExactMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch in -");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ExactMatrix& ExactMatrix::operator*=(const Exact& s) {
    if (s.is_zero()) {
        for (auto& x : data_) x = Exact();
        return *this;
    }
    for (auto& x : data_)
        if (!x.is_zero()) x *= s;
    return *this;
}

ExactMatrix ExactMatrix::operator-() const {
    ExactMatrix r = *this;
    for (auto& x : r.data_) x = -x;
    return r;
}

ExactMatrix operator*(const ExactMatrix& x, const ExactMatrix& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("matrix shape mismatch in *");
    ExactMatrix r(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i)
        for (std::size_t k = 0; k < x.cols_; ++k) {
            const Exact& a = x(i, k);
            if (a.is_zero()) continue;
            for (std::size_t j = 0; j < y.cols_; ++j) {
                const Exact& b = y(k, j);
                if (!b.is_zero()) r(i, j) += a * b;
            }
        }
    return r;
}

bool operator==(const ExactMatrix& x, const ExactMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
}

std::vector<std::vector<std::string>> ExactMatrix::to_strings() const {
    std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).str();
    return out;
}

ExactMatrix commutator(const ExactMatrix& x, const ExactMatrix& y) { return x * y - y * x; }

Exact trace_product(const ExactMatrix& x, const ExactMatrix& y) {
    if (x.cols() != y.rows() || x.rows() != y.cols()) throw std::invalid_argument("shape mismatch in trace_product");
    Exact s;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            const Exact& a = x(i, k);
            if (a.is_zero()) continue;
            const Exact& b = y(k, i);
            if (!b.is_zero()) s += a * b;
        }
    return s;
}

ExactVector operator*(const ExactMatrix& m, const ExactVector& v) {
    if (m.cols() != v.size()) throw std::invalid_argument("shape mismatch in matrix-vector product");
    ExactVector r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero() && !v[j].is_zero()) r[i] += m(i, j) * v[j];
    return r;
}

Exact dot(const ExactVector& x, const ExactVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("size mismatch in dot");
    Exact s;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!x[i].is_zero() && !y[i].is_zero()) s += x[i] * y[i];
    return s;
}

RowEchelon row_echelon(ExactMatrix m) {
    RowEchelon out;
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m(p, c).is_zero()) ++p;
        if (p == rows) continue;
        if (p != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m(p, j), m(r, j));
        const Exact inv = Exact(1) / m(r, c);
        for (std::size_t j = c; j < cols; ++j)
            if (!m(r, j).is_zero()) m(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            const Exact f = m(i, c);
            for (std::size_t j = c; j < cols; ++j)
                if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.reduced = std::move(m);
    return out;
}

std::size_t rank(const ExactMatrix& m) { return row_echelon(m).pivots.size(); }

ExactMatrix nullspace(const ExactMatrix& m) {
    const auto ech = row_echelon(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (auto c : ech.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < cols; ++c)
        if (!is_pivot[c]) free.push_back(c);
    ExactMatrix basis(cols, free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
        basis(free[f], f) = 1;
        for (std::size_t r = 0; r < ech.pivots.size(); ++r) {
            const Exact& v = ech.reduced(r, free[f]);
            if (!v.is_zero()) basis(ech.pivots[r], f) = -v;
        }
    }
    return basis;
}

std::optional<ExactVector> solve(const ExactMatrix& a, const ExactVector& b) {
    if (a.rows() != b.size()) throw std::invalid_argument("shape mismatch in solve");
    ExactMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    const auto ech = row_echelon(std::move(aug));
    if (!ech.pivots.empty() && ech.pivots.back() == a.cols()) return std::nullopt;
    ExactVector x(a.cols());
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) x[ech.pivots[r]] = ech.reduced(r, a.cols());
    return x;
}

ExactMatrix inverse(const ExactMatrix& m) {
    if (!m.square()) throw std::invalid_argument("inverse of non-square matrix");
    const std::size_t n = m.rows();
    ExactMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    const auto ech = row_echelon(std::move(aug));
    if (ech.pivots.size() < n || ech.pivots[n - 1] != n - 1) throw std::domain_error("singular matrix");
    ExactMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = ech.reduced(i, n + j);
    return inv;
}

Exact random_rational(std::mt19937_64& rng, long num_bound, long den_bound) {
    std::uniform_int_distribution<long> num(-num_bound, num_bound);
    std::uniform_int_distribution<long> den(1, den_bound);
    return Exact::fraction(num(rng), den(rng));
}

}  // namespace laxkit
