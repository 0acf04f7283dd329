#include "laxkit/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace laxkit {

Family parse_family(std::string_view name) {
    if (name == "A" || name == "a") return Family::A;
    if (name == "B" || name == "b") return Family::B;
    if (name == "C" || name == "c") return Family::C;
    if (name == "D" || name == "d") return Family::D;
    if (name == "G2" || name == "g2" || name == "G") return Family::G2;
    throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::A: return "A";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::D: return "D";
        case Family::G2: return "G2";
    }
    return "?";
}

namespace {

ExactVector unit_vector(std::size_t n, std::size_t i, long scale = 1) {
    ExactVector v(n);
    v[i] = scale;
    return v;
}

ExactVector add(const ExactVector& x, const ExactVector& y, long sy = 1) {
    ExactVector r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += y[i] * Exact(sy);
    return r;
}

ExactVector scaled(const ExactVector& x, long s) {
    ExactVector r = x;
    for (auto& v : r) v *= Exact(s);
    return r;
}

// Positive roots in the orthonormal e_i coordinates, and simple roots.
void classical_roots(Family family, int n, std::vector<ExactVector>& simple, std::vector<ExactVector>& positive) {
    const auto dim = static_cast<std::size_t>(n);
    auto e = [&](int i) { return unit_vector(dim, static_cast<std::size_t>(i)); };
    simple.clear();
    positive.clear();
    const int chain = family == Family::A ? n - 1 : n - 1;
    for (int i = 0; i < chain; ++i) simple.push_back(add(e(i), e(i + 1), -1));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            positive.push_back(add(e(i), e(j), -1));
            if (family != Family::A) positive.push_back(add(e(i), e(j)));
        }
    switch (family) {
        case Family::A: break;
        case Family::B:
            simple.push_back(e(n - 1));
            for (int i = 0; i < n; ++i) positive.push_back(e(i));
            break;
        case Family::C:
            simple.push_back(scaled(e(n - 1), 2));
            for (int i = 0; i < n; ++i) positive.push_back(scaled(e(i), 2));
            break;
        case Family::D: simple.push_back(add(e(n - 2), e(n - 1))); break;
        case Family::G2: break;
    }
}

std::vector<int> expansion_over(const std::vector<ExactVector>& simple, const ExactVector& root) {
    ExactMatrix s(root.size(), simple.size());
    for (std::size_t j = 0; j < simple.size(); ++j)
        for (std::size_t i = 0; i < root.size(); ++i) s(i, j) = simple[j][i];
    auto c = solve(s, root);
    if (!c) throw std::logic_error("root is not in the span of the simple roots");
    std::vector<int> out;
    for (const auto& v : *c) {
        if (!v.is_rational() || v.rational_part().get_den() != 1)
            throw std::logic_error("non-integral root expansion");
        out.push_back(static_cast<int>(v.rational_part().get_num().get_si()));
    }
    return out;
}

}  // namespace

RootSystem build_root_system(Family family, int parameter) {
    RootSystem rs;
    rs.family = family;
    rs.parameter = parameter;
    switch (family) {
        case Family::A:
            if (parameter < 2) throw std::invalid_argument("family A needs matrix size n >= 2");
            break;
        case Family::B:
        case Family::C:
            if (parameter < 1) throw std::invalid_argument("rank must be >= 1");
            break;
        case Family::D:
            if (parameter < 3) throw std::invalid_argument("D_n root system needs n >= 3 (D_2 is not simple)");
            break;
        case Family::G2:
            if (parameter != 2) throw std::invalid_argument("G2 has rank 2");
            break;
    }
    if (family == Family::G2) {
        const ExactVector a1{Exact(1), Exact(0)};
        const ExactVector a2{Exact::fraction(-3, 2), Exact(mpq_class(0), mpq_class(1, 2), 3)};
        rs.simple_roots = {a1, a2};
        const std::vector<std::pair<long, long>> combos{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {3, 2}};
        for (auto [c1, c2] : combos) rs.positive_roots.push_back(add(scaled(a1, c1), scaled(a2, c2)));
    } else {
        classical_roots(family, parameter, rs.simple_roots, rs.positive_roots);
    }
    int best_height = -1;
    for (const auto& root : rs.positive_roots) {
        auto ex = expansion_over(rs.simple_roots, root);
        for (int c : ex)
            if (c < 0) throw std::logic_error("negative coefficient in positive root expansion");
        const int height = std::accumulate(ex.begin(), ex.end(), 0);
        if (height > best_height) {
            best_height = height;
            rs.highest_root = root;
            rs.highest_expansion = ex;
        }
        rs.expansions.push_back(std::move(ex));
    }
    for (const auto& ex : rs.expansions)
        for (std::size_t i = 0; i < ex.size(); ++i)
            if (ex[i] > rs.highest_expansion[i]) throw std::logic_error("highest root is not coefficient-wise maximal");
    return rs;
}

RootGrading grading_by_simple_root(const RootSystem& rs, int simple_index, bool dual) {
    if (simple_index < 1 || static_cast<std::size_t>(simple_index) > rs.rank())
        throw std::invalid_argument("simple root index out of range");
    const auto i = static_cast<std::size_t>(simple_index - 1);
    RootGrading g;
    const int sign = dual ? 1 : -1;
    for (const auto& ex : rs.expansions) g.degrees.push_back(sign * ex[i]);
    g.depth = rs.highest_expansion[i];
    return g;
}

// ---------------------------------------------------------------------------

namespace {

std::string algebra_label(Family f, int n) {
    switch (f) {
        case Family::A: return "gl(" + std::to_string(n) + ")";
        case Family::B: return "so(" + std::to_string(2 * n + 1) + ")";
        case Family::C: return "sp(" + std::to_string(2 * n) + ")";
        case Family::D: return "so(" + std::to_string(2 * n) + ")";
        case Family::G2: return "G2";
    }
    return "?";
}

ExactMatrix skew3(const ExactVector& x) {
    ExactMatrix m(3, 3);
    m(0, 1) = x[2];
    m(0, 2) = -x[1];
    m(1, 0) = -x[2];
    m(1, 2) = x[0];
    m(2, 0) = x[1];
    m(2, 1) = -x[0];
    return m;
}

ExactMatrix g2_element(const ExactVector& a1, const ExactVector& a2, const ExactMatrix& a) {
    const Exact inv_sqrt2(mpq_class(0), mpq_class(1, 2), 2);
    ExactMatrix x(7, 7);
    const ExactMatrix s1 = skew3(a1);
    const ExactMatrix s2 = skew3(a2);
    for (std::size_t i = 0; i < 3; ++i) {
        x(0, 1 + i) = -a2[i];
        x(0, 4 + i) = -a1[i];
        x(1 + i, 0) = a1[i];
        x(4 + i, 0) = a2[i];
        for (std::size_t j = 0; j < 3; ++j) {
            x(1 + i, 1 + j) = a(i, j);
            x(4 + i, 4 + j) = -a(j, i);
            if (!s2(i, j).is_zero()) x(1 + i, 4 + j) = s2(i, j) * inv_sqrt2;
            if (!s1(i, j).is_zero()) x(4 + i, 1 + j) = s1(i, j) * inv_sqrt2;
        }
    }
    return x;
}

ExactMatrix block_form(Family f, int n) {
    const auto un = static_cast<std::size_t>(n);
    switch (f) {
        case Family::A: return ExactMatrix::identity(un);
        case Family::D: {
            ExactMatrix s(2 * un, 2 * un);
            for (std::size_t i = 0; i < un; ++i) s(i, un + i) = s(un + i, i) = 1;
            return s;
        }
        case Family::C: {
            ExactMatrix s(2 * un, 2 * un);
            for (std::size_t i = 0; i < un; ++i) {
                s(i, un + i) = 1;
                s(un + i, i) = -1;
            }
            return s;
        }
        case Family::B: {
            ExactMatrix s(2 * un + 1, 2 * un + 1);
            for (std::size_t i = 0; i < un; ++i) s(i, un + 1 + i) = s(un + 1 + i, i) = 1;
            s(un, un) = 1;
            return s;
        }
        case Family::G2: {
            ExactMatrix s(7, 7);
            s(0, 0) = 1;
            for (std::size_t i = 0; i < 3; ++i) s(1 + i, 4 + i) = s(4 + i, 1 + i) = 1;
            return s;
        }
    }
    return {};
}

}  // namespace

void MatrixAlgebra::finalize() {
    const std::size_t n = size();
    const std::size_t d = basis_.size();
    ExactMatrix ft(d, n * n);
    for (std::size_t b = 0; b < d; ++b)
        for (std::size_t k = 0; k < n * n; ++k) ft(b, k) = basis_[b].flat()[k];
    const auto ech = row_echelon(ft);
    if (ech.pivots.size() != d) throw std::logic_error(name_ + ": basis is linearly dependent");
    pivot_entries_ = ech.pivots;
    ExactMatrix sub(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t b = 0; b < d; ++b) sub(r, b) = basis_[b].flat()[pivot_entries_[r]];
    pivot_inverse_ = inverse(sub);
    for (const auto& b : basis_) {
        const ExactMatrix lhs = b.transpose() * form_ + form_ * b;
        if (family_ != Family::A && !lhs.is_zero()) throw std::logic_error(name_ + ": basis element violates the form");
    }
    (void)structure_constants();  // throws if not closed
}

std::optional<ExactVector> MatrixAlgebra::coordinates(const ExactMatrix& x) const {
    if (x.rows() != size() || x.cols() != size()) return std::nullopt;
    ExactVector sel(pivot_entries_.size());
    for (std::size_t r = 0; r < sel.size(); ++r) sel[r] = x.flat()[pivot_entries_[r]];
    ExactVector c = pivot_inverse_ * sel;
    if (element(c) != x) return std::nullopt;
    return c;
}

ExactMatrix MatrixAlgebra::element(const ExactVector& coords) const {
    if (coords.size() != basis_.size()) throw std::invalid_argument("coordinate vector has wrong length");
    ExactMatrix x(size(), size());
    for (std::size_t b = 0; b < coords.size(); ++b)
        if (!coords[b].is_zero()) x += basis_[b] * coords[b];
    return x;
}

std::vector<std::vector<ExactVector>> MatrixAlgebra::structure_constants() const {
    const std::size_t d = dim();
    std::vector<std::vector<ExactVector>> c(d, std::vector<ExactVector>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (j < i) {
                c[i][j] = c[j][i];
                for (auto& v : c[i][j]) v = -v;
                continue;
            }
            auto coords = coordinates(commutator(basis_[i], basis_[j]));
            if (!coords) throw std::logic_error(name_ + ": basis is not closed under the commutator");
            c[i][j] = std::move(*coords);
        }
    return c;
}

int MatrixAlgebra::simple_root_count() const {
    if (family_ == Family::G2) return 2;
    return static_cast<int>(simple_roots_.size());
}

ExactMatrix MatrixAlgebra::grading_element(int simple_index, bool dual) const {
    if (simple_index < 1 || simple_index > simple_root_count())
        throw std::invalid_argument("simple root index out of range for " + name_);
    const auto idx = static_cast<std::size_t>(simple_index - 1);
    ExactVector diag(size());
    if (family_ == Family::G2) {
        // Weights of the 7-dim representation are 0, t, -t with t in the traceless Cartan of A.
        const std::vector<long> t = simple_index == 1 ? std::vector<long>{-1, -1, 2} : std::vector<long>{0, -1, 1};
        for (std::size_t i = 0; i < 3; ++i) {
            diag[1 + i] = t[i];
            diag[4 + i] = -t[i];
        }
    } else {
        const std::size_t amb = weights_.front().size();
        ExactVector coweight(amb);
        if (family_ == Family::A) {
            for (std::size_t k = 0; k <= idx; ++k) coweight[k] = 1;
        } else {
            ExactMatrix s(simple_roots_.size(), amb);
            for (std::size_t r = 0; r < simple_roots_.size(); ++r)
                for (std::size_t c = 0; c < amb; ++c) s(r, c) = simple_roots_[r][c];
            ExactVector rhs(simple_roots_.size());
            rhs[idx] = 1;
            auto x = solve(s, rhs);
            if (!x) throw std::logic_error("no coweight for simple root");
            coweight = *x;
        }
        for (std::size_t k = 0; k < size(); ++k) diag[k] = -dot(weights_[k], coweight);
        if (traceless_) {
            Exact tr;
            for (const auto& v : diag) tr += v;
            const Exact shift = tr / Exact(static_cast<long>(size()));
            for (auto& v : diag) v -= shift;
        }
    }
    if (dual)
        for (auto& v : diag) v = -v;
    return ExactMatrix::diagonal(diag);
}

ExactMatrix MatrixAlgebra::random_element(std::mt19937_64& rng, long num_bound, long den_bound) const {
    ExactVector c(dim());
    for (auto& v : c) v = random_rational(rng, num_bound, den_bound);
    return element(c);
}

MatrixAlgebra matrix_realization(Family family, int n) {
    MatrixAlgebra alg;
    alg.family_ = family;
    alg.parameter_ = n;
    alg.name_ = algebra_label(family, n);
    const auto un = static_cast<std::size_t>(n);
    switch (family) {
        case Family::A: {
            if (n < 1) throw std::invalid_argument("gl(n) needs n >= 1");
            alg.rank_ = n;
            for (std::size_t i = 0; i < un; ++i)
                for (std::size_t j = 0; j < un; ++j) alg.basis_.push_back(ExactMatrix::unit(un, i, j));
            for (std::size_t i = 0; i < un; ++i) alg.cartan_.push_back(ExactMatrix::unit(un, i, i));
            for (std::size_t k = 0; k < un; ++k) alg.weights_.push_back(unit_vector(un, k));
            for (std::size_t i = 0; i + 1 < un; ++i) alg.simple_roots_.push_back(add(unit_vector(un, i), unit_vector(un, i + 1), -1));
            break;
        }
        case Family::B:
        case Family::C:
        case Family::D: {
            if (n < 1 || (family == Family::D && n < 2)) throw std::invalid_argument("unsupported rank for " + alg.name_);
            alg.rank_ = n;
            const bool odd = family == Family::B;
            const std::size_t off = un + (odd ? 1 : 0);
            const std::size_t size = 2 * un + (odd ? 1 : 0);
            const long sym = family == Family::C ? 1 : -1;
            auto e = [&](std::size_t i, std::size_t j) { return ExactMatrix::unit(size, i, j); };
            for (std::size_t i = 0; i < un; ++i)
                for (std::size_t j = 0; j < un; ++j) {
                    alg.basis_.push_back(e(i, j) - e(off + j, off + i));
                    if (i == j) alg.cartan_.push_back(alg.basis_.back());
                }
            for (std::size_t i = 0; i < un; ++i)
                for (std::size_t j = i; j < un; ++j) {
                    if (i == j && sym < 0) continue;
                    if (i == j) {
                        alg.basis_.push_back(e(i, off + i));
                        alg.basis_.push_back(e(off + i, i));
                    } else {
                        alg.basis_.push_back(e(i, off + j) + e(j, off + i) * Exact(sym));
                        alg.basis_.push_back(e(off + i, j) + e(off + j, i) * Exact(sym));
                    }
                }
            if (odd)
                for (std::size_t i = 0; i < un; ++i) {
                    alg.basis_.push_back(e(i, un) - e(un, off + i));
                    alg.basis_.push_back(e(off + i, un) - e(un, i));
                }
            for (std::size_t k = 0; k < un; ++k) alg.weights_.push_back(unit_vector(un, k));
            if (odd) alg.weights_.push_back(ExactVector(un));
            for (std::size_t k = 0; k < un; ++k) alg.weights_.push_back(unit_vector(un, k, -1));
            for (std::size_t i = 0; i + 1 < un; ++i) alg.simple_roots_.push_back(add(unit_vector(un, i), unit_vector(un, i + 1), -1));
            if (family == Family::B) alg.simple_roots_.push_back(unit_vector(un, un - 1));
            if (family == Family::C) alg.simple_roots_.push_back(unit_vector(un, un - 1, 2));
            if (family == Family::D) {
                if (n == 1) throw std::invalid_argument("so(2) is abelian");
                alg.simple_roots_.push_back(add(unit_vector(un, un - 2), unit_vector(un, un - 1)));
            }
            break;
        }
        case Family::G2: {
            if (n != 2) throw std::invalid_argument("G2 has rank 2");
            alg.rank_ = 2;
            for (std::size_t i = 0; i < 3; ++i) {
                alg.basis_.push_back(g2_element(unit_vector(3, i), ExactVector(3), ExactMatrix(3, 3)));
                alg.basis_.push_back(g2_element(ExactVector(3), unit_vector(3, i), ExactMatrix(3, 3)));
            }
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    if (i != j) alg.basis_.push_back(g2_element(ExactVector(3), ExactVector(3), ExactMatrix::unit(3, i, j)));
            for (std::size_t i = 0; i < 2; ++i) {
                ExactMatrix a = ExactMatrix::unit(3, i, i) - ExactMatrix::unit(3, i + 1, i + 1);
                alg.basis_.push_back(g2_element(ExactVector(3), ExactVector(3), a));
                alg.cartan_.push_back(alg.basis_.back());
            }
            break;
        }
    }
    alg.form_ = block_form(family, n);
    alg.finalize();
    return alg;
}

MatrixAlgebra special_linear(int n) {
    if (n < 2) throw std::invalid_argument("sl(n) needs n >= 2");
    MatrixAlgebra alg;
    alg.family_ = Family::A;
    alg.parameter_ = n;
    alg.traceless_ = true;
    alg.rank_ = n - 1;
    alg.name_ = "sl(" + std::to_string(n) + ")";
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j)
            if (i != j) alg.basis_.push_back(ExactMatrix::unit(un, i, j));
    for (std::size_t i = 0; i + 1 < un; ++i) {
        alg.basis_.push_back(ExactMatrix::unit(un, i, i) - ExactMatrix::unit(un, i + 1, i + 1));
        alg.cartan_.push_back(alg.basis_.back());
    }
    for (std::size_t k = 0; k < un; ++k) alg.weights_.push_back(unit_vector(un, k));
    for (std::size_t i = 0; i + 1 < un; ++i) alg.simple_roots_.push_back(add(unit_vector(un, i), unit_vector(un, i + 1), -1));
    alg.form_ = ExactMatrix::identity(un);
    alg.finalize();
    return alg;
}

// ---------------------------------------------------------------------------

const std::vector<ExactMatrix>& GradedDecomposition::subspace(int p) const {
    static const std::vector<ExactMatrix> empty;
    auto it = subspaces_.find(p);
    return it == subspaces_.end() ? empty : it->second;
}

std::size_t GradedDecomposition::filtration_dim(int p) const {
    std::size_t s = 0;
    for (const auto& [q, basis] : subspaces_)
        if (q <= p) s += basis.size();
    return s;
}

ExactVector GradedDecomposition::graded_coordinates(const ExactMatrix& x) const {
    auto c = algebra_->coordinates(x);
    if (!c) throw std::invalid_argument("matrix is not an element of " + algebra_->name());
    return to_graded_ * *c;
}

std::map<int, ExactMatrix> GradedDecomposition::components(const ExactMatrix& x) const {
    const ExactVector gc = graded_coordinates(x);
    std::map<int, ExactMatrix> out;
    for (std::size_t b = 0; b < gc.size(); ++b) {
        if (gc[b].is_zero()) continue;
        auto [it, inserted] = out.try_emplace(graded_degrees_[b], x.rows(), x.cols());
        it->second += graded_basis_[b] * gc[b];
    }
    return out;
}

ExactMatrix GradedDecomposition::project(const ExactMatrix& x, int p) const {
    auto comps = components(x);
    auto it = comps.find(p);
    if (it == comps.end()) return ExactMatrix(x.rows(), x.cols());
    return it->second;
}

bool GradedDecomposition::in_filtration(const ExactMatrix& x, int p) const {
    const ExactVector gc = graded_coordinates(x);
    for (std::size_t b = 0; b < gc.size(); ++b)
        if (graded_degrees_[b] > p && !gc[b].is_zero()) return false;
    return true;
}

std::size_t GradedDecomposition::gamma_codimension() const {
    std::size_t s = 0;
    for (int p = -depth_; p <= depth_ - 1; ++p) s += filtration_codim(p);
    return s;
}

std::size_t GradedDecomposition::negative_filtration_sum() const {
    std::size_t s = 0;
    for (int i = -depth_; i <= -1; ++i) s += filtration_dim(i);
    return s;
}

GradedDecomposition graded_subspaces(std::shared_ptr<const MatrixAlgebra> algebra, const ExactMatrix& h) {
    if (!algebra) throw std::invalid_argument("null algebra");
    const MatrixAlgebra& alg = *algebra;
    const std::size_t d = alg.dim();
    if (h.rows() != alg.size() || h.cols() != alg.size()) throw std::invalid_argument("grading element has wrong size");
    ExactMatrix ad(d, d);
    for (std::size_t b = 0; b < d; ++b) {
        auto c = alg.coordinates(commutator(h, alg.basis()[b]));
        if (!c) throw std::invalid_argument("ad h does not preserve " + alg.name());
        for (std::size_t r = 0; r < d; ++r) ad(r, b) = (*c)[r];
    }
    double bound = 0;
    for (std::size_t r = 0; r < d; ++r) {
        double row = 0;
        for (std::size_t c = 0; c < d; ++c) row += std::abs(ad(r, c).to_double());
        bound = std::max(bound, row);
    }
    const int pmax = static_cast<int>(std::floor(bound + 1e-9));

    GradedDecomposition dec;
    dec.algebra_ = algebra;
    dec.h_ = h;
    std::size_t total = 0;
    for (int p = -pmax; p <= pmax; ++p) {
        ExactMatrix shifted = ad;
        for (std::size_t i = 0; i < d; ++i) shifted(i, i) -= Exact(p);
        const ExactMatrix ker = nullspace(shifted);
        if (ker.cols() == 0) continue;
        auto& sub = dec.subspaces_[p];
        for (std::size_t k = 0; k < ker.cols(); ++k) {
            sub.push_back(alg.element(ker.column_vector(k)));
            dec.graded_basis_.push_back(sub.back());
            dec.graded_degrees_.push_back(p);
        }
        total += ker.cols();
    }
    if (total != d)
        throw std::invalid_argument("invalid grading element: ad h has non-integer or non-semisimple spectrum on " +
                                    alg.name());
    dec.min_degree_ = dec.subspaces_.begin()->first;
    dec.max_degree_ = dec.subspaces_.rbegin()->first;
    dec.depth_ = std::max(-dec.min_degree_, dec.max_degree_);
    ExactMatrix to_alg(d, d);
    for (std::size_t b = 0; b < d; ++b) {
        const ExactVector c = *alg.coordinates(dec.graded_basis_[b]);
        for (std::size_t r = 0; r < d; ++r) to_alg(r, b) = c[r];
    }
    dec.to_graded_ = inverse(to_alg);
    return dec;
}

std::shared_ptr<const GradedDecomposition> catalog_grading(Family family, int parameter, int simple_index, bool dual) {
    auto alg = std::make_shared<const MatrixAlgebra>(matrix_realization(family, parameter));
    const ExactMatrix h = alg->grading_element(simple_index, dual);
    return std::make_shared<const GradedDecomposition>(graded_subspaces(alg, h));
}

GradingDiagnostics check_grading(const GradedDecomposition& dec) {
    GradingDiagnostics out;
    const auto& alg = dec.algebra();
    std::size_t total = 0;
    for (int p = dec.min_degree(); p <= dec.max_degree(); ++p) total += dec.dim(p);
    out.dimensions_sum = total == alg.dim();
    out.symmetric = true;
    for (int p = 1; p <= dec.depth(); ++p)
        if (dec.dim(p) != dec.dim(-p)) out.symmetric = false;
    out.bracket_compatible = true;
    out.form_orthogonal = true;
    const auto& basis = dec.graded_basis();
    const auto& deg = dec.graded_degrees();
    for (std::size_t i = 0; i < basis.size() && out.bracket_compatible; ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            const ExactMatrix c = commutator(basis[i], basis[j]);
            if (!c.is_zero()) {
                const auto comps = dec.components(c);
                if (comps.size() != 1 || comps.begin()->first != deg[i] + deg[j]) {
                    out.bracket_compatible = false;
                    break;
                }
            }
            if (deg[i] + deg[j] != 0 && !trace_product(basis[i], basis[j]).is_zero()) out.form_orthogonal = false;
        }
    out.gamma_codimension = dec.gamma_codimension() == static_cast<std::size_t>(dec.depth()) * alg.dim();
    return out;
}

long check_mist_identity(const GradedDecomposition& dec) {
    return mist_balance(dec, 1, dec.algebra().rank());
}

long mist_balance(const GradedDecomposition& dec, long multiple, long point_count) {
    const long s = static_cast<long>(dec.negative_filtration_sum()) + 1;
    return multiple * static_cast<long>(dec.algebra().dim()) - s * point_count;
}

std::vector<int> invariant_degrees(Family family, int n) {
    std::vector<int> d;
    switch (family) {
        case Family::A:
            for (int i = 1; i <= n; ++i) d.push_back(i);
            break;
        case Family::B:
        case Family::C:
            for (int i = 1; i <= n; ++i) d.push_back(2 * i);
            break;
        case Family::D:
            for (int i = 1; i < n; ++i) d.push_back(2 * i);
            d.push_back(n);
            std::sort(d.begin(), d.end());
            break;
        case Family::G2: d = {2, 6}; break;
    }
    return d;
}

long simple_dimension(Family family, int n) {
    switch (family) {
        case Family::A: return static_cast<long>(n) * n - 1;
        case Family::B:
        case Family::C: return static_cast<long>(n) * (2 * n + 1);
        case Family::D: return static_cast<long>(n) * (2 * n - 1);
        case Family::G2: return 14;
    }
    return 0;
}

long simple_rank(Family family, int n) {
    if (family == Family::A) return n - 1;
    if (family == Family::G2) return 2;
    return n;
}

long check_degree_identity(Family family, int n) {
    long s = 0;
    for (int d : invariant_degrees(family, n))
        if (!(family == Family::A && d == 1)) s += 2L * d - 1;
    return simple_dimension(family, n) - s;
}

HamiltonianCount hamiltonian_count(Family family, int n, long divisor_degree, long genus) {
    if (divisor_degree < 0 || genus < 0) throw std::invalid_argument("divisor degree and genus must be >= 0");
    const long dim = simple_dimension(family, n);
    const long r = simple_rank(family, n);
    HamiltonianCount out;
    const long twice = divisor_degree * (dim + r) - 2 * r * (genus - 1);
    out.count = twice / 2;
    out.identity_residual = 2 * out.count - (dim * divisor_degree + r * (divisor_degree - 2 * (genus - 1)));
    return out;
}

}  // namespace laxkit
