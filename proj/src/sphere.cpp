#include "laxkit/sphere.hpp"

#include <algorithm>
#include <stdexcept>

namespace laxkit {

namespace {

Exact binomial(long n, long k) {
    mpz_class r;
    mpz_class nn(n);
    mpz_bin_ui(r.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(k));
    return Exact(mpq_class(r));
}

Exact power(const Exact& x, int e) {
    if (e < 0) return Exact(1) / power(x, -e);
    Exact r(1);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

mpz_class floor_of(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

ExactMatrix one_by_one(const Exact& v) {
    ExactMatrix m(1, 1);
    m(0, 0) = v;
    return m;
}

ExactMatrix project_to_algebra(const MatrixAlgebra& alg, const ExactMatrix& x) {
    if (alg.contains(x)) return x;
    const auto& b = alg.basis();
    ExactMatrix gram(b.size(), b.size());
    ExactVector rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        rhs[i] = trace_product(b[i], x);
        for (std::size_t j = 0; j < b.size(); ++j) gram(i, j) = trace_product(b[i], b[j]);
    }
    auto c = solve(gram, rhs);
    if (!c) throw std::runtime_error("trace form is degenerate on " + alg.name());
    return alg.element(*c);
}

// Value of a regular scalar function at a point (the z^0 coefficient).
Exact scalar_value(const RationalMatrixFunction& f, const Point& at) {
    if (f.pole_order(at) > 0) throw std::invalid_argument("function has a pole at " + at.str());
    return f.expand(at, 0).coefficient(0)(0, 0);
}

bool contains_point(const std::vector<Point>& pts, const Point& p) {
    return std::find(pts.begin(), pts.end(), p) != pts.end();
}

}  // namespace

std::string Point::str() const { return infinite ? std::string("inf") : z.str(); }

ExactMatrix LocalSeries::coefficient(int e) const {
    if (e < lo) return ExactMatrix(rows, cols);
    if (e > hi()) throw std::out_of_range("coefficient " + std::to_string(e) + " beyond the computed order");
    return c[static_cast<std::size_t>(e - lo)];
}

std::optional<int> LocalSeries::lowest_nonzero() const {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!c[i].is_zero()) return lo + static_cast<int>(i);
    return std::nullopt;
}

LocalSeries multiply(const LocalSeries& a, const LocalSeries& b) {
    if (a.cols != b.rows) throw std::invalid_argument("series shapes do not match");
    LocalSeries out;
    out.rows = a.rows;
    out.cols = b.cols;
    out.lo = a.lo + b.lo;
    const int hi = std::min(a.hi() + b.lo, b.hi() + a.lo);
    if (hi < out.lo) return out;
    out.c.assign(static_cast<std::size_t>(hi - out.lo + 1), ExactMatrix(out.rows, out.cols));
    for (int i = a.lo; i <= a.hi(); ++i) {
        const ExactMatrix& x = a.c[static_cast<std::size_t>(i - a.lo)];
        if (x.is_zero()) continue;
        for (int j = b.lo; j <= b.hi() && i + j <= hi; ++j) {
            const ExactMatrix& y = b.c[static_cast<std::size_t>(j - b.lo)];
            if (y.is_zero()) continue;
            out.c[static_cast<std::size_t>(i + j - out.lo)] += x * y;
        }
    }
    return out;
}

LocalSeries commutator(const LocalSeries& a, const LocalSeries& b) {
    LocalSeries ab = multiply(a, b);
    const LocalSeries ba = multiply(b, a);
    for (std::size_t i = 0; i < ab.c.size(); ++i) ab.c[i] -= ba.c[i];
    return ab;
}

LocalSeries derivative(const LocalSeries& a) {
    LocalSeries out;
    out.rows = a.rows;
    out.cols = a.cols;
    out.lo = a.lo - 1;
    for (int e = a.lo; e <= a.hi(); ++e) out.c.push_back(a.c[static_cast<std::size_t>(e - a.lo)] * Exact(e));
    return out;
}

RationalMatrixFunction::RationalMatrixFunction(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), constant_(rows, cols) {}

RationalMatrixFunction RationalMatrixFunction::constant(const ExactMatrix& c) {
    RationalMatrixFunction f(c.rows(), c.cols());
    f.constant_ = c;
    return f;
}

RationalMatrixFunction RationalMatrixFunction::pole(const Point& at, int order, const ExactMatrix& coeff) {
    if (order < 1) throw std::invalid_argument("pole order must be positive");
    RationalMatrixFunction f(coeff.rows(), coeff.cols());
    std::vector<ExactMatrix> parts(static_cast<std::size_t>(order), ExactMatrix(coeff.rows(), coeff.cols()));
    parts.back() = coeff;
    if (at.infinite)
        f.poly_ = std::move(parts);
    else
        f.poles_.push_back(PoleTerm{at.z, std::move(parts)});
    f.trim();
    return f;
}

RationalMatrixFunction::PoleTerm* RationalMatrixFunction::find_pole(const Exact& at) {
    for (auto& p : poles_)
        if (p.at == at) return &p;
    return nullptr;
}

const RationalMatrixFunction::PoleTerm* RationalMatrixFunction::find_pole(const Exact& at) const {
    for (const auto& p : poles_)
        if (p.at == at) return &p;
    return nullptr;
}

void RationalMatrixFunction::trim() {
    for (auto& p : poles_)
        while (!p.parts.empty() && p.parts.back().is_zero()) p.parts.pop_back();
    poles_.erase(std::remove_if(poles_.begin(), poles_.end(), [](const PoleTerm& p) { return p.parts.empty(); }),
                 poles_.end());
    while (!poly_.empty() && poly_.back().is_zero()) poly_.pop_back();
}

std::vector<Point> RationalMatrixFunction::poles() const {
    std::vector<Point> out;
    for (const auto& p : poles_) out.push_back(Point::at(p.at));
    if (!poly_.empty()) out.push_back(Point::infinity());
    return out;
}

int RationalMatrixFunction::pole_order(const Point& p) const {
    if (p.infinite) return static_cast<int>(poly_.size());
    const PoleTerm* t = find_pole(p.z);
    return t ? static_cast<int>(t->parts.size()) : 0;
}

bool RationalMatrixFunction::is_zero() const { return constant_.is_zero() && poles_.empty() && poly_.empty(); }

LocalSeries RationalMatrixFunction::expand(const Point& at, int hi) const {
    LocalSeries s;
    s.rows = rows_;
    s.cols = cols_;
    s.lo = -pole_order(at);
    const int n = std::max(0, hi - s.lo + 1);
    s.c.assign(static_cast<std::size_t>(n), ExactMatrix(rows_, cols_));
    auto add = [&](int e, const ExactMatrix& m, const Exact& f) {
        if (e >= s.lo && e <= hi && !f.is_zero()) s.c[static_cast<std::size_t>(e - s.lo)] += m * f;
    };
    add(0, constant_, Exact(1));
    if (at.infinite) {
        for (std::size_t j = 1; j <= poly_.size(); ++j) add(-static_cast<int>(j), poly_[j - 1], Exact(1));
        for (const auto& p : poles_) {
            for (std::size_t j = 1; j <= p.parts.size(); ++j) {
                if (p.parts[j - 1].is_zero()) continue;
                Exact pw(1);
                for (int mm = 0; static_cast<int>(j) + mm <= hi; ++mm) {
                    add(static_cast<int>(j) + mm, p.parts[j - 1], binomial(static_cast<long>(j) + mm - 1, mm) * pw);
                    pw *= p.at;
                }
            }
        }
        return s;
    }
    const Exact& q = at.z;
    for (std::size_t j = 1; j <= poly_.size(); ++j) {
        if (poly_[j - 1].is_zero()) continue;
        for (int mm = 0; mm <= std::min(static_cast<int>(j), hi); ++mm)
            add(mm, poly_[j - 1], binomial(static_cast<long>(j), mm) * power(q, static_cast<int>(j) - mm));
    }
    for (const auto& p : poles_) {
        if (p.at == q) {
            for (std::size_t j = 1; j <= p.parts.size(); ++j) add(-static_cast<int>(j), p.parts[j - 1], Exact(1));
            continue;
        }
        const Exact inv = Exact(1) / (q - p.at);
        for (std::size_t j = 1; j <= p.parts.size(); ++j) {
            if (p.parts[j - 1].is_zero()) continue;
            Exact pw = power(inv, static_cast<int>(j));
            for (int mm = 0; mm <= hi; ++mm) {
                Exact f = binomial(static_cast<long>(j) + mm - 1, mm) * pw;
                if (mm % 2) f = -f;
                add(mm, p.parts[j - 1], f);
                pw *= inv;
            }
        }
    }
    return s;
}

int RationalMatrixFunction::order_at(const Point& at, int cap) const {
    const int po = pole_order(at);
    if (po > 0) return std::min(-po, cap);
    if (cap <= 0) return cap;
    const auto low = expand(at, cap - 1).lowest_nonzero();
    return low ? *low : cap;
}

ExactMatrix RationalMatrixFunction::evaluate(const Exact& z) const {
    if (find_pole(z)) throw std::invalid_argument("evaluation at a pole");
    ExactMatrix out = constant_;
    for (const auto& p : poles_) {
        const Exact inv = Exact(1) / (z - p.at);
        Exact pw = inv;
        for (const auto& part : p.parts) {
            out += part * pw;
            pw *= inv;
        }
    }
    Exact pw = z;
    for (const auto& b : poly_) {
        out += b * pw;
        pw *= z;
    }
    return out;
}

ExactVector RationalMatrixFunction::flatten(const std::vector<std::pair<Point, int>>& layout) const {
    for (const auto& pt : poles()) {
        auto it = std::find_if(layout.begin(), layout.end(), [&](const auto& e) { return e.first == pt; });
        if (it == layout.end() || it->second < pole_order(pt))
            throw std::invalid_argument("pole at " + pt.str() + " is outside the flattening layout");
    }
    ExactVector out = constant_.flat();
    const ExactMatrix zero(rows_, cols_);
    for (const auto& [pt, order] : layout) {
        for (int j = 1; j <= order; ++j) {
            const ExactMatrix* m = &zero;
            if (pt.infinite) {
                if (j <= static_cast<int>(poly_.size())) m = &poly_[static_cast<std::size_t>(j - 1)];
            } else if (const PoleTerm* t = find_pole(pt.z); t && j <= static_cast<int>(t->parts.size())) {
                m = &t->parts[static_cast<std::size_t>(j - 1)];
            }
            out.insert(out.end(), m->flat().begin(), m->flat().end());
        }
    }
    return out;
}

RationalMatrixFunction& RationalMatrixFunction::operator+=(const RationalMatrixFunction& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("function shapes do not match");
    constant_ += o.constant_;
    for (const auto& p : o.poles_) {
        PoleTerm* t = find_pole(p.at);
        if (!t) {
            poles_.push_back(PoleTerm{p.at, {}});
            t = &poles_.back();
        }
        if (t->parts.size() < p.parts.size()) t->parts.resize(p.parts.size(), ExactMatrix(rows_, cols_));
        for (std::size_t j = 0; j < p.parts.size(); ++j) t->parts[j] += p.parts[j];
    }
    if (poly_.size() < o.poly_.size()) poly_.resize(o.poly_.size(), ExactMatrix(rows_, cols_));
    for (std::size_t j = 0; j < o.poly_.size(); ++j) poly_[j] += o.poly_[j];
    trim();
    return *this;
}

RationalMatrixFunction& RationalMatrixFunction::operator-=(const RationalMatrixFunction& o) {
    return *this += o * Exact(-1);
}

RationalMatrixFunction& RationalMatrixFunction::operator*=(const Exact& s) {
    constant_ *= s;
    for (auto& p : poles_)
        for (auto& m : p.parts) m *= s;
    for (auto& m : poly_) m *= s;
    trim();
    return *this;
}

RationalMatrixFunction operator*(const RationalMatrixFunction& a, const RationalMatrixFunction& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("function shapes do not match");
    RationalMatrixFunction out(a.rows_, b.cols_);
    std::vector<Exact> pts;
    for (const auto& p : a.poles_) pts.push_back(p.at);
    for (const auto& p : b.poles_)
        if (!a.find_pole(p.at)) pts.push_back(p.at);
    for (const auto& z : pts) {
        const Point pt = Point::at(z);
        const int oa = a.pole_order(pt), ob = b.pole_order(pt);
        const LocalSeries s = multiply(a.expand(pt, ob - 1), b.expand(pt, oa - 1));
        RationalMatrixFunction::PoleTerm t{z, {}};
        for (int j = 1; j <= oa + ob; ++j) t.parts.push_back(s.coefficient(-j));
        out.poles_.push_back(std::move(t));
    }
    const int da = static_cast<int>(a.poly_.size()), db = static_cast<int>(b.poly_.size());
    const LocalSeries s = multiply(a.expand(Point::infinity(), db), b.expand(Point::infinity(), da));
    out.constant_ = s.coefficient(0);
    for (int j = 1; j <= da + db; ++j) out.poly_.push_back(s.coefficient(-j));
    out.trim();
    return out;
}

bool operator==(const RationalMatrixFunction& a, const RationalMatrixFunction& b) { return (a - b).is_zero(); }

RationalMatrixFunction tensor(const RationalMatrixFunction& scalar, const ExactMatrix& m) {
    if (scalar.rows() != 1 || scalar.cols() != 1) throw std::invalid_argument("tensor needs a scalar function");
    return scalar.map_linear([&](const ExactMatrix& x) { return m * x(0, 0); }, m.rows(), m.cols());
}

RationalMatrixFunction commutator(const RationalMatrixFunction& a, const RationalMatrixFunction& b) {
    return a * b - b * a;
}

std::vector<RationalMatrixFunction> scalar_space(const Divisor& d) {
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j)
            if (d[i].first == d[j].first) throw std::invalid_argument("repeated point in divisor");
    std::vector<RationalMatrixFunction> cand{RationalMatrixFunction::constant(one_by_one(Exact(1)))};
    for (const auto& [pt, order] : d)
        for (int j = 1; j <= order; ++j) cand.push_back(RationalMatrixFunction::pole(pt, j, one_by_one(Exact(1))));
    std::vector<ExactVector> rows;
    for (const auto& [pt, order] : d) {
        if (order >= 0) continue;
        std::vector<LocalSeries> ex;
        for (const auto& f : cand) ex.push_back(f.expand(pt, -order - 1));
        for (int e = 0; e < -order; ++e) {
            ExactVector row;
            for (const auto& s : ex) row.push_back(s.coefficient(e)(0, 0));
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) return cand;
    ExactMatrix a(rows.size(), cand.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cand.size(); ++j) a(i, j) = rows[i][j];
    const ExactMatrix ns = nullspace(a);
    std::vector<RationalMatrixFunction> out;
    for (std::size_t c = 0; c < ns.cols(); ++c) {
        RationalMatrixFunction f(1, 1);
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (!ns(i, c).is_zero()) f += cand[i] * ns(i, c);
        out.push_back(std::move(f));
    }
    return out;
}

void DivisorSpec::validate() const {
    if (P.empty() || Q.empty()) throw std::invalid_argument("divisor data needs at least one P and one Q");
    if (a.size() != Q.size()) throw std::invalid_argument("one weight per Q point is required");
    mpq_class sum = 0;
    for (const auto& w : a) {
        if (sgn(w) <= 0) throw std::invalid_argument("Q weights must be positive");
        sum += w;
    }
    if (sum != mpq_class(static_cast<long>(P.size()))) throw std::invalid_argument("Q weights must sum to |P|");
    std::vector<Point> all = P;
    all.insert(all.end(), Q.begin(), Q.end());
    all.insert(all.end(), gamma.begin(), gamma.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j]) throw std::invalid_argument("points of P, Q and Gamma must be distinct");
}

std::vector<long> DivisorSpec::q_orders(int m) const {
    std::vector<long> out;
    mpq_class cum = 0;
    for (std::size_t j = 0; j < Q.size(); ++j) {
        const mpz_class before = floor_of(cum * m);
        cum += a[j];
        long n = mpz_class(floor_of(cum * m) - before).get_si();
        if (j == 0) n += static_cast<long>(P.size()) - 1;
        out.push_back(n);
    }
    return out;
}

std::vector<mpq_class> DivisorSpec::b(int m) const {
    const auto n = q_orders(m);
    std::vector<mpq_class> out;
    for (std::size_t j = 0; j < Q.size(); ++j) out.push_back(mpq_class(n[j]) - a[j] * m);
    return out;
}

mpq_class DivisorSpec::b_bound() const {
    mpq_class mx = 0;
    for (const auto& w : a) mx = std::max(mx, w);
    return mpq_class(static_cast<long>(P.size())) + mx;
}

Divisor DivisorSpec::divisor(int m, int k) const {
    Divisor d;
    for (const auto& p : P) d.emplace_back(p, -m);
    const auto n = q_orders(m);
    for (std::size_t j = 0; j < Q.size(); ++j) d.emplace_back(Q[j], static_cast<int>(n[j]));
    for (const auto& g : gamma) d.emplace_back(g, k);
    return d;
}

long DivisorSpec::degree(int m, int k) const {
    long deg = 0;
    for (const auto& [pt, o] : divisor(m, k)) deg += o;
    return deg;
}

namespace {

// Rows expressing "graded components of degree > p vanish in the t^p coefficient" at each gamma,
// for p in [from, to], over unknowns c_{s,b} (s scalar index, b algebra basis index).
void append_gamma_rows(const GradedDecomposition& dec, const std::vector<RationalMatrixFunction>& scal,
                       const std::vector<ExactVector>& gcols, const Point& gamma, int from, int to,
                       std::size_t unknowns, std::vector<ExactVector>& rows) {
    const std::size_t dimg = gcols.size();
    std::vector<LocalSeries> ex;
    for (const auto& f : scal) ex.push_back(f.expand(gamma, to));
    const auto& deg = dec.graded_degrees();
    for (int p = from; p <= to; ++p) {
        for (std::size_t r = 0; r < deg.size(); ++r) {
            if (deg[r] <= p) continue;
            ExactVector row(unknowns);
            bool any = false;
            for (std::size_t s = 0; s < scal.size(); ++s) {
                const Exact f = ex[s].coefficient(p)(0, 0);
                if (f.is_zero()) continue;
                for (std::size_t b = 0; b < dimg; ++b) {
                    if (gcols[b][r].is_zero()) continue;
                    row[s * dimg + b] = f * gcols[b][r];
                    any = true;
                }
            }
            if (any) rows.push_back(std::move(row));
        }
    }
}

ExactMatrix rows_to_matrix(const std::vector<ExactVector>& rows, std::size_t cols) {
    ExactMatrix a(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rows[i][j];
    return a;
}

RationalMatrixFunction combine(const std::vector<RationalMatrixFunction>& scal, const std::vector<ExactMatrix>& basis,
                               const ExactVector& coeffs, std::size_t size) {
    RationalMatrixFunction out(size, size);
    const std::size_t dimg = basis.size();
    for (std::size_t s = 0; s < scal.size(); ++s) {
        ExactMatrix m(size, size);
        bool any = false;
        for (std::size_t b = 0; b < dimg; ++b) {
            const Exact& c = coeffs[s * dimg + b];
            if (c.is_zero()) continue;
            m += basis[b] * c;
            any = true;
        }
        if (any) out += tensor(scal[s], m);
    }
    return out;
}

}  // namespace

AlgebraSlice build_homogeneous_subspace(const std::shared_ptr<const GradedDecomposition>& dec, const DivisorSpec& d,
                                        int m) {
    d.validate();
    const auto& alg = dec->algebra();
    const int k = dec->depth();
    const auto scal = scalar_space(d.divisor(m, k));
    const auto& basis = alg.basis();
    std::vector<ExactVector> gcols;
    for (const auto& b : basis) gcols.push_back(dec->graded_coordinates(b));
    const std::size_t unknowns = scal.size() * basis.size();

    std::vector<ExactVector> rows;
    for (const auto& g : d.gamma) append_gamma_rows(*dec, scal, gcols, g, -k, k - 1, unknowns, rows);

    AlgebraSlice out;
    out.m = m;
    out.expected_dim = d.P.size() * alg.dim();
    out.candidate_dim = unknowns;
    ExactMatrix ns;
    if (rows.empty()) {
        ns = ExactMatrix::identity(unknowns);
    } else {
        ns = nullspace(rows_to_matrix(rows, unknowns));
    }
    for (std::size_t c = 0; c < ns.cols(); ++c)
        out.basis.push_back(combine(scal, basis, ns.column_vector(c), alg.size()));
    return out;
}

std::map<int, AlgebraSlice> build_slices(const std::shared_ptr<const GradedDecomposition>& dec, const DivisorSpec& d,
                                         int mlo, int mhi) {
    std::map<int, AlgebraSlice> out;
    for (int m = mlo; m <= mhi; ++m) out.emplace(m, build_homogeneous_subspace(dec, d, m));
    return out;
}

std::vector<LaxViolation> gamma_violations(const GradedDecomposition& dec, const RationalMatrixFunction& f,
                                           const Point& gamma) {
    const int k = dec.depth();
    const LocalSeries s = f.expand(gamma, k - 1);
    std::vector<LaxViolation> out;
    for (int p = s.lo; p <= k - 1; ++p) {
        const ExactMatrix x = s.coefficient(p);
        if (x.is_zero()) continue;
        for (const auto& [q, comp] : dec.components(x))
            if (q > p && !comp.is_zero()) out.push_back(LaxViolation{p, q, comp});
    }
    return out;
}

namespace {

void note_poles(std::vector<std::pair<Point, int>>& layout, const RationalMatrixFunction& f) {
    for (const auto& pt : f.poles()) {
        auto it = std::find_if(layout.begin(), layout.end(), [&](const auto& e) { return e.first == pt; });
        if (it == layout.end())
            layout.emplace_back(pt, f.pole_order(pt));
        else
            it->second = std::max(it->second, f.pole_order(pt));
    }
}

std::size_t span_rank(const std::vector<const RationalMatrixFunction*>& fs,
                      const std::vector<std::pair<Point, int>>& layout) {
    if (fs.empty()) return 0;
    std::vector<ExactVector> flat;
    for (const auto* f : fs) flat.push_back(f->flatten(layout));
    ExactMatrix a(flat.front().size(), flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j)
        for (std::size_t i = 0; i < flat[j].size(); ++i) a(i, j) = flat[j][i];
    return rank(a);
}

}  // namespace

GradedBound almost_graded_bound(const std::map<int, AlgebraSlice>& slices, int m, int n, int max_s) {
    std::vector<RationalMatrixFunction> targets;
    for (const auto& x : slices.at(m).basis)
        for (const auto& y : slices.at(n).basis) targets.push_back(commutator(x, y));
    std::vector<std::pair<Point, int>> layout;
    for (const auto& f : targets) note_poles(layout, f);
    for (int r = m + n; r <= m + n + max_s; ++r) {
        auto it = slices.find(r);
        if (it == slices.end()) throw std::out_of_range("slice " + std::to_string(r) + " was not built");
        for (const auto& f : it->second.basis) note_poles(layout, f);
    }
    std::vector<const RationalMatrixFunction*> span;
    GradedBound out;
    for (int s = 0; s <= max_s; ++s) {
        for (const auto& f : slices.at(m + n + s).basis) span.push_back(&f);
        const std::size_t base = span_rank(span, layout);
        std::vector<const RationalMatrixFunction*> all = span;
        for (const auto& t : targets) all.push_back(&t);
        if (span_rank(all, layout) == base) {
            out.expanded = true;
            out.S = s;
            return out;
        }
    }
    return out;
}

std::size_t slice_intersection_dim(const AlgebraSlice& a, const AlgebraSlice& b) {
    std::vector<std::pair<Point, int>> layout;
    std::vector<const RationalMatrixFunction*> all;
    for (const auto& f : a.basis) {
        note_poles(layout, f);
        all.push_back(&f);
    }
    for (const auto& f : b.basis) {
        note_poles(layout, f);
        all.push_back(&f);
    }
    return a.basis.size() + b.basis.size() - span_rank(all, layout);
}

RationalMatrixFunction canonical_omega(const GradedDecomposition& dec, const DivisorSpec& d) {
    d.validate();
    const ExactMatrix& h = dec.grading_element();
    RationalMatrixFunction w(h.rows(), h.cols());
    for (const auto& g : d.gamma) {
        if (g.infinite) throw std::invalid_argument("Gamma points must be finite");
        w += RationalMatrixFunction::pole(g, 1, h);
        if (!d.P.front().infinite) w -= RationalMatrixFunction::pole(d.P.front(), 1, h);
    }
    return w;
}

Cocycle::Cocycle(std::shared_ptr<const GradedDecomposition> dec, DivisorSpec spec, RationalMatrixFunction omega)
    : dec_(std::move(dec)), spec_(std::move(spec)), omega_(std::move(omega)) {
    spec_.validate();
    const ExactMatrix& h = dec_->grading_element();
    const int k = std::max(1, dec_->depth());
    for (const auto& g : spec_.gamma) {
        const LocalSeries s = omega_at(g, k);
        if (s.lo < -1) throw std::invalid_argument("omega has a pole of order > 1 at " + g.str());
        if (s.coefficient(-1) != h) throw std::invalid_argument("omega residue at " + g.str() + " is not h");
        for (int e = 0; e <= k; ++e) {
            const ExactMatrix x = s.coefficient(e);
            if (x.is_zero()) continue;
            std::map<int, ExactMatrix> comps;
            try {
                comps = dec_->components(x);
            } catch (const std::exception&) {
                throw std::invalid_argument("omega is not algebra-valued at " + g.str());
            }
            for (const auto& [q, c] : comps)
                if (q != 0 && !c.is_zero())
                    throw std::invalid_argument("omega regular part at " + g.str() + " leaves g_0");
        }
    }
}

LocalSeries Cocycle::omega_at(const Point& at, int hi) const {
    if (!at.infinite) return omega_.expand(at, hi);
    // omega_w = -omega_z(1/w) / w^2
    LocalSeries s = omega_.expand(at, hi + 2);
    s.lo -= 2;
    for (auto& c : s.c) c = -c;
    return s;
}

namespace {

std::map<int, Exact> pairing_traces(const LocalSeries& l, const LocalSeries& dlp) {
    std::map<int, Exact> out;
    const LocalSeries prod = multiply(l, dlp);
    for (int e = prod.lo; e <= prod.hi(); ++e) out[e] = prod.coefficient(e).trace();
    return out;
}

}  // namespace

Exact Cocycle::residue(const RationalMatrixFunction& l, const RationalMatrixFunction& lp, const Point& at,
                       bool with_omega) const {
    const int a = -l.pole_order(at), b = -lp.pole_order(at);
    const int u = -1;
    std::map<int, Exact> tr = pairing_traces(l.expand(at, u - b + 1), derivative(lp.expand(at, u - a + 1)));
    Exact r = tr.count(u) ? tr[u] : Exact(0);
    if (with_omega) {
        const int o = omega_at(at, 0).lo;
        const LocalSeries w = omega_at(at, u - a - b);
        const LocalSeries br = commutator(w, lp.expand(at, u - a - o));
        auto t2 = pairing_traces(l.expand(at, u - o - b), br);
        if (t2.count(u)) r -= t2[u];
    }
    return r;
}

Exact Cocycle::eta(const RationalMatrixFunction& l, const RationalMatrixFunction& lp) const {
    Exact sum(0);
    for (const auto& p : spec_.P) sum += residue(l, lp, p, true);
    return sum;
}

Exact Cocycle::residue_dform(const RationalMatrixFunction& l, const RationalMatrixFunction& lp,
                             const Point& at) const {
    return residue(l, lp, at, false);
}

std::map<int, Exact> Cocycle::holomorphy_tail(const RationalMatrixFunction& l, const RationalMatrixFunction& lp,
                                              const Point& gamma) const {
    const int a = -l.pole_order(gamma), b = -lp.pole_order(gamma);
    const int u = -1;
    const int o = omega_at(gamma, 0).lo;
    std::map<int, Exact> sum = pairing_traces(l.expand(gamma, u - b + 1), derivative(lp.expand(gamma, u - a + 1)));
    const LocalSeries br = commutator(omega_at(gamma, u - a - b), lp.expand(gamma, u - a - o));
    for (const auto& [e, v] : pairing_traces(l.expand(gamma, u - o - b), br)) sum[e] -= v;
    std::map<int, Exact> out;
    for (const auto& [e, v] : sum)
        if (e <= u && !v.is_zero()) out.emplace(e, v);
    return out;
}

int Cocycle::locality_upper_bound() const {
    int mn = -1;
    for (const auto& p : spec_.P) {
        const int o = p.infinite ? omega_.order_at(p, 2) - 2 : omega_.order_at(p, 0);
        mn = std::min(mn, o);
    }
    return -1 - mn;
}

ExactMatrix gradient_invariant(const MatrixAlgebra& alg, const ExactMatrix& x, int p) {
    if (p < 1) throw std::invalid_argument("invariant degree must be positive");
    if (alg.family() != Family::A && p % 2 == 1)
        throw std::invalid_argument("tr X^p vanishes identically on " + alg.name() + " for odd p");
    ExactMatrix pw = ExactMatrix::identity(x.rows());
    for (int i = 1; i < p; ++i) pw = pw * x;
    return project_to_algebra(alg, pw * Exact(p));
}

MOperatorResult construct_M_operator(const std::shared_ptr<const GradedDecomposition>& dec,
                                     const std::vector<Point>& gammas, const RationalMatrixFunction& l, int power,
                                     const Point& p, int m, const std::vector<Point>& normalization) {
    const auto& alg = dec->algebra();
    const int k = dec->depth();
    if (k < 1) throw std::invalid_argument("M-operators need a grading of positive depth");
    if (power < 1) throw std::invalid_argument("invariant degree must be positive");
    if (alg.family() != Family::A && power % 2 == 1)
        throw std::invalid_argument("tr L^p vanishes identically on " + alg.name() + " for odd p");
    if (contains_point(gammas, p)) throw std::invalid_argument("P must lie outside Gamma");
    const std::size_t n = alg.size();
    const auto& basis = alg.basis();
    const std::size_t dimg = basis.size();

    const int op = l.pole_order(p);
    const int d = std::max(0, m + (power - 1) * op);
    // p L^{p-1} at P, known up to t^{m-1}.
    LocalSeries x;
    x.rows = x.cols = n;
    if (power == 1) {
        x.lo = 0;
        x.c.assign(static_cast<std::size_t>(std::max(0, m) + 1), ExactMatrix(n, n));
        x.c[0] = ExactMatrix::identity(n);
    } else {
        const int hl = std::max(-op, m + (power - 2) * op + 1);
        const LocalSeries ls = l.expand(p, hl);
        x = ls;
        for (int i = 2; i < power; ++i) x = multiply(x, ls);
    }
    std::map<int, ExactVector> target;
    for (int e = -d; e <= -1; ++e) {
        const ExactMatrix v = project_to_algebra(alg, x.coefficient(e + m) * Exact(power));
        target[e] = *alg.coordinates(v);
    }

    Divisor dv;
    if (d > 0) dv.emplace_back(p, d);
    for (const auto& g : gammas) dv.emplace_back(g, k);
    const auto scal = scalar_space(dv);
    std::vector<ExactVector> gcols;
    for (const auto& b : basis) gcols.push_back(dec->graded_coordinates(b));
    const std::size_t nc = scal.size() * dimg;
    const std::size_t unknowns = nc + gammas.size();

    std::vector<ExactVector> rows;
    ExactVector rhs;
    const ExactVector hg = dec->graded_coordinates(dec->grading_element());
    const auto& deg = dec->graded_degrees();
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        if (k >= 2) append_gamma_rows(*dec, scal, gcols, gammas[gi], -k, -2, unknowns, rows);
        std::vector<Exact> f;
        for (const auto& s : scal) f.push_back(s.expand(gammas[gi], -1).coefficient(-1)(0, 0));
        for (std::size_t r = 0; r < deg.size(); ++r) {
            if (deg[r] < 0) continue;
            ExactVector row(unknowns);
            for (std::size_t s = 0; s < scal.size(); ++s)
                for (std::size_t b = 0; b < dimg; ++b) row[s * dimg + b] = f[s] * gcols[b][r];
            if (deg[r] == 0) row[nc + gi] = -hg[r];
            rows.push_back(std::move(row));
        }
    }
    rhs.assign(rows.size(), Exact(0));
    const std::size_t membership_rows = rows.size();

    if (d > 0) {
        std::vector<LocalSeries> ex;
        for (const auto& s : scal) ex.push_back(s.expand(p, -1));
        for (int e = -d; e <= -1; ++e) {
            for (std::size_t b = 0; b < dimg; ++b) {
                ExactVector row(unknowns);
                for (std::size_t s = 0; s < scal.size(); ++s) row[s * dimg + b] = ex[s].coefficient(e)(0, 0);
                rows.push_back(std::move(row));
                rhs.push_back(target[e][b]);
            }
        }
    }
    for (const auto& pt : normalization) {
        if (contains_point(gammas, pt) || pt == p) throw std::invalid_argument("normalization point is a pole of M");
        std::vector<Exact> vals;
        for (const auto& s : scal) vals.push_back(scalar_value(s, pt));
        for (std::size_t b = 0; b < dimg; ++b) {
            ExactVector row(unknowns);
            for (std::size_t s = 0; s < scal.size(); ++s) row[s * dimg + b] = vals[s];
            rows.push_back(std::move(row));
            rhs.push_back(Exact(0));
        }
    }

    MOperatorResult out;
    out.pole_order = d;
    out.unknowns = unknowns;
    const ExactMatrix mem = rows_to_matrix(std::vector<ExactVector>(rows.begin(), rows.begin() + membership_rows),
                                           unknowns);
    out.space_dim = unknowns - (membership_rows ? rank(mem) : 0);
    const long twisted = static_cast<long>(dec->negative_filtration_sum() + 1) * static_cast<long>(gammas.size());
    out.expected_space_dim = dimg * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(twisted);
    if (twisted % static_cast<long>(dimg) == 0) out.l = twisted / static_cast<long>(dimg);

    const ExactMatrix a = rows_to_matrix(rows, unknowns);
    out.rank = rank(a);
    out.unique = out.rank == unknowns;
    const auto sol = solve(a, rhs);
    if (!sol) throw std::runtime_error("M-operator conditions are inconsistent");
    out.m = combine(scal, basis, *sol, n);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) out.nu.push_back((*sol)[nc + gi]);
    return out;
}

TangencyReport lax_tangency_check(const std::shared_ptr<const GradedDecomposition>& dec,
                                  const std::vector<Point>& gammas, const RationalMatrixFunction& l,
                                  const RationalMatrixFunction& m, const Divisor& bounds) {
    TangencyReport rep;
    const int k = dec->depth();
    const std::size_t n = dec->algebra().size();
    const ExactMatrix& h = dec->grading_element();
    const RationalMatrixFunction t = commutator(l, m);
    const int trunc = k + 1;

    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const Point& g = gammas[gi];
        const std::string where = "gamma " + std::to_string(gi) + ": ";
        const std::size_t before = rep.failures.size();
        if (!gamma_violations(*dec, l, g).empty()) rep.failures.push_back(where + "L violates the expansion condition");
        const LocalSeries ms = m.expand(g, trunc);
        if (ms.lo < -k)
            rep.failures.push_back(where + "M has a pole of order " + std::to_string(-ms.lo) + " > " +
                                   std::to_string(k));
        for (int p = std::max(ms.lo, -k); p <= -1; ++p) {
            const ExactMatrix x = ms.coefficient(p);
            if (x.is_zero()) continue;
            const int limit = p == -1 ? 0 : p;
            for (const auto& [q, comp] : dec->components(x))
                if (q > limit && !comp.is_zero())
                    rep.failures.push_back(where + "M coefficient at degree " + std::to_string(p) + " has a g_" +
                                           std::to_string(q) + " component");
        }
        if (rep.failures.size() != before) continue;

        const ExactMatrix c0 = dec->project(ms.coefficient(-1), 0);
        Exact nu(0);
        bool found = false;
        for (std::size_t i = 0; i < n && !found; ++i)
            for (std::size_t j = 0; j < n && !found; ++j)
                if (!h(i, j).is_zero()) {
                    nu = c0(i, j) / h(i, j);
                    found = true;
                }
        if (c0 != h * nu) {
            rep.failures.push_back(where + "g_0 part of the residue of M is not a multiple of h");
            continue;
        }
        rep.nu.push_back(nu);

        const LocalSeries ls = l.expand(g, trunc);
        MatrixLaurent lml(dec, n, -k, trunc);
        MOpExpansion mop{nu, MatrixLaurent(dec, n, -k, trunc)};
        for (int p = -k; p <= trunc; ++p) {
            lml.set(p, ls.coefficient(p));
            ExactMatrix mp = ms.coefficient(p);
            if (p == -1) mp -= h * nu;
            mop.series.set(p, mp);
        }
        const MatrixLaurent ldot = tangency_velocity(lml, mop);
        const auto expected = total_derivative(lml, ldot, -nu, -k - 1, 0);
        const LocalSeries ts = t.expand(g, 0);
        for (int p = ts.lo; p <= 0; ++p) {
            const ExactMatrix want = p < -k - 1 ? ExactMatrix(n, n) : expected.at(p);
            if (ts.coefficient(p) != want)
                rep.failures.push_back(where + "[L, M] at degree " + std::to_string(p) +
                                       " differs from the tangency expansion");
        }
    }

    std::vector<Point> pts = t.poles();
    for (const auto& [pt, dd] : bounds)
        if (!contains_point(pts, pt)) pts.push_back(pt);
    for (const auto& pt : pts) {
        if (contains_point(gammas, pt)) continue;
        int allowed = 0;
        for (const auto& [bp, dd] : bounds)
            if (bp == pt) allowed = dd;
        const int o = t.order_at(pt, -allowed);
        if (o < -allowed)
            rep.failures.push_back("[L, M] has order " + std::to_string(o) + " at " + pt.str() + ", below " +
                                   std::to_string(-allowed));
    }
    return rep;
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t count, const std::vector<Point>& avoid) {
    std::vector<Point> out;
    while (out.size() < count) {
        const Point p = Point::at(random_rational(rng, 9, 4));
        if (contains_point(avoid, p) || contains_point(out, p)) continue;
        out.push_back(p);
    }
    return out;
}

}  // namespace laxkit
