#include "laxkit/formal.hpp"

#include <algorithm>
#include <stdexcept>

namespace laxkit {

MatrixLaurent::MatrixLaurent(std::shared_ptr<const GradedDecomposition> dec, std::size_t size, int pmin, int trunc)
    : dec_(std::move(dec)), size_(size), pmin_(pmin), trunc_(trunc) {
    if (trunc < pmin - 1) throw std::invalid_argument("truncation below the lowest degree");
    coeffs_.assign(static_cast<std::size_t>(trunc - pmin + 1), ExactMatrix(size, size));
}

MatrixLaurent MatrixLaurent::zero(std::shared_ptr<const GradedDecomposition> dec, int pmin, int trunc) {
    const std::size_t n = dec ? dec->algebra().size() : 0;
    return MatrixLaurent(std::move(dec), n, pmin, trunc);
}

ExactMatrix MatrixLaurent::coefficient(int p) const {
    if (p > trunc_) throw std::out_of_range("degree " + std::to_string(p) + " is above the truncation order");
    if (p < pmin_) return ExactMatrix(size_, size_);
    return coeffs_[static_cast<std::size_t>(p - pmin_)];
}

void MatrixLaurent::set(int p, ExactMatrix m) {
    if (p < pmin_ || p > trunc_) throw std::out_of_range("degree outside the stored range");
    if (m.rows() != size_ || m.cols() != size_) throw std::invalid_argument("coefficient has wrong size");
    coeffs_[static_cast<std::size_t>(p - pmin_)] = std::move(m);
}

bool MatrixLaurent::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const ExactMatrix& m) { return m.is_zero(); });
}

std::optional<int> MatrixLaurent::lowest_degree() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (!coeffs_[i].is_zero()) return pmin_ + static_cast<int>(i);
    return std::nullopt;
}

MatrixLaurent MatrixLaurent::truncated(int trunc) const {
    MatrixLaurent out(dec_, size_, pmin_, std::min(trunc, trunc_));
    for (int p = pmin_; p <= out.trunc_; ++p) out.set(p, coefficient(p));
    return out;
}

MatrixLaurent& MatrixLaurent::operator+=(const MatrixLaurent& o) {
    if (o.size_ != size_) throw std::invalid_argument("series sizes differ");
    MatrixLaurent out(dec_ ? dec_ : o.dec_, size_, std::min(pmin_, o.pmin_), std::min(trunc_, o.trunc_));
    for (int p = out.pmin_; p <= out.trunc_; ++p) out.set(p, coefficient(p) + o.coefficient(p));
    return *this = std::move(out);
}

MatrixLaurent& MatrixLaurent::operator*=(const Exact& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

bool operator==(const MatrixLaurent& a, const MatrixLaurent& b) {
    const int lo = std::min(a.pmin_, b.pmin_);
    const int hi = std::min(a.trunc_, b.trunc_);
    for (int p = lo; p <= hi; ++p)
        if (a.coefficient(p) != b.coefficient(p)) return false;
    return true;
}

MatrixLaurent commutator(const MatrixLaurent& a, const MatrixLaurent& b) {
    if (a.dec() && b.dec() && &a.dec()->algebra() != &b.dec()->algebra())
        throw std::invalid_argument("series belong to different algebras");
    if (a.size() != b.size()) throw std::invalid_argument("series sizes differ");
    const int pmin = a.pmin() + b.pmin();
    const int trunc = std::min(a.trunc() + b.pmin(), b.trunc() + a.pmin());
    MatrixLaurent out(a.dec() ? a.dec() : b.dec(), a.size(), pmin, trunc);
    for (int p = pmin; p <= trunc; ++p) {
        ExactMatrix c(a.size(), a.size());
        for (int i = a.pmin(); i <= p - b.pmin(); ++i) c += commutator(a.coefficient(i), b.coefficient(p - i));
        out.set(p, std::move(c));
    }
    return out;
}

namespace {

const GradedDecomposition& require_dec(const MatrixLaurent& e) {
    if (!e.dec()) throw std::invalid_argument("series has no grading attached");
    return *e.dec();
}

void collect_violations(const GradedDecomposition& dec, const MatrixLaurent& e, int from, int to,
                        std::vector<LaxViolation>& out) {
    for (int p = from; p <= std::min(to, e.trunc()); ++p) {
        const ExactMatrix c = e.coefficient(p);
        if (c.is_zero()) continue;
        for (const auto& [q, part] : dec.components(c))
            if (q > p) out.push_back({p, q, part});
    }
}

ExactMatrix random_in_filtration(const GradedDecomposition& dec, int p, std::mt19937_64& rng) {
    const std::size_t n = dec.algebra().size();
    ExactMatrix x(n, n);
    const auto& basis = dec.graded_basis();
    const auto& deg = dec.graded_degrees();
    for (std::size_t b = 0; b < basis.size(); ++b)
        if (deg[b] <= p) x += basis[b] * random_rational(rng, 4, 3);
    return x;
}

}  // namespace

std::vector<LaxViolation> validate_lax(const MatrixLaurent& e) {
    const auto& dec = require_dec(e);
    std::vector<LaxViolation> out;
    collect_violations(dec, e, e.pmin(), dec.depth() - 1, out);
    return out;
}

MatrixLaurent random_lax(const std::shared_ptr<const GradedDecomposition>& dec, std::mt19937_64& rng, int trunc) {
    MatrixLaurent e = MatrixLaurent::zero(dec, -dec->depth(), trunc);
    for (int p = -dec->depth(); p <= trunc; ++p) e.set(p, random_in_filtration(*dec, p, rng));
    return e;
}

MatrixLaurent MOpExpansion::full() const {
    const auto& dec = require_dec(series);
    const int pmin = std::min(series.pmin(), -1);
    MatrixLaurent out(series.dec(), series.size(), pmin, series.trunc());
    for (int p = pmin; p <= series.trunc(); ++p) out.set(p, series.coefficient(p));
    out.set(-1, out.coefficient(-1) + dec.grading_element() * nu);
    return out;
}

std::vector<LaxViolation> validate_mop(const MOpExpansion& m) {
    const auto& dec = require_dec(m.series);
    std::vector<LaxViolation> out;
    collect_violations(dec, m.series, m.series.pmin(), -1, out);
    return out;
}

MOpExpansion random_mop(const std::shared_ptr<const GradedDecomposition>& dec, std::mt19937_64& rng, int trunc) {
    MOpExpansion m;
    do m.nu = random_rational(rng, 4, 3);
    while (m.nu.is_zero());
    m.series = MatrixLaurent::zero(dec, -dec->depth(), trunc);
    for (int p = -dec->depth(); p <= trunc; ++p)
        m.series.set(p, p < 0 ? random_in_filtration(*dec, p, rng) : dec->algebra().random_element(rng));
    return m;
}

MatrixLaurent commutator(const MatrixLaurent& l, const MOpExpansion& m) { return commutator(l, m.full()); }

MatrixLaurent conjugate_pole_elimination(const MatrixLaurent& e, int direction) {
    const auto& dec = require_dec(e);
    if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    const int k = dec.depth();
    MatrixLaurent out(e.dec(), e.size(), e.pmin() - k, e.trunc() - k);
    for (int i = e.pmin(); i <= e.trunc(); ++i) {
        const ExactMatrix c = e.coefficient(i);
        if (c.is_zero()) continue;
        for (const auto& [s, part] : dec.components(c)) {
            const int target = i - direction * s;
            if (target <= out.trunc()) out.set(target, out.coefficient(target) + part);
        }
    }
    return out;
}

bool TangencyResidual::vanishes() const {
    if (!zdot.is_zero()) return false;
    return std::all_of(degree.begin(), degree.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

namespace {

// sum_{i+j=p} [L_i, M_j] + nu sum_s (p+1-s) L^s_{p+1}
ExactMatrix tangency_rhs(const GradedDecomposition& dec, const MatrixLaurent& l, const MOpExpansion& m, int p) {
    ExactMatrix r(l.size(), l.size());
    for (int i = l.pmin(); i <= p - m.series.pmin(); ++i) r += commutator(l.coefficient(i), m.series.coefficient(p - i));
    const ExactMatrix next = l.coefficient(p + 1);
    if (!next.is_zero())
        for (const auto& [s, part] : dec.components(next)) r += part * (m.nu * Exact(p + 1 - s));
    return r;
}

}  // namespace

TangencyResidual tangency_relations_residual(const MatrixLaurent& l, const MatrixLaurent& ldot, const MOpExpansion& m,
                                             const Exact& zdot) {
    const auto& dec = require_dec(l);
    TangencyResidual res;
    res.zdot = zdot + m.nu;
    for (int p = -dec.depth(); p <= 0; ++p) res.degree[p] = ldot.coefficient(p) - tangency_rhs(dec, l, m, p);
    return res;
}

MatrixLaurent tangency_velocity(const MatrixLaurent& l, const MOpExpansion& m) {
    const auto& dec = require_dec(l);
    MatrixLaurent out(l.dec(), l.size(), -dec.depth(), 0);
    for (int p = -dec.depth(); p <= 0; ++p) out.set(p, tangency_rhs(dec, l, m, p));
    return out;
}

std::map<int, ExactMatrix> total_derivative(const MatrixLaurent& l, const MatrixLaurent& ldot, const Exact& zdot,
                                            int from, int to) {
    std::map<int, ExactMatrix> out;
    for (int p = from; p <= to; ++p) {
        ExactMatrix c = p < ldot.pmin() ? ExactMatrix(l.size(), l.size()) : ldot.coefficient(p);
        c += l.coefficient(p + 1) * (zdot * Exact(p + 1));
        out.emplace(p, std::move(c));
    }
    return out;
}

MatrixLaurent conjugated(const MatrixLaurent& e, const ExactMatrix& g) {
    const ExactMatrix gi = inverse(g);
    MatrixLaurent out(e.dec(), e.size(), e.pmin(), e.trunc());
    for (int p = e.pmin(); p <= e.trunc(); ++p) out.set(p, g * e.coefficient(p) * gi);
    return out;
}

namespace {

std::optional<ExactMatrix> unipotent_exp(const ExactMatrix& x) {
    const std::size_t n = x.rows();
    ExactMatrix sum = ExactMatrix::identity(n);
    ExactMatrix term = ExactMatrix::identity(n);
    for (std::size_t j = 1; j <= n; ++j) {
        term = term * x * Exact::fraction(1, static_cast<long>(j));
        if (term.is_zero()) return sum;
        sum += term;
    }
    return std::nullopt;
}

}  // namespace

ExactMatrix random_conjugator(const MatrixAlgebra& alg, std::mt19937_64& rng) {
    const std::size_t n = alg.size();
    switch (alg.family()) {
        case Family::A:
            for (int attempt = 0; attempt < 100; ++attempt) {
                ExactMatrix g(n, n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) g(i, j) = random_rational(rng, 3, 2);
                if (rank(g) == n) return g;
            }
            break;
        case Family::B:
        case Family::C:
        case Family::D:
            for (int attempt = 0; attempt < 100; ++attempt) {
                const ExactMatrix x = alg.random_element(rng, 2, 3);
                const ExactMatrix id = ExactMatrix::identity(n);
                if (rank(id - x) < n) continue;
                return inverse(id - x) * (id + x);
            }
            break;
        case Family::G2: {
            std::vector<ExactMatrix> nilpotent;
            for (const auto& b : alg.basis())
                if (unipotent_exp(b)) nilpotent.push_back(b);
            std::uniform_int_distribution<std::size_t> pick(0, nilpotent.size() - 1);
            ExactMatrix g = ExactMatrix::identity(n);
            for (int f = 0; f < 6; ++f) g = g * *unipotent_exp(nilpotent[pick(rng)] * random_rational(rng, 2, 2));
            return g;
        }
    }
    throw std::runtime_error("failed to sample a group element");
}

// ---------------------------------------------------------------------------

bool TyurinReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

std::vector<std::string> TyurinReport::failures() const {
    std::vector<std::string> out;
    for (const auto& [name, ok] : checks)
        if (!ok) out.push_back(name);
    return out;
}

namespace {

ExactMatrix outer(const ExactVector& a, const ExactVector& b) {
    ExactMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

ExactVector scale(ExactVector v, const Exact& s) {
    for (auto& x : v) x *= s;
    return v;
}

ExactVector transpose_times(const ExactMatrix& m, const ExactVector& v) { return m.transpose() * v; }

bool vanish_below(const MatrixLaurent& e, int degree) {
    for (int p = e.pmin(); p < degree && p <= e.trunc(); ++p)
        if (!e.coefficient(p).is_zero()) return false;
    return true;
}

void gl_checks(const MatrixLaurent& e, const ExactVector& alpha, TyurinReport& r) {
    r.checks.emplace_back("no poles below order 1", vanish_below(e, -1));
    const ExactMatrix lm1 = e.coefficient(-1);
    std::size_t row = 0;
    while (row < alpha.size() && alpha[row].is_zero()) ++row;
    ExactVector beta(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) beta[j] = lm1(row, j) / alpha[row];
    r.beta = beta;
    r.checks.emplace_back("L_-1 = alpha beta^t", lm1 == outer(alpha, beta));
    r.checks.emplace_back("beta^t alpha = 0", dot(beta, alpha).is_zero());
    const ExactVector l0a = e.coefficient(0) * alpha;
    const Exact kappa = dot(alpha, l0a) / dot(alpha, alpha);
    r.kappa = kappa;
    r.checks.emplace_back("L_0 alpha = kappa alpha", l0a == scale(alpha, kappa));
}

void so_checks(const MatrixLaurent& e, const ExactMatrix& sigma, const ExactVector& alpha, TyurinReport& r) {
    r.checks.emplace_back("no poles below order 1", vanish_below(e, -1));
    const ExactMatrix w = e.coefficient(-1) * inverse(sigma);
    const ExactVector v = scale(alpha, Exact(1) / dot(alpha, alpha));
    const ExactVector beta = scale(w * v, Exact(-1));
    r.beta = beta;
    r.checks.emplace_back("L_-1 = (alpha beta^t - beta alpha^t) sigma", w == outer(alpha, beta) - outer(beta, alpha));
    r.checks.emplace_back("beta^t sigma alpha = 0", dot(beta, sigma * alpha).is_zero());
    r.checks.emplace_back("alpha^t sigma alpha = 0", dot(alpha, sigma * alpha).is_zero());
}

void sp_checks(const MatrixLaurent& e, const ExactMatrix& sigma, const ExactVector& alpha, TyurinReport& r) {
    r.checks.emplace_back("no poles below order 2", vanish_below(e, -2));
    const ExactMatrix sinv = inverse(sigma);
    const ExactMatrix w2 = e.coefficient(-2) * sinv;
    const Exact aa = dot(alpha, alpha);
    const Exact nu = dot(alpha, w2 * alpha) / (aa * aa);
    r.nu = nu;
    r.checks.emplace_back("L_-2 = nu alpha alpha^t sigma", w2 == outer(alpha, alpha) * nu);
    const ExactMatrix w1 = e.coefficient(-1) * sinv;
    const ExactVector v = scale(alpha, Exact(1) / aa);
    const Exact half = dot(v, w1 * v) * Exact::fraction(1, 2);
    ExactVector beta = w1 * v;
    for (std::size_t i = 0; i < beta.size(); ++i) beta[i] -= alpha[i] * half;
    r.beta = beta;
    r.checks.emplace_back("L_-1 = (alpha beta^t + beta alpha^t) sigma", w1 == outer(alpha, beta) + outer(beta, alpha));
    r.checks.emplace_back("alpha^t sigma L_1 alpha = 0", dot(alpha, sigma * (e.coefficient(1) * alpha)).is_zero());
}

// Block pieces of a 7x7 G2 matrix: first column parts a1, a2 and the upper 3x3 block A.
struct G2Blocks {
    ExactVector a1, a2;
    ExactMatrix a;
};

G2Blocks g2_blocks(const ExactMatrix& x) {
    G2Blocks b{ExactVector(3), ExactVector(3), ExactMatrix(3, 3)};
    for (std::size_t i = 0; i < 3; ++i) {
        b.a1[i] = x(1 + i, 0);
        b.a2[i] = x(4 + i, 0);
        for (std::size_t j = 0; j < 3; ++j) b.a(i, j) = x(1 + i, 1 + j);
    }
    return b;
}

ExactMatrix bracket3(const ExactVector& x) {
    ExactMatrix m(3, 3);
    m(0, 1) = x[2];
    m(0, 2) = -x[1];
    m(1, 0) = -x[2];
    m(1, 2) = x[0];
    m(2, 0) = x[1];
    m(2, 1) = -x[0];
    return m;
}

void put_block(ExactMatrix& m, std::size_t r0, std::size_t c0, const ExactMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) m(r0 + i, c0 + j) = b(i, j);
}

void g2_checks(const MatrixLaurent& e, const ExactMatrix& g, TyurinReport& r) {
    const MatrixLaurent std_frame = conjugated(e, inverse(g));
    r.checks.emplace_back("no poles below order 2", vanish_below(std_frame, -2));
    const ExactVector t1{Exact(0), Exact(1), Exact(0)};
    const ExactVector t2{Exact(0), Exact(0), Exact(1)};
    const Exact sqrt2 = Exact::sqrt_of(2);

    const ExactMatrix lm2 = std_frame.coefficient(-2);
    const Exact mu = lm2(2, 3);
    ExactMatrix expect2(7, 7);
    put_block(expect2, 1, 1, outer(t1, t2) * mu);
    put_block(expect2, 4, 4, outer(t2, t1) * -mu);
    r.checks.emplace_back("L_-2 = mu diag(0, a1 a2^t, -a2 a1^t)", lm2 == expect2);

    const ExactMatrix lm1 = std_frame.coefficient(-1);
    const G2Blocks b = g2_blocks(lm1);
    const Exact b01 = b.a1[1] / sqrt2;
    const Exact b02 = b.a2[2] / sqrt2;
    // A = t1 beta2^t - beta1 t2^t with beta2_2 = 0, beta1_3 = 0; the (2,3) entry is shared.
    const ExactVector beta2{b.a(1, 0), Exact(0), b.a(1, 2)};
    const ExactVector beta1{-b.a(0, 2), Exact(0), Exact(0)};
    ExactMatrix expect1(7, 7);
    const ExactVector r01 = scale(t2, -sqrt2 * b02);
    const ExactVector r02 = scale(t1, -sqrt2 * b01);
    for (std::size_t i = 0; i < 3; ++i) {
        expect1(0, 1 + i) = r01[i];
        expect1(0, 4 + i) = r02[i];
        expect1(1 + i, 0) = sqrt2 * b01 * t1[i];
        expect1(4 + i, 0) = sqrt2 * b02 * t2[i];
    }
    put_block(expect1, 1, 1, outer(t1, beta2) - outer(beta1, t2));
    put_block(expect1, 1, 4, bracket3(t2) * b02);
    put_block(expect1, 4, 1, bracket3(t1) * b01);
    put_block(expect1, 4, 4, outer(t2, beta1) - outer(beta2, t1));
    r.checks.emplace_back("L_-1 has the residue shape", lm1 == expect1);
    r.checks.emplace_back("a1^t beta2 = 0 and a2^t beta1 = 0", dot(t1, beta2).is_zero() && dot(t2, beta1).is_zero());
    r.beta = beta1;
    r.beta.insert(r.beta.end(), beta2.begin(), beta2.end());

    const G2Blocks b0 = g2_blocks(std_frame.coefficient(0));
    r.checks.emplace_back("a1~^t a_2 = 0", dot(t1, b0.a2).is_zero());
    r.checks.emplace_back("a2~^t a_1 = 0", dot(t2, b0.a1).is_zero());
    const ExactVector at1 = b0.a * t1;
    r.checks.emplace_back("A a1~ = kappa1 a1~", at1 == scale(t1, at1[1]));
    const ExactVector at2 = scale(transpose_times(b0.a, t2), Exact(-1));
    r.checks.emplace_back("-A^t a2~ = kappa2 a2~", at2 == scale(t2, at2[2]));
}

}  // namespace

TyurinReport validate_tyurin_form(const GradedDecomposition& catalog, const MatrixLaurent& e, const ExactMatrix& g) {
    const MatrixAlgebra& alg = catalog.algebra();
    const Family f = alg.family();
    const int root = f == Family::G2 ? 2 : 1;
    const bool supported = !alg.traceless() && !(f == Family::D && alg.parameter() < 3) &&
                           catalog.grading_element() == alg.grading_element(root);
    if (!supported) throw std::invalid_argument("no Tyurin form catalogued for this grading of " + alg.name());
    if (e.trunc() < (f == Family::C ? 1 : 0)) throw std::invalid_argument("expansion truncated too early");

    TyurinReport r;
    if (f == Family::G2) {
        g2_checks(e, g, r);
        return r;
    }
    r.alpha = g.column_vector(0);
    switch (f) {
        case Family::A: gl_checks(e, r.alpha, r); break;
        case Family::B:
        case Family::D: so_checks(e, alg.form(), r.alpha, r); break;
        case Family::C: sp_checks(e, alg.form(), r.alpha, r); break;
        case Family::G2: break;
    }
    return r;
}

}  // namespace laxkit
