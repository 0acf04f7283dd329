#include "laxkit/calogero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace laxkit {

namespace {

constexpr double pi = std::numbers::pi;

// One wp term of the potential: coef * wp(arg) with arg = q_i - q_j, q_i + q_j, 2 q_i or q_i.
enum class Arg { difference, sum, doubled, single };

struct PotentialTerm {
    cplx coef;
    Arg kind;
    int i, j;
};

cplx argument(const PotentialTerm& t, const CVector& q) {
    switch (t.kind) {
    case Arg::difference: return q(t.i) - q(t.j);
    case Arg::sum: return q(t.i) + q(t.j);
    case Arg::doubled: return 2.0 * q(t.i);
    case Arg::single: return q(t.i);
    }
    return 0.0;
}

const char* describe(Arg a) {
    switch (a) {
    case Arg::difference: return "q_i - q_j";
    case Arg::sum: return "q_i + q_j";
    case Arg::doubled: return "2 q_i";
    case Arg::single: return "q_i";
    }
    return "";
}

bool block_family(Family f) { return f == Family::B || f == Family::C || f == Family::D; }

double kinetic(const CMSystem& sys) { return sys.family == Family::A ? -0.5 : -1.0; }

std::vector<PotentialTerm> potential(const CMSystem& sys) {
    const Couplings& c = sys.couplings;
    std::vector<PotentialTerm> out;
    const double pair = sys.family == Family::A ? 1.0 : 2.0;
    for (int i = 0; i < sys.n; ++i)
        for (int j = i + 1; j < sys.n; ++j) {
            out.push_back({pair * c.f(i, j) * c.f(j, i), Arg::difference, i, j});
            if (block_family(sys.family)) out.push_back({-2.0 * c.fB(i, j) * c.fC(j, i), Arg::sum, i, j});
        }
    if (sys.family == Family::C)
        for (int i = 0; i < sys.n; ++i) out.push_back({-c.fB(i, i) * c.fC(i, i), Arg::doubled, i, i});
    if (sys.family == Family::B)
        for (int i = 0; i < sys.n; ++i) out.push_back({2.0 * c.fa(i) * c.fb(i), Arg::single, i, i});
    return out;
}

// Never below the lattice pole guard, so every state that passes check_state can be evaluated.
double guard_radius(const CMSystem& sys) {
    return std::max(sys.collision_guard, sys.lattice.pole_guard()) * std::abs(sys.lattice.omega1());
}

double shortest_period(const Lattice& l) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b)
            if (a || b) best = std::min(best, std::abs(2.0 * (double(a) * l.omega1() + double(b) * l.omega2())));
    return best;
}

void require_size(const CMatrix& m, int r, int c, const char* what) {
    if (m.rows() != r || m.cols() != c) throw std::invalid_argument(std::string("coupling block ") + what + " has the wrong shape");
}

using Series = std::vector<CMatrix>;  // coefficients from some lowest power upwards

// Product of two series sharing the lowest power `lo`, result lowest power 2 lo, truncated at `top`.
Series multiply(const Series& a, int alo, const Series& b, int blo, int top) {
    const int lo = alo + blo;
    const int len = top - lo + 1;
    Series out;
    if (len <= 0) return out;
    const auto rows = a.front().rows();
    out.assign(static_cast<std::size_t>(len), CMatrix::Zero(rows, rows));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const int e = alo + static_cast<int>(i) + blo + static_cast<int>(j);
            if (e > top) break;
            out[static_cast<std::size_t>(e - lo)] += a[i] * b[j];
        }
    return out;
}

bool bottleneck_dfs(const std::vector<std::vector<double>>& cost, std::size_t row, std::vector<bool>& used,
                    double current, double& best) {
    if (row == cost.size()) {
        best = std::min(best, current);
        return true;
    }
    bool found = false;
    for (std::size_t c = 0; c < cost.size(); ++c) {
        if (used[c]) continue;
        const double next = std::max(current, cost[row][c]);
        if (next >= best) continue;
        used[c] = true;
        found |= bottleneck_dfs(cost, row + 1, used, next, best);
        used[c] = false;
    }
    return found;
}

}  // namespace

Couplings Couplings::standard(Family family, int n, cplx g) {
    if (n < 1) throw std::invalid_argument("need at least one particle");
    Couplings c;
    c.f = CMatrix::Constant(n, n, g);
    c.f.diagonal().setZero();
    if (block_family(family)) {
        c.fB = CMatrix::Zero(n, n);
        c.fC = CMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (j < i) c.fC(i, j) = -g;
                if (i < j) c.fB(i, j) = g;
            }
        if (family == Family::C)
            for (int i = 0; i < n; ++i) {
                c.fB(i, i) = g;
                c.fC(i, i) = -2.0 * g;
            }
    }
    if (family == Family::B) {
        c.fa = CVector::Constant(n, g);
        c.fb = CVector::Constant(n, g);
    }
    return c;
}

CMSystem CMSystem::make(Family family, int n, Lattice lattice, cplx g) {
    CMSystem s;
    s.family = family;
    s.n = n;
    s.lattice = lattice;
    s.couplings = Couplings::standard(family, n, g);
    s.validate();
    return s;
}

void CMSystem::validate() const {
    if (family == Family::G2) throw std::invalid_argument("no Calogero-Moser Lax matrix for G2");
    if (n < 1) throw std::invalid_argument("need at least one particle");
    require_size(couplings.f, n, n, "f");
    if (block_family(family)) {
        require_size(couplings.fB, n, n, "fB");
        require_size(couplings.fC, n, n, "fC");
    }
    if (family == Family::B && (couplings.fa.size() != n || couplings.fb.size() != n))
        throw std::invalid_argument("coupling columns fa, fb have the wrong length");
    if (!(collision_guard > 0)) throw std::invalid_argument("collision guard must be positive");
}

int CMSystem::matrix_size() const {
    switch (family) {
    case Family::A: return n;
    case Family::B: return 2 * n + 1;
    case Family::C:
    case Family::D: return 2 * n;
    default: throw std::invalid_argument("no Calogero-Moser Lax matrix for G2");
    }
}

CMState sample_state(const CMSystem& sys, std::mt19937_64& rng, double jitter, double pmax) {
    const double period = 2.0 * std::abs(sys.lattice.omega1());
    const cplx dir = sys.lattice.omega1() / std::abs(sys.lattice.omega1());
    std::uniform_real_distribution<double> u(-jitter, jitter), pu(-pmax, pmax);
    CMState s{CVector(sys.n), CVector(sys.n)};
    for (int i = 0; i < sys.n; ++i) {
        const double slot = sys.family == Family::A ? (i + 0.5) / sys.n : (2.0 * i + 1.0) / (4.0 * sys.n);
        s.q(i) = dir * period * (slot + u(rng));
        s.p(i) = pu(rng);
    }
    if (sys.family == Family::A) s.p.array() -= s.p.mean();
    check_state(sys, s);
    return s;
}

void check_state(const CMSystem& sys, const CMState& s) {
    if (s.q.size() != sys.n || s.p.size() != sys.n) throw std::invalid_argument("state size does not match n");
    const double guard = guard_radius(sys);
    for (const auto& t : potential(sys)) {
        if (t.coef == cplx(0)) continue;
        if (sys.lattice.lattice_distance(argument(t, s.q)) < guard)
            throw CollisionError(std::string("collision: ") + describe(t.kind) + " on the lattice for i = " +
                                 std::to_string(t.i + 1) + ", j = " + std::to_string(t.j + 1));
    }
}

std::vector<cplx> lax_poles(const CMSystem& sys, const CMState& s) {
    std::vector<cplx> out{0.0};
    for (int i = 0; i < sys.n; ++i) {
        out.push_back(s.q(i));
        if (block_family(sys.family)) out.push_back(-s.q(i));
    }
    if (sys.family == Family::B) out.push_back(sys.q0);
    return out;
}

CMatrix lax_matrix(const CMSystem& sys, const CMState& s, cplx z) {
    check_state(sys, s);
    const Lattice& L = sys.lattice;
    const double guard = guard_radius(sys);
    for (int i = 0; i < sys.n; ++i)
        if (L.lattice_distance(s.q(i)) < guard) throw CollisionError("a particle sits on a lattice point");
    if (sys.family == Family::B) {
        if (L.lattice_distance(sys.q0) < guard) throw CollisionError("q0 on the lattice");
        for (int i = 0; i < sys.n; ++i)
            if (L.lattice_distance(sys.q0 - s.q(i)) < guard || L.lattice_distance(sys.q0 + s.q(i)) < guard)
                throw CollisionError("q0 meets a particle or its mirror image");
    }
    for (cplx pole : lax_poles(sys, s))
        if (L.lattice_distance(z - pole) < L.pole_guard() * std::abs(L.omega1()))
            throw PoleProximityError("lax_matrix: z within the pole guard of a pole");

    const int n = sys.n;
    const Couplings& c = sys.couplings;
    auto S = [&](cplx x) { return L.sigma(x); };
    const cplx sz = S(z);
    CVector sq(n), szm(n), szp(n);
    for (int k = 0; k < n; ++k) {
        sq(k) = S(s.q(k));
        szm(k) = S(z - s.q(k));
        szp(k) = S(z + s.q(k));
    }
    CMatrix A = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                A(i, i) = s.p(i);
                continue;
            }
            A(i, j) = c.f(i, j) * S(z + s.q(j) - s.q(i)) * szm(j) * sq(i) /
                      (sz * szm(i) * S(s.q(i) - s.q(j)) * sq(j));
        }
    if (sys.family == Family::A) return A;

    const bool symmetric = sys.family == Family::C;
    CMatrix B = CMatrix::Zero(n, n), C = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            if (j == i && !symmetric) continue;
            const cplx qs = s.q(i) + s.q(j);
            const cplx b = c.fB(j, i) * S(z - qs) * szp(i) / (sz * szm(j) * S(qs));
            const cplx cc = c.fC(i, j) * S(z + qs) * szm(j) / (sz * szp(i) * S(qs));
            B(j, i) = b;
            C(i, j) = cc;
            if (i != j) {
                B(i, j) = symmetric ? b : -b;
                C(j, i) = symmetric ? cc : -cc;
            }
        }
    const int N = sys.matrix_size();
    CMatrix X = CMatrix::Zero(N, N);
    const int off = sys.family == Family::B ? n + 1 : n;
    X.block(0, 0, n, n) = A;
    X.block(0, off, n, n) = B;
    X.block(off, 0, n, n) = C;
    X.block(off, off, n, n) = -A.transpose();
    if (sys.family == Family::B) {
        const cplx szq = S(z - sys.q0);
        for (int i = 0; i < n; ++i) {
            const cplx a = c.fa(i) * S(z - sys.q0 - s.q(i)) * sz / (szq * szm(i) * sq(i));
            const cplx b = c.fb(i) * S(z - sys.q0 + s.q(i)) * szm(i) / (sz * szq * sq(i));
            X(i, n) = a;
            X(n, off + i) = -a;
            X(n, i) = -b;
            X(off + i, n) = b;
        }
    }
    return X;
}

double algebra_membership_residual(const CMSystem& sys, const CMatrix& x) {
    const int N = sys.matrix_size();
    if (x.rows() != N || x.cols() != N) throw std::invalid_argument("matrix size does not match the family");
    if (sys.family == Family::A) return 0.0;
    const int n = sys.n;
    const int off = sys.family == Family::B ? n + 1 : n;
    CMatrix form = CMatrix::Zero(N, N);
    for (int i = 0; i < n; ++i) {
        form(i, off + i) = 1.0;
        form(off + i, i) = sys.family == Family::C ? -1.0 : 1.0;
    }
    if (sys.family == Family::B) form(n, n) = 1.0;
    return (x.transpose() * form + form * x).cwiseAbs().maxCoeff();
}

cplx hamiltonian(const CMSystem& sys, const CMState& s) {
    check_state(sys, s);
    // Holomorphic in p, so no conjugation (squaredNorm would conjugate).
    cplx h = kinetic(sys) * (s.p.array() * s.p.array()).sum();
    for (const auto& t : potential(sys))
        if (t.coef != cplx(0)) h += t.coef * sys.lattice.wp(argument(t, s.q));
    return sys.sign() * h;
}

cplx residue_offset(const CMSystem& sys) {
    if (sys.family != Family::B) return 0.0;
    return sys.sign() * -2.0 * (sys.couplings.fa.array() * sys.couplings.fb.array()).sum() * sys.lattice.wp(sys.q0);
}

std::vector<CMatrix> lax_laurent(const CMSystem& sys, const CMState& s, cplx center, int kmin, int kmax,
                                 const ResidueOptions& opt) {
    if (opt.nodes < 8) throw std::invalid_argument("need at least 8 quadrature nodes");
    if (!(opt.radius_fraction > 0 && opt.radius_fraction < 1)) throw std::invalid_argument("radius fraction must lie in (0, 1)");
    if (kmax < kmin) throw std::invalid_argument("empty coefficient range");
    double nearest = shortest_period(sys.lattice);
    const double same = 1e-12;
    for (cplx pole : lax_poles(sys, s)) {
        const double d = sys.lattice.lattice_distance(pole - center);
        if (d > same) nearest = std::min(nearest, d);
    }
    const double r = opt.radius_fraction * nearest;
    if (r < 10.0 * sys.lattice.pole_guard() * std::abs(sys.lattice.omega1()))
        throw std::domain_error("contour radius collapsed: poles too close to the expansion point");

    const int N = opt.nodes;
    std::vector<CMatrix> out(static_cast<std::size_t>(kmax - kmin + 1),
                             CMatrix::Zero(sys.matrix_size(), sys.matrix_size()));
    for (int j = 0; j < N; ++j) {
        const cplx u = std::polar(r, 2.0 * pi * j / N);
        const CMatrix v = lax_matrix(sys, s, center + u);
        for (int k = kmin; k <= kmax; ++k) out[static_cast<std::size_t>(k - kmin)] += v * std::pow(u, -k);
    }
    for (auto& m : out) m /= static_cast<double>(N);
    return out;
}

cplx trace_residue(const CMSystem& sys, const CMState& s, int power, int m, cplx center, const ResidueOptions& opt) {
    if (power < 1) throw std::invalid_argument("power must be positive");
    // tr L^p = sum_{e >= -p} t_e z^e; res z^{-m} tr L^p = t_{m-1}.
    const int top = m - 1;
    if (top < -power) return 0.0;
    const int kmax = top + power - 1;
    const Series l = lax_laurent(sys, s, center, -1, kmax, opt);
    Series acc = l;
    int lo = -1;
    for (int i = 1; i < power; ++i) {
        // Each remaining factor can lower the degree by one.
        acc = multiply(acc, lo, l, -1, top + (power - 1 - i));
        lo -= 1;
    }
    return acc[static_cast<std::size_t>(top - lo)].trace();
}

cplx residue_hamiltonian(const CMSystem& sys, const CMState& s, int power, int m, const ResidueOptions& opt) {
    if (block_family(sys.family) && power % 2)
        throw std::invalid_argument("odd powers have vanishing traces for B, C and D");
    return -sys.sign() / static_cast<double>(power) * trace_residue(sys, s, power, m, 0.0, opt);
}

PhaseVelocity equations_of_motion(const CMSystem& sys, const CMState& s) {
    check_state(sys, s);
    PhaseVelocity v{2.0 * sys.sign() * kinetic(sys) * s.p, CVector::Zero(sys.n)};
    for (const auto& t : potential(sys)) {
        if (t.coef == cplx(0)) continue;
        const cplx g = sys.sign() * t.coef * sys.lattice.wp_prime(argument(t, s.q));
        switch (t.kind) {
        case Arg::difference:
            v.pdot(t.i) -= g;
            v.pdot(t.j) += g;
            break;
        case Arg::sum:
            v.pdot(t.i) -= g;
            v.pdot(t.j) -= g;
            break;
        case Arg::doubled: v.pdot(t.i) -= 2.0 * g; break;
        case Arg::single: v.pdot(t.i) -= g; break;
        }
    }
    return v;
}

Scheme parse_scheme(const std::string& name) {
    if (name == "rk4") return Scheme::rk4;
    if (name == "leapfrog") return Scheme::leapfrog;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected rk4 or leapfrog)");
}

Trajectory integrate(const CMSystem& sys, const CMState& s0, double T, double dt, Scheme scheme, int sample_every) {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    if (!(T >= 0)) throw std::invalid_argument("T must be non-negative");
    if (sample_every < 1) throw std::invalid_argument("sample_every must be positive");
    check_state(sys, s0);
    Trajectory tr;
    tr.t.push_back(0.0);
    tr.states.push_back(s0);
    const long steps = std::lround(T / dt);
    CMState s = s0;
    double t = 0;
    auto add = [](const CMState& a, const PhaseVelocity& v, double h) {
        return CMState{a.q + h * v.qdot, a.p + h * v.pdot};
    };
    for (long k = 1; k <= steps; ++k) {
        CMState next;
        try {
            if (scheme == Scheme::rk4) {
                const PhaseVelocity k1 = equations_of_motion(sys, s);
                const PhaseVelocity k2 = equations_of_motion(sys, add(s, k1, dt / 2));
                const PhaseVelocity k3 = equations_of_motion(sys, add(s, k2, dt / 2));
                const PhaseVelocity k4 = equations_of_motion(sys, add(s, k3, dt));
                next.q = s.q + dt / 6 * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
                next.p = s.p + dt / 6 * (k1.pdot + 2.0 * k2.pdot + 2.0 * k3.pdot + k4.pdot);
            } else {
                // Kick-drift-kick; H is separable with qdot linear in p.
                next = s;
                next.p += dt / 2 * equations_of_motion(sys, next).pdot;
                next.q += dt * equations_of_motion(sys, next).qdot;
                next.p += dt / 2 * equations_of_motion(sys, next).pdot;
            }
            if (!next.q.allFinite() || !next.p.allFinite()) throw std::domain_error("state is no longer finite");
            check_state(sys, next);
        } catch (const std::domain_error& e) {
            tr.aborted = true;
            tr.reason = "t = " + std::to_string(t) + ": " + e.what();
            if (tr.t.back() != t) {
                tr.t.push_back(t);
                tr.states.push_back(s);
            }
            return tr;
        }
        s = std::move(next);
        t = k * dt;
        if (k % sample_every == 0 || k == steps) {
            tr.t.push_back(t);
            tr.states.push_back(s);
        }
    }
    return tr;
}

SpectralInvariants spectral_invariants(const CMSystem& sys, const CMState& s, cplx z, int pmax) {
    if (pmax < 1) throw std::invalid_argument("pmax must be positive");
    const CMatrix l = lax_matrix(sys, s, z);
    const int N = static_cast<int>(l.rows());
    SpectralInvariants out;
    std::vector<cplx> tr;
    CMatrix pw = CMatrix::Identity(N, N);
    for (int p = 1; p <= std::max(pmax, N); ++p) {
        pw = pw * l;
        tr.push_back(pw.trace());
    }
    out.traces.assign(tr.begin(), tr.begin() + pmax);
    out.charpoly.assign(1, 1.0);
    for (int k = 1; k <= N; ++k) {
        cplx c = 0;
        for (int i = 1; i <= k; ++i) c += out.charpoly[static_cast<std::size_t>(k - i)] * tr[static_cast<std::size_t>(i - 1)];
        out.charpoly.push_back(-c / static_cast<double>(k));
    }
    Eigen::ComplexEigenSolver<CMatrix> es(l, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver did not converge");
    for (int i = 0; i < N; ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
    return out;
}

double eigenvalue_drift(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("eigenvalue lists differ in length");
    const std::size_t n = a.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(a[i] - b[j]) / std::max(1.0, std::abs(a[i]));
    if (n <= 8) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<bool> used(n, false);
        bottleneck_dfs(cost, 0, used, 0.0, best);
        return n ? best : 0.0;
    }
    std::vector<bool> used(n, false);
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!used[j] && (pick == n || cost[i][j] < cost[i][pick])) pick = j;
        used[pick] = true;
        worst = std::max(worst, cost[i][pick]);
    }
    return worst;
}

Gradient numeric_gradient(const PhaseFunction& h, const CMState& s, double step) {
    const auto n = s.q.size();
    Gradient g{CVector::Zero(n), CVector::Zero(n)};
    auto partial = [&](bool momentum, Eigen::Index i) {
        const cplx x = momentum ? s.p(i) : s.q(i);
        const double base = step * (1.0 + std::abs(x));
        auto central = [&](double hh) {
            CMState a = s, b = s;
            (momentum ? a.p : a.q)(i) += hh;
            (momentum ? b.p : b.q)(i) -= hh;
            return (h(a) - h(b)) / (2.0 * hh);
        };
        const cplx coarse = central(base), fine = central(base / 2);
        return (4.0 * fine - coarse) / 3.0;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        g.dq(i) = partial(false, i);
        g.dp(i) = partial(true, i);
    }
    return g;
}

cplx poisson_bracket(const PhaseFunction& a, const PhaseFunction& b, const CMState& s, bool same, double step) {
    if (same) return 0.0;
    const Gradient ga = numeric_gradient(a, s, step), gb = numeric_gradient(b, s, step);
    return (ga.dq.array() * gb.dp.array() - ga.dp.array() * gb.dq.array()).sum();
}

double TyurinResidueReport::max_singular_ratio() const {
    double m = 0;
    for (const auto& r : residues) m = std::max(m, r.singular_ratio);
    return m;
}

double TyurinResidueReport::max_square_ratio() const {
    double m = 0;
    for (const auto& r : residues) m = std::max(m, r.square_ratio);
    return m;
}

TyurinResidueReport tyurin_residue_check(const CMSystem& sys, const CMState& s, const ResidueOptions& opt) {
    if (sys.family != Family::A) throw std::invalid_argument("the Tyurin residue check is implemented for the A family");
    TyurinResidueReport rep;
    for (int i = 0; i < sys.n; ++i) {
        const CMatrix r = lax_laurent(sys, s, s.q(i), -1, -1, opt).front();
        TyurinResidue t;
        t.particle = i;
        t.norm = r.norm();
        // Quadrature noise on an exactly vanishing residue.
        if (t.norm > 1e-13) {
            Eigen::JacobiSVD<CMatrix> svd(r);
            const auto sv = svd.singularValues();
            t.singular_ratio = sv.size() > 1 ? sv(1) / sv(0) : 0.0;
            t.square_ratio = (r * r).norm() / (t.norm * t.norm);
        }
        rep.residues.push_back(t);
    }
    return rep;
}

}  // namespace laxkit
