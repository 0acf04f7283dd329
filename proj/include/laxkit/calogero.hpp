#pragma once

#include "laxkit/elliptic.hpp"
#include "laxkit/liealg.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace laxkit {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Two particles (or a particle and its mirror image) closer than the guard, modulo the lattice.
struct CollisionError : std::domain_error {
    using std::domain_error::domain_error;
};

// Couplings of the Lax matrices. `f` is used off the diagonal of the A block; `fB(j, i)` for j < i and
// `fC(i, j)` for i > j (plus the diagonal for the C family) multiply the B and C blocks; `fa`, `fb` the
// extra columns of the B family.
struct Couplings {
    CMatrix f;
    CMatrix fB, fC;
    CVector fa, fb;

    // f_ij = g, f^B = g, f^C = -g off the diagonal, f^B_ii = g, f^C_ii = -2g, f^a = f^b = g.
    // Products: f_ij f_ji = g^2, f^B f^C = -g^2, f^B_ii f^C_ii = -2 g^2, f^a f^b = g^2.
    static Couplings standard(Family family, int n, cplx g = 1.0);
};

struct CMSystem {
    Family family = Family::A;
    int n = 2;
    Lattice lattice;
    Couplings couplings;
    cplx q0{0.25, 0.35};         // B family only
    bool physical_sign = false;  // negate H so the kinetic term is positive
    double collision_guard = 1e-6;  // in units of |omega1|; the lattice pole guard applies if larger

    // Rejects G2, n < 1 and couplings of the wrong shape.
    static CMSystem make(Family family, int n, Lattice lattice = Lattice(), cplx g = 1.0);
    void validate() const;
    // n, 2n or 2n + 1.
    int matrix_size() const;
    double sign() const { return physical_sign ? -1.0 : 1.0; }
};

struct CMState {
    CVector q, p;
};

// Generic real data: positions spread evenly over the real period (for B, C, D together with their mirror
// images), jittered by `jitter` times the period; momenta uniform in [-pmax, pmax]. A-family momenta are
// shifted to zero total momentum so the particles stay inside the period.
CMState sample_state(const CMSystem& sys, std::mt19937_64& rng, double jitter = 0.02, double pmax = 0.5);

// Throws CollisionError when the state meets a singular locus of the family.
void check_state(const CMSystem& sys, const CMState& s);

// Poles of L(z) in the fundamental cell: 0, q_i and, by family, -q_i and q_0.
std::vector<cplx> lax_poles(const CMSystem& sys, const CMState& s);

// Raw Lax matrix; throws PoleProximityError within the lattice guard of a pole.
CMatrix lax_matrix(const CMSystem& sys, const CMState& s, cplx z);

// Block form B/D: X^t S + S X with S the split form; C: X^t J + J X with J = [[0, I], [-I, 0]].
double algebra_membership_residual(const CMSystem& sys, const CMatrix& x);

// Closed-form second-order Hamiltonian with the configured coupling products (sign() applied).
cplx hamiltonian(const CMSystem& sys, const CMState& s);
// Constant dropped by the closed form relative to the residue route: -2 sum_i f^a_i f^b_i wp(q_0) for B,
// 0 otherwise (sign() applied).
cplx residue_offset(const CMSystem& sys);

struct ResidueOptions {
    int nodes = 64;
    double radius_fraction = 1.0 / 3.0;
};

// Laurent coefficients C_k, k in [kmin, kmax], of L(z) around `center` by trapezoidal quadrature on a
// circle of radius radius_fraction times the distance to the nearest other pole.
std::vector<CMatrix> lax_laurent(const CMSystem& sys, const CMState& s, cplx center, int kmin, int kmax,
                                 const ResidueOptions& opt = {});

// res_{z=center} z^{-m} tr L(z)^p dz, assembled from the fitted Laurent coefficients of L.
cplx trace_residue(const CMSystem& sys, const CMState& s, int power, int m, cplx center = 0.0,
                   const ResidueOptions& opt = {});

// H_{p,m} = -(1/p) res_{z=0} z^{-m} tr L(z)^p dz (sign() applied). p = 2, m = 1 equals
// hamiltonian() + residue_offset(). Odd p is rejected for B, C and D.
cplx residue_hamiltonian(const CMSystem& sys, const CMState& s, int power, int m, const ResidueOptions& opt = {});

struct PhaseVelocity {
    CVector qdot, pdot;
};

// Hamilton's equations for hamiltonian(), with gradients from wp'.
PhaseVelocity equations_of_motion(const CMSystem& sys, const CMState& s);

enum class Scheme { rk4, leapfrog };
Scheme parse_scheme(const std::string& name);

struct Trajectory {
    std::vector<double> t;
    std::vector<CMState> states;
    bool aborted = false;
    std::string reason;
};

// Fixed-step integration from 0 to T, keeping every `sample_every`-th state plus the last one. A collision
// or pole stops the run; the trajectory then ends at the last good state.
Trajectory integrate(const CMSystem& sys, const CMState& s0, double T, double dt, Scheme scheme,
                     int sample_every = 1);

struct SpectralInvariants {
    std::vector<cplx> traces;    // tr L^p, p = 1..pmax
    std::vector<cplx> charpoly;  // det(k - L) = sum_i c_i k^{N-i}, c_0 = 1
    std::vector<cplx> eigenvalues;
};

SpectralInvariants spectral_invariants(const CMSystem& sys, const CMState& s, cplx z, int pmax);

// max_i |a_i - b_pi(i)| / max(1, |a_i|) minimized over matchings pi (exact for up to 8 values, greedy above).
double eigenvalue_drift(const std::vector<cplx>& a, const std::vector<cplx>& b);

using PhaseFunction = std::function<cplx(const CMState&)>;

struct Gradient {
    CVector dq, dp;
};

// Fourth-order central differences (Richardson on steps h and h/2), h = step (1 + |x|).
Gradient numeric_gradient(const PhaseFunction& h, const CMState& s, double step = 1e-3);

// sum_i dHa/dq_i dHb/dp_i - dHa/dp_i dHb/dq_i. `same` short-circuits to exactly 0.
cplx poisson_bracket(const PhaseFunction& a, const PhaseFunction& b, const CMState& s, bool same = false,
                     double step = 1e-3);

struct TyurinResidue {
    int particle = 0;
    double singular_ratio = 0;  // sigma_2 / sigma_1
    double square_ratio = 0;    // |R^2| / |R|^2
    double norm = 0;            // |R|
};

struct TyurinResidueReport {
    std::vector<TyurinResidue> residues;
    double max_singular_ratio() const;
    double max_square_ratio() const;
    bool passed(double tol) const { return max_singular_ratio() < tol && max_square_ratio() < tol; }
};

// Residues of L(z) at z = q_i for the A family. A vanishing residue counts as rank 0.
TyurinResidueReport tyurin_residue_check(const CMSystem& sys, const CMState& s, const ResidueOptions& opt = {});

}  // namespace laxkit
