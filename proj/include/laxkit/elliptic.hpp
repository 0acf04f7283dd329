#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace laxkit {

using cplx = std::complex<double>;

// Raised by zeta, wp and wp_prime within the pole guard radius of a lattice point.
struct PoleProximityError : std::domain_error {
    using std::domain_error::domain_error;
};

// Weierstrass functions for the lattice 2 omega1 Z + 2 omega2 Z. Evaluation uses theta q-series in a
// basis reduced to the fundamental domain, plus quasi-periodicity to move z into the central cell.
class Lattice {
public:
    explicit Lattice(cplx omega1 = cplx(0.5, 0.0), cplx omega2 = cplx(0.0, 0.5), double pole_guard = 1e-3);
    // omega1 = 1/2, omega2 = tau/2.
    static Lattice from_tau(cplx tau, double pole_guard = 1e-3);

    cplx omega1() const { return omega1_; }
    cplx omega2() const { return omega2_; }
    cplx tau() const { return omega2_ / omega1_; }
    // Nome exp(i pi tau') of the reduced basis actually used for evaluation.
    cplx nome() const { return q_; }
    cplx eta1() const { return eta1_; }
    cplx eta2() const { return eta2_; }
    cplx g2() const { return g2_; }
    cplx g3() const { return g3_; }
    double pole_guard() const { return guard_; }

    cplx sigma(cplx z) const;
    cplx zeta(cplx z) const;
    cplx wp(cplx z) const;
    cplx wp_prime(cplx z) const;

    // Distance from z to the nearest lattice point.
    double lattice_distance(cplx z) const;
    // |eta1 omega2 - eta2 omega1 - i pi / 2|
    double legendre_residual() const;
    // |sigma(z+u) sigma(z-u) / (sigma(z)^2 sigma(u)^2) - wp(u) + wp(z)|. Rejects z, u, z+u or z-u
    // near the lattice.
    double addition_identity_residual(cplx z, cplx u) const;

private:
    struct Reduced {
        cplx z0;   // representative in the central cell
        double m;  // z = z0 + 2 m w1 + 2 n w2
        double n;
    };
    Reduced reduce(cplx z) const;
    void require_off_lattice(cplx z, const char* what) const;
    // Series pieces in the reduced basis at a small argument.
    cplx zeta0(cplx z) const;
    cplx wp0(cplx z) const;
    cplx wp_prime0(cplx z) const;
    cplx sigma0(cplx z) const;

    cplx omega1_, omega2_;
    double guard_;
    cplx w1_, w2_;      // reduced half-periods, Im(w2/w1) > 0, |w2/w1| >= 1, |Re(w2/w1)| <= 1/2
    cplx q_;
    cplx eta_w1_, eta_w2_;
    cplx eta1_, eta2_;
    cplx g2_, g3_;
    std::vector<cplx> lambert_;      // q^{2n} / (1 - q^{2n}), n >= 1
    std::vector<cplx> theta_terms_;  // (-1)^n q^{n(n+1)}, n >= 0
    cplx theta_den_;                 // sum (-1)^n (2n+1) q^{n(n+1)}
};

}  // namespace laxkit
