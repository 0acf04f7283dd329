#include "laxkit/elliptic.hpp"

#include <cmath>
#include <numbers>

namespace laxkit {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_terms = 80;
constexpr double series_eps = 1e-18;
// Terms below this are dropped outright; sin/cos growth in the central cell is at most |q|^{-n}.
constexpr double tail_eps = 1e-34;

// Real coordinates (x, y) with z = x a + y b for R-independent a, b.
std::pair<double, double> real_coordinates(cplx z, cplx a, cplx b) {
    const double det = a.real() * b.imag() - a.imag() * b.real();
    const double x = (z.real() * b.imag() - z.imag() * b.real()) / det;
    const double y = (a.real() * z.imag() - a.imag() * z.real()) / det;
    return {x, y};
}

}  // namespace

Lattice::Lattice(cplx omega1, cplx omega2, double pole_guard)
    : omega1_(omega1), omega2_(omega2), guard_(pole_guard) {
    if (omega1 == cplx(0) || (omega2 / omega1).imag() <= 0)
        throw std::invalid_argument("half-periods need Im(omega2/omega1) > 0");
    if (!(pole_guard > 0)) throw std::invalid_argument("pole guard must be positive");

    w1_ = omega1;
    w2_ = omega2;
    for (int it = 0; it < 200; ++it) {
        cplx t = w2_ / w1_;
        const double shift = std::round(t.real());
        w2_ -= shift * w1_;
        t = w2_ / w1_;
        if (std::abs(t) < 1.0 - 1e-15) {
            const cplx old = w1_;
            w1_ = w2_;
            w2_ = -old;
            continue;
        }
        break;
    }
    const cplx tau = w2_ / w1_;
    q_ = std::exp(cplx(0, pi) * tau);

    for (int n = 1; n < max_terms; ++n) {
        const cplx q2n = std::pow(q_, 2.0 * n);
        if (std::abs(q2n) < tail_eps) break;
        lambert_.push_back(q2n / (1.0 - q2n));
    }
    // eta(w1) from theta derivatives at 0.
    cplx num = 0;
    theta_den_ = 0;
    for (int n = 0; n < max_terms; ++n) {
        const cplx qn = std::pow(q_, static_cast<double>(n * (n + 1)));
        if (std::abs(qn) < tail_eps) break;
        const double s = (n % 2) ? -1.0 : 1.0;
        const double k = 2.0 * n + 1.0;
        theta_terms_.push_back(s * qn);
        num += s * k * k * k * qn;
        theta_den_ += s * k * qn;
    }
    eta_w1_ = pi * pi / (12.0 * w1_) * num / theta_den_;
    eta_w2_ = (eta_w1_ * w2_ - cplx(0, pi / 2)) / w1_;

    // Express the user half-periods in the reduced basis: omega = a w1 + b w2 with integers a, b.
    auto eta_of = [&](cplx omega) {
        const auto [a, b] = real_coordinates(omega, w1_, w2_);
        return std::round(a) * eta_w1_ + std::round(b) * eta_w2_;
    };
    eta1_ = eta_of(omega1_);
    eta2_ = eta_of(omega2_);

    const cplx e1 = wp0(w1_), e2 = wp0(w2_), e3 = wp0(reduce(w1_ + w2_).z0);
    g2_ = 2.0 * (e1 * e1 + e2 * e2 + e3 * e3);
    g3_ = 4.0 * e1 * e2 * e3;
}

Lattice Lattice::from_tau(cplx tau, double pole_guard) { return Lattice(cplx(0.5, 0), tau / 2.0, pole_guard); }

Lattice::Reduced Lattice::reduce(cplx z) const {
    const auto [x, y] = real_coordinates(z, 2.0 * w1_, 2.0 * w2_);
    double m = std::round(x), n = std::round(y);
    cplx best = z - 2.0 * m * w1_ - 2.0 * n * w2_;
    double bm = m, bn = n;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const cplx c = z - 2.0 * (m + i) * w1_ - 2.0 * (n + j) * w2_;
            if (std::abs(c) < std::abs(best)) {
                best = c;
                bm = m + i;
                bn = n + j;
            }
        }
    return Reduced{best, bm, bn};
}

double Lattice::lattice_distance(cplx z) const { return std::abs(reduce(z).z0); }

void Lattice::require_off_lattice(cplx z, const char* what) const {
    if (lattice_distance(z) < guard_ * std::abs(omega1_))
        throw PoleProximityError(std::string(what) + ": argument within the pole guard of a lattice point");
}

cplx Lattice::zeta0(cplx z) const {
    const cplx c = pi / (2.0 * w1_);
    const cplx v = c * z;
    cplx s = std::cos(v) / std::sin(v);
    for (std::size_t i = 0; i < lambert_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const cplx term = 4.0 * lambert_[i] * std::sin(2.0 * n * v);
        s += term;
        if (std::abs(term) < series_eps * std::abs(s)) break;
    }
    return eta_w1_ * z / w1_ + c * s;
}

cplx Lattice::wp0(cplx z) const {
    const cplx c = pi / (2.0 * w1_);
    const cplx v = c * z;
    const cplx sn = std::sin(v);
    cplx s = 1.0 / (sn * sn);
    for (std::size_t i = 0; i < lambert_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const cplx term = -8.0 * n * lambert_[i] * std::cos(2.0 * n * v);
        s += term;
        if (std::abs(term) < series_eps * std::abs(s)) break;
    }
    return -eta_w1_ / w1_ + c * c * s;
}

cplx Lattice::wp_prime0(cplx z) const {
    const cplx c = pi / (2.0 * w1_);
    const cplx v = c * z;
    const cplx sn = std::sin(v);
    cplx s = 2.0 * std::cos(v) / (sn * sn * sn);
    for (std::size_t i = 0; i < lambert_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const cplx term = -16.0 * n * n * lambert_[i] * std::sin(2.0 * n * v);
        s += term;
        if (std::abs(term) < series_eps * std::abs(s)) break;
    }
    return -c * c * c * s;
}

cplx Lattice::sigma0(cplx z) const {
    const cplx v = pi / (2.0 * w1_) * z;
    cplx num = 0;
    for (std::size_t n = 0; n < theta_terms_.size(); ++n) num += theta_terms_[n] * std::sin((2.0 * n + 1.0) * v);
    return 2.0 * w1_ / pi * std::exp(eta_w1_ * z * z / (2.0 * w1_)) * num / theta_den_;
}

cplx Lattice::sigma(cplx z) const {
    const Reduced r = reduce(z);
    const cplx om = r.m * w1_ + r.n * w2_;
    const cplx h = r.m * eta_w1_ + r.n * eta_w2_;
    const long parity = static_cast<long>(r.m + r.n + r.m * r.n);
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    return sign * sigma0(r.z0) * std::exp(2.0 * h * (r.z0 + om));
}

cplx Lattice::zeta(cplx z) const {
    require_off_lattice(z, "zeta");
    const Reduced r = reduce(z);
    return zeta0(r.z0) + 2.0 * (r.m * eta_w1_ + r.n * eta_w2_);
}

cplx Lattice::wp(cplx z) const {
    require_off_lattice(z, "wp");
    return wp0(reduce(z).z0);
}

cplx Lattice::wp_prime(cplx z) const {
    require_off_lattice(z, "wp_prime");
    return wp_prime0(reduce(z).z0);
}

double Lattice::legendre_residual() const {
    return std::abs(eta1_ * omega2_ - eta2_ * omega1_ - cplx(0, pi / 2));
}

double Lattice::addition_identity_residual(cplx z, cplx u) const {
    require_off_lattice(z, "addition identity");
    require_off_lattice(u, "addition identity");
    require_off_lattice(z + u, "addition identity");
    require_off_lattice(z - u, "addition identity");
    const cplx sz = sigma(z), su = sigma(u);
    const cplx lhs = sigma(z + u) * sigma(z - u) / (sz * sz * su * su);
    return std::abs(lhs - wp(u) + wp(z));
}

}  // namespace laxkit
