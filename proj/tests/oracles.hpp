#pragma once

// Reference values computed without the library: the closed forms typed in
// directly, and a Heisenberg-picture model that expands the output mode operators as
// linear combinations of the six input modes (seed a0, b0 and the vacua c0 d0 e0 f0 of
// the four loss beam splitters).

#include <array>
#include <cmath>
#include <complex>

namespace oracle {

using cd = std::complex<double>;

inline double sech(double x) { return 1.0 / std::cosh(x); }
inline double csch(double x) { return 1.0 / std::sinh(x); }
inline double r_from_gain(double g) { return std::acosh(std::sqrt(g)); }

// |alpha|^2 * variance.
inline double truncated(double eta, double r, double phi_p) {
    const double s = std::sin(phi_p);
    return (2 * eta + (1 - 2 * eta) * std::pow(sech(r), 2) - 2 * eta * s * std::tanh(r)) / (2 * eta * s * s);
}
inline double general(double eta, double r, double phi_p, double phi_c) {
    const double s = std::sin(phi_p);
    return (2 * eta + (1 - 2 * eta) * std::pow(sech(r), 2) + 2 * eta * std::cos(phi_p + phi_c) * std::tanh(r)) /
           (2 * eta * s * s);
}
inline double conj_homodyne(double r) { return std::pow(csch(2 * r), 2); }
inline double dual_intensity(double r) {
    return std::pow(csch(2 * r), 4) * (2 * std::cosh(4 * r) + std::sqrt(std::cosh(8 * r)) - 1) / 2;
}
inline double internal_loss(double r, double eta_int) {
    const double t = std::tanh(r);
    return std::exp(-r) * sech(r) * (1 + t - 2 * eta_int * t) / (2 * eta_int);
}
inline double external_loss(double r, double eta_ext) {
    const double b = 1 + std::cosh(2 * r) + std::sinh(2 * r);
    return 2 / (eta_ext * b * b);
}
inline double qfi(double r, double alpha2) {
    return 2 * std::pow(std::cosh(r), 2) * ((1 + 2 * alpha2) * std::cosh(2 * r) - 1);
}

/// Operator sum_k (u_k m_k + v_k m_k^dag) over the six input modes.
struct LinOp {
    std::array<cd, 6> u{};
    std::array<cd, 6> v{};

    LinOp operator+(const LinOp& o) const {
        LinOp s;
        for (int k = 0; k < 6; ++k) {
            s.u[k] = u[k] + o.u[k];
            s.v[k] = v[k] + o.v[k];
        }
        return s;
    }
    LinOp operator*(cd c) const {
        LinOp s;
        for (int k = 0; k < 6; ++k) {
            s.u[k] = c * u[k];
            s.v[k] = c * v[k];
        }
        return s;
    }
    LinOp dag() const {
        LinOp s;
        for (int k = 0; k < 6; ++k) {
            s.u[k] = std::conj(v[k]);
            s.v[k] = std::conj(u[k]);
        }
        return s;
    }
};

inline LinOp mode(int k) {
    LinOp m;
    m.u[k] = 1.0;
    return m;
}

struct Interferometer {
    double r = 0, s = 0, phi = 0;
    double eta_p1 = 1, eta_c1 = 1, eta_p2 = 1, eta_c2 = 1;
    double phi_p = M_PI / 2, phi_c = M_PI / 2, A_p = 1, A_c = 1;
    double alpha2 = 1e6;
};

/// Output operators a_f, b_f written out term by term.
inline std::array<LinOp, 2> outputs(const Interferometer& c) {
    const LinOp a0 = mode(0), b0 = mode(1), c0 = mode(2), d0 = mode(3), e0 = mode(4), f0 = mode(5);
    const cd i(0, 1);
    const cd ephi = std::polar(1.0, c.phi);
    const double ch = std::cosh(c.r), sh = std::sinh(c.r), cs = std::cosh(c.s), ss = std::sinh(c.s);

    const LinOp a_int = c0 * (i * std::sqrt(1 - c.eta_p1)) + (a0 * (ephi * ch) + b0.dag() * (ephi * sh)) * std::sqrt(c.eta_p1);
    const LinOp b_int = d0 * (i * std::sqrt(1 - c.eta_c1)) + (b0 * ch + a0.dag() * sh) * std::sqrt(c.eta_c1);

    const LinOp af = e0 * (i * std::sqrt(1 - c.eta_p2)) + (a_int * cs + b_int.dag() * ss) * std::sqrt(c.eta_p2);
    const LinOp bf = f0 * (i * std::sqrt(1 - c.eta_c2)) + (b_int * cs + a_int.dag() * ss) * std::sqrt(c.eta_c2);
    return {af, bf};
}

struct Stats {
    double mean;
    double variance;
};

/// Joint quadrature J = A_p j_p + A_c j_c for a coherent seed sqrt(alpha2) and vacua.
/// J = sum_k (w_k m_k + h.c.), so <J> = 2 Re(w_0 alpha) and Var J = sum_k |w_k|^2.
inline Stats joint_quadrature(const Interferometer& c) {
    const auto [af, bf] = outputs(c);
    const LinOp jp = (af * std::polar(1.0, -c.phi_p) + af.dag() * std::polar(1.0, c.phi_p)) * c.A_p;
    const LinOp jc = (bf * std::polar(1.0, -c.phi_c) + bf.dag() * std::polar(1.0, c.phi_c)) * c.A_c;
    const LinOp j = jp + jc;
    double var = 0;
    for (int k = 0; k < 6; ++k) var += std::norm(j.u[k]);
    return {2 * (j.u[0] * std::sqrt(c.alpha2)).real(), var};
}

inline double homodyne_phase_variance(Interferometer c, double h = 1e-5) {
    const Stats at = joint_quadrature(c);
    c.phi += h;
    const double hi = joint_quadrature(c).mean;
    c.phi -= 2 * h;
    const double lo = joint_quadrature(c).mean;
    const double slope = (hi - lo) / (2 * h);
    return at.variance / (slope * slope);
}

/// Photon numbers of a_f: with a_f = sum u_k m_k + v_k m_k^dag and coherent/vacuum inputs,
/// <n> = |beta|^2 + sum |v_k|^2 where beta = <a_f>.
inline double mean_photons(const LinOp& op, double alpha2) {
    const cd beta = op.u[0] * std::sqrt(alpha2) + op.v[0] * std::sqrt(alpha2);
    double spont = 0;
    for (int k = 0; k < 6; ++k) spont += std::norm(op.v[k]);
    return std::norm(beta) + spont;
}

}  // namespace oracle
