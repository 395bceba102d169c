#include "tsui/gaussian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "tsui/errors.hpp"

namespace tsui {

Mat4 symplectic_form() {
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    return omega;
}

GaussianState GaussianState::from_moments(const Vec4& mean, const Mat4& cov) {
    if (!mean.allFinite() || !cov.allFinite()) {
        throw ValidationError("Gaussian moments contain non-finite entries");
    }
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
        throw ValidationError("covariance matrix is not symmetric (max |C - C^T| = " +
                              std::to_string(asym) + ")");
    }
    GaussianState state(mean, 0.5 * (cov + cov.transpose()));
    const double lam = state.min_uncertainty_eigenvalue();
    if (lam < -kPhysicalityTolerance) {
        throw ValidationError("covariance violates the uncertainty principle (min eigenvalue of "
                              "cov + i*Omega = " + std::to_string(lam) + ")");
    }
    return state;
}

double GaussianState::min_uncertainty_eigenvalue() const {
    using Mat4c = Eigen::Matrix4cd;
    const Mat4c h = cov_.cast<std::complex<double>>() +
                    std::complex<double>(0.0, 1.0) * symplectic_form().cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Mat4c> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Mat4 two_mode_squeeze_matrix(double r) {
    const double c = std::cosh(r);
    const double s = std::sinh(r);
    Mat4 m;
    // clang-format off
    m << c,  0,  s,  0,
         0,  c,  0, -s,
         s,  0,  c,  0,
         0, -s,  0,  c;
    // clang-format on
    return m;
}

Mat4 phase_shift_matrix(Mode mode, double phi) {
    Mat4 m = Mat4::Identity();
    const int k = block_offset(mode);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    m(k, k) = c;
    m(k, k + 1) = -s;
    m(k + 1, k) = s;
    m(k + 1, k + 1) = c;
    return m;
}

double squeeze_from_gain(double gain) {
    if (!(gain >= 1.0) || !std::isfinite(gain)) {
        throw ValidationError("gain must be >= 1, got " + std::to_string(gain));
    }
    return std::acosh(std::sqrt(gain));
}

double gain_from_squeeze(double r) {
    const double c = std::cosh(r);
    return c * c;
}

GaussianState vacuum_state() { return GaussianState(Vec4::Zero(), Mat4::Identity()); }

GaussianState coherent_seed_state(std::complex<double> alpha) {
    Vec4 mean = Vec4::Zero();
    mean(0) = 2.0 * alpha.real();
    mean(1) = 2.0 * alpha.imag();
    return GaussianState(mean, Mat4::Identity());
}

GaussianState transform(const GaussianState& state, const Mat4& s) {
    return GaussianState(s * state.mean_, s * state.cov_ * s.transpose());
}

GaussianState apply_two_mode_squeeze(const GaussianState& state, double r) {
    return transform(state, two_mode_squeeze_matrix(r));
}

GaussianState apply_phase_shift(const GaussianState& state, Mode mode, double phi) {
    return transform(state, phase_shift_matrix(mode, phi));
}

GaussianState apply_loss(const GaussianState& state, Mode mode, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw ValidationError("transmission must lie in [0, 1], got " + std::to_string(eta));
    }
    const int k = block_offset(mode);
    const double t = std::sqrt(eta);
    Vec4 scale = Vec4::Ones();
    scale(k) = t;
    scale(k + 1) = t;

    Vec4 mean = state.mean_.cwiseProduct(scale);
    Mat4 cov = scale.asDiagonal() * state.cov_ * scale.asDiagonal();
    cov(k, k) += 1.0 - eta;
    cov(k + 1, k + 1) += 1.0 - eta;
    return GaussianState(mean, cov);
}

Vec4 homodyne_weights(double phi_p, double phi_c, double gain_p, double gain_c) {
    return Vec4(gain_p * std::cos(phi_p), gain_p * std::sin(phi_p), gain_c * std::cos(phi_c),
                gain_c * std::sin(phi_c));
}

Moments quadrature_stats(const GaussianState& state, const Vec4& u) {
    return {u.dot(state.mean()), u.dot(state.cov() * u)};
}

// n = (x^2 + p^2 - 2) / 4. For a Gaussian mode with mean d and covariance V
//   <n>    = (tr V + |d|^2 - 2) / 4
//   Var(n) = (tr V^2 - 2) / 8 + d^T V d / 4
// and across modes Cov(n_p, n_c) = tr(C C^T) / 8 + d_p^T C d_c / 4 with C the cross block.
Moments number_stats(const GaussianState& state, Mode mode) {
    const Mat2 v = state.mode_cov(mode);
    const Eigen::Vector2d d = state.mode_mean(mode);
    const double mean = (v.trace() + d.squaredNorm() - 2.0) / 4.0;
    const double var = ((v * v).trace() - 2.0) / 8.0 + d.dot(v * d) / 4.0;
    return {mean, var};
}

double number_cross_covariance(const GaussianState& state) {
    const Mat2 c = state.cross_cov();
    const Eigen::Vector2d dp = state.mode_mean(Mode::probe);
    const Eigen::Vector2d dc = state.mode_mean(Mode::conjugate);
    return (c * c.transpose()).trace() / 8.0 + dp.dot(c * dc) / 4.0;
}

Moments weighted_number_stats(const GaussianState& state, double w_p, double w_c) {
    const Moments np = number_stats(state, Mode::probe);
    const Moments nc = number_stats(state, Mode::conjugate);
    const double cross = number_cross_covariance(state);
    return {w_p * np.mean + w_c * nc.mean,
            w_p * w_p * np.variance + w_c * w_c * nc.variance + 2.0 * w_p * w_c * cross};
}

}  // namespace tsui
