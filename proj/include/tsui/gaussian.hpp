#pragma once

// Two-mode Gaussian states in quadrature representation.
//
// Conventions used throughout the library:
//   * quadratures x = a + a^dag, p = -i(a - a^dag), so the vacuum has unit variance;
//   * the phase-space vector is ordered (x_p, p_p, x_c, p_c): probe first, conjugate second;
//   * operations act in the Heisenberg picture, mean -> S mean, cov -> S cov S^T.

#include <complex>

#include <Eigen/Dense>

namespace tsui {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat2 = Eigen::Matrix2d;

enum class Mode { probe = 0, conjugate = 1 };

inline int block_offset(Mode m) { return m == Mode::probe ? 0 : 2; }

/// Tolerances for GaussianState::from_moments.
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalityTolerance = 1e-9;

class GaussianState {
public:
    /// Checked construction: rejects asymmetric or unphysical covariance matrices.
    static GaussianState from_moments(const Vec4& mean, const Mat4& cov);

    const Vec4& mean() const { return mean_; }
    const Mat4& cov() const { return cov_; }

    /// Smallest eigenvalue of cov + i*Omega. Non-negative for physical states.
    double min_uncertainty_eigenvalue() const;
    bool is_physical(double tol = kPhysicalityTolerance) const {
        return min_uncertainty_eigenvalue() >= -tol;
    }

    /// 2x2 blocks of the mean/covariance.
    Eigen::Vector2d mode_mean(Mode m) const { return mean_.segment<2>(block_offset(m)); }
    Mat2 mode_cov(Mode m) const { return cov_.block<2, 2>(block_offset(m), block_offset(m)); }
    Mat2 cross_cov() const { return cov_.block<2, 2>(0, 2); }

private:
    GaussianState(const Vec4& mean, const Mat4& cov) : mean_(mean), cov_(cov) {}

    friend GaussianState vacuum_state();
    friend GaussianState coherent_seed_state(std::complex<double>);
    friend GaussianState transform(const GaussianState&, const Mat4&);
    friend GaussianState apply_loss(const GaussianState&, Mode, double);

    Vec4 mean_;
    Mat4 cov_;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Symplectic form for the (x_p, p_p, x_c, p_c) ordering.
Mat4 symplectic_form();

/// Quadrature matrix of a -> a cosh r + b^dag sinh r, b -> b cosh r + a^dag sinh r.
Mat4 two_mode_squeeze_matrix(double r);

/// Quadrature matrix of a -> a e^{i phi} on the selected mode.
Mat4 phase_shift_matrix(Mode mode, double phi);

/// r = arccosh(sqrt(G)); throws ValidationError for G < 1.
double squeeze_from_gain(double gain);
double gain_from_squeeze(double r);

GaussianState vacuum_state();
GaussianState coherent_seed_state(std::complex<double> alpha);

/// Applies a linear symplectic map to mean and covariance. No physicality check.
GaussianState transform(const GaussianState& state, const Mat4& s);

GaussianState apply_two_mode_squeeze(const GaussianState& state, double r);
GaussianState apply_phase_shift(const GaussianState& state, Mode mode, double phi);

/// Beam splitter of transmission eta mixing the mode with vacuum.
GaussianState apply_loss(const GaussianState& state, Mode mode, double eta);

/// Weight vector of A_p j_p(phi_p) + A_c j_c(phi_c), j(phi) = e^{-i phi} a + e^{i phi} a^dag.
Vec4 homodyne_weights(double phi_p, double phi_c, double gain_p = 1.0, double gain_c = 1.0);

/// Mean and variance of u . (x_p, p_p, x_c, p_c).
Moments quadrature_stats(const GaussianState& state, const Vec4& u);

/// Photon-number mean and variance of one mode (Isserlis reduction of the fourth moments).
Moments number_stats(const GaussianState& state, Mode mode);

/// Covariance between the photon numbers of the two modes.
double number_cross_covariance(const GaussianState& state);

/// Mean and variance of w_p n_p + w_c n_c.
Moments weighted_number_stats(const GaussianState& state, double w_p, double w_c);

}  // namespace tsui
