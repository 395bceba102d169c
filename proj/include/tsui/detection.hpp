#pragma once

// Signal chain of the full and truncated SU(1,1) interferometers and the phase
// variance of the five detection arrangements:
//
//   seed -> squeeze(r) -> phase(phi, probe) -> internal loss (eta_p1, eta_c1)
//        -> squeeze(s) -> external loss (eta_p2, eta_c2) -> detectors
//
// The truncated interferometer is the s = 0 special case.

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsui/gaussian.hpp"
#include "tsui/parallel.hpp"

namespace tsui {

/// Central finite-difference step used for every phase derivative.
inline constexpr double kPhaseStep = 1e-5;

struct InterferometerConfig {
    double r = 0.0;    // first squeezer
    double s = 0.0;    // second squeezer; 0 for the truncated device, -r for the full one
    double phi = 0.0;  // probe-arm phase (operating point)
    double eta_p1 = 1.0;
    double eta_c1 = 1.0;
    double eta_p2 = 1.0;
    double eta_c2 = 1.0;
    double phi_p = std::numbers::pi / 2;  // LO phases
    double phi_c = std::numbers::pi / 2;
    double gain_p = 1.0;  // detector weights A_p, A_c
    double gain_c = 1.0;
    double alpha2 = 1e6;  // seed photon number |alpha|^2

    /// Throws ValidationError on out-of-range transmissions, gains or seed.
    void validate() const;

    /// Identical internal loss on both arms, no external loss.
    static InterferometerConfig equal_loss(double r, double eta, double alpha2, double s = 0.0);
};

enum class DetectionScheme {
    full_dual_homodyne,       // (i)
    full_conj_homodyne,       // (ii)
    full_conj_intensity,      // (iii)
    full_dual_intensity,      // (iv)
    truncated_dual_homodyne,  // (v)
};

inline constexpr std::array<DetectionScheme, 5> kAllSchemes = {
    DetectionScheme::full_dual_homodyne, DetectionScheme::full_conj_homodyne,
    DetectionScheme::full_conj_intensity, DetectionScheme::full_dual_intensity,
    DetectionScheme::truncated_dual_homodyne};

/// Roman-numeral tag, "i" ... "v".
std::string_view scheme_label(DetectionScheme scheme);
/// Accepts the roman tag or the enumerator name. Throws ValidationError.
DetectionScheme parse_scheme(std::string_view text);
bool is_homodyne(DetectionScheme scheme);
bool is_truncated(DetectionScheme scheme);

/// Sets s and the detector weights the scheme dictates; everything else is kept.
InterferometerConfig configure(InterferometerConfig config, DetectionScheme scheme);

struct SensitivityReport {
    double phase_variance = 0.0;  // rad^2
    double signal_slope = 0.0;    // d<X>/dphi
    double noise_variance = 0.0;  // Var(X)
    double signal_mean = 0.0;     // <X>
    double phi = 0.0;
    double phi_p = 0.0;
    double phi_c = 0.0;
};

GaussianState build_output_state(const InterferometerConfig& config);

/// Joint quadrature J = A_p j_p(phi_p) + A_c j_c(phi_c). Throws SlopeZero at insensitive points.
SensitivityReport phase_variance_homodyne(const InterferometerConfig& config);

/// Photon-number sum N = A_p n_p + A_c n_c with A in {0, 1}. Throws SlopeZero.
SensitivityReport phase_variance_direct(const InterferometerConfig& config);

/// configure() followed by the scheme's estimator.
SensitivityReport phase_variance(const InterferometerConfig& config, DetectionScheme scheme);

namespace closed_form {
/// Truncated (or full, s = -r) device, equal internal loss, phi_c = pi/2.
double truncated(double eta, double r, double phi_p, double alpha2);
/// Same device with both LO phases free.
double general(double eta, double r, double phi_p, double phi_c, double alpha2);
/// Conjugate-only detection (homodyne or intensity) of the lossless full device.
double conjugate_only(double r, double alpha2);
/// Intensity detection of both outputs of the lossless full device.
double dual_intensity(double r, double alpha2);
/// Full device, dual homodyne, no external loss.
double internal_loss(double r, double eta_int, double alpha2);
/// Full device, dual homodyne, no internal loss.
double external_loss(double r, double eta_ext, double alpha2);
}  // namespace closed_form

enum class ClosedForm { truncated, general, conjugate_only, dual_intensity, internal_loss, external_loss };

struct ClosedFormParams {
    double r = 0.0;
    double eta = 1.0;
    double phi_p = std::numbers::pi / 2;
    double phi_c = std::numbers::pi / 2;
    double alpha2 = 1.0;
};

double closed_form_sensitivity(ClosedForm formula, const ClosedFormParams& params);

struct ScanOptions {
    int grid = 360;            // points per scanned angle
    double tolerance = 1e-10;  // golden-section bracket width, rad
    Exec exec = Exec::parallel;
};

struct OperatingPoint {
    double phi_p = 0.0;
    double phi_c = 0.0;
    double phi = 0.0;
    SensitivityReport report;
};

/// Minimizes the phase variance over (phi_p, phi_c) for homodyne schemes and over the
/// probe phase phi for intensity schemes: grid scan, then golden-section refinement.
/// Among equivalent minima the one with a positive signal slope is returned.
OperatingPoint optimal_operating_point(const InterferometerConfig& config, DetectionScheme scheme,
                                       const ScanOptions& options = {});

struct Figure2Cell {
    DetectionScheme scheme{};
    std::optional<double> closed;   // |alpha|^2 * variance, closed form
    std::optional<double> numeric;  // |alpha|^2 * variance, Gaussian model at its optimum
};

struct Figure2Row {
    double gain = 1.0;
    std::vector<Figure2Cell> cells;
};

/// Lossless |alpha|^2 * variance vs gain for the requested schemes. Cells are empty where
/// the scheme has no phase sensitivity (e.g. intensity detection at G = 1).
std::vector<Figure2Row> figure2_table(std::span<const double> gains,
                                      std::span<const DetectionScheme> schemes,
                                      double alpha2 = 1e6, Exec exec = Exec::parallel);

}  // namespace tsui
