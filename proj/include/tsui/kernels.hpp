#pragma once

// Data-parallel inner loops of the sweep commands. Each kernel has an OpenMP
// implementation (tsui::kernels::omp) and a plain serial reference
// (tsui::kernels::serial) with identical signatures; the tests hold them together
// and bench/ compares their throughput.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsui/gaussian.hpp"
#include "tsui/parallel.hpp"

namespace tsui {
struct InterferometerConfig;
}

namespace tsui::kernels {

/// Everything a dual-homodyne phase-variance landscape needs: output covariance and
/// the phase derivative of the output mean, both independent of the LO phases.
struct HomodyneInputs {
    Mat4 cov;
    Vec4 mean;   // output mean at the operating phase
    Vec4 dmean;  // d(mean)/d(phi)
    double gain_p = 1.0;
    double gain_c = 1.0;
};

/// Grid value of Var(J) / slope^2. Points where the slope is below the insensitivity
/// floor hold +infinity.
using Landscape = Eigen::MatrixXd;

/// Joint-quadrature moments along a sequence of probe phases.
struct SampleMoments {
    std::vector<double> mean;
    std::vector<double> variance;
};

namespace serial {
Landscape homodyne_landscape(const HomodyneInputs& in, std::span<const double> phi_p,
                             std::span<const double> phi_c);
/// SNRI (dB) from the general closed form; NaN where sin(phi_p) vanishes.
Eigen::MatrixXd snri_map(double r, double eta, std::span<const double> phi_p,
                         std::span<const double> phi_c);
/// Runs the full Gaussian pipeline at every phase (cfg.phi is replaced by phases[k]).
SampleMoments modulated_moments(const InterferometerConfig& cfg, std::span<const double> phases);
/// Applies dense real block propagators to the amplitudes of each n_p - n_c sector.
/// An empty propagator leaves its sector unchanged.
void apply_sector_propagators(const std::vector<Eigen::MatrixXd>& propagators,
                              Eigen::MatrixXcd& amplitudes);
}  // namespace serial

namespace omp {
Landscape homodyne_landscape(const HomodyneInputs& in, std::span<const double> phi_p,
                             std::span<const double> phi_c);
Eigen::MatrixXd snri_map(double r, double eta, std::span<const double> phi_p,
                         std::span<const double> phi_c);
SampleMoments modulated_moments(const InterferometerConfig& cfg, std::span<const double> phases);
void apply_sector_propagators(const std::vector<Eigen::MatrixXd>& propagators,
                              Eigen::MatrixXcd& amplitudes);
}  // namespace omp

/// Insensitivity floor for a signal slope given the observable's weight norm and the
/// magnitude of the signal it is derived from (finite-difference rounding level).
double slope_floor(double signal_scale);

}  // namespace tsui::kernels
