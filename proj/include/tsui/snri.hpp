#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tsui/parallel.hpp"

namespace tsui {

/// Which photons count as the resource of the classical reference measurement.
enum class SqlAccounting {
    probe_only,           // N = eta G |alpha|^2 detected in the phase-sensing arm (default)
    probe_and_conjugate,  // N = eta (2G - 1) |alpha|^2
};

struct BaselineSpec {
    double eta = 1.0;
    double gain = 1.0;
    double alpha2 = 1.0;
    double detected_photons = 1.0;  // eta * G * alpha2

    static BaselineSpec make(double eta, double gain, double alpha2);
};

/// 1 / (2 eta G |alpha|^2): best variance with coherent beams of equal probe power.
double coherent_baseline(double eta, double gain, double alpha2);

/// 1 / (2 N): ideal truncated Mach-Zehnder with N detected photons.
double sql_variance(double photons);

double sql_photons(double eta, double gain, double alpha2,
                   SqlAccounting accounting = SqlAccounting::probe_only);

/// -10 log10(variance / reference), in dB. Positive means better than the reference.
double snri_db(double variance, double reference_variance);

struct SnriPoint {
    double phi_p = 0.0;
    std::optional<double> snri_db;  // empty at insensitive points (sin phi_p = 0)
};

/// Evenly spaced LO-phase grid on [-pi, pi] with `points` samples (endpoints included).
std::vector<double> phase_grid(int points);

/// SNRI vs probe LO phase at fixed conjugate LO phase, from the closed-form variance.
std::vector<SnriPoint> snri_scan_phip(double eta, double gain, double alpha2,
                                      double phi_c = std::numbers::pi / 2, int points = 361);

struct SnriMap {
    std::vector<double> phi_p;
    std::vector<double> phi_c;
    Eigen::MatrixXd snri_db;  // rows phi_p, cols phi_c; NaN marks insensitive cells
    /// <j_p>(phi_p) and <j_c>(phi_c) per unit seed amplitude (lossy, lossless-phase chain).
    std::vector<double> probe_signal;
    std::vector<double> conjugate_signal;

    std::optional<double> at(std::size_t i, std::size_t j) const;
    /// Largest finite cell value and its position; ties go to the larger phases.
    struct Peak {
        double value;
        std::size_t i;
        std::size_t j;
    };
    Peak peak() const;
};

SnriMap snri_map(double r, double eta, int points = 361, Exec exec = Exec::parallel);

}  // namespace tsui
