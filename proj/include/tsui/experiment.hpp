#pragma once

// Simulated laboratory measurement: a weak sinusoidal phase modulation on the probe,
// the summed homodyne photocurrent sampled as independent Gaussian draws from the
// instantaneous operating point, and a Welch periodogram read out the way a spectrum
// analyzer would (tone power over the noise power in one resolution bandwidth).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsui/detection.hpp"
#include "tsui/parallel.hpp"

namespace tsui {

struct ModulationConfig {
    double delta_phi = 1.7e-3;     // RMS phase amplitude, rad
    double omega_hz = 1e6;         // modulation frequency
    double sample_rate_hz = 4e6;
    double duration_s = 0.25;
    double rbw_hz = 3e4;           // resolution bandwidth
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t sample_count() const;
    /// Non-fatal remarks (e.g. modulation outside the small-signal regime).
    std::vector<std::string> warnings() const;
};

/// Above this RMS modulation the linear-slope picture starts to fail.
inline constexpr double kSmallSignalLimit = 50e-3;

struct CalibrationInputs {
    double eta_coh = 0.8;              // detection transmission
    double responsivity = 0.64;        // A/W at unit quantum efficiency
    double power_w = 400e-9;           // probe power
    double enbw_hz = 30e3;             // equivalent noise bandwidth
    double charge = 1.602176634e-19;   // C

    void validate() const;
};

/// Detected probe photons per measurement: 2 eta rho P / (e B).
double photons_from_power(const CalibrationInputs& cal);

/// Shot-noise-limited coherent SNR (dB) for RMS modulation delta_phi and N photons.
double coherent_snr_db(double delta_phi, double photons);

/// Seed photons per sample that make a measurement bandwidth of rbw collect
/// `detected_photons` detected probe photons: N rbw / (eta G fs).
double seed_photons_per_sample(double detected_photons, double eta, double gain,
                               const ModulationConfig& mod);

/// Joint-quadrature record. Deterministic given mod.seed.
std::vector<double> simulate_homodyne_timeseries(const InterferometerConfig& config,
                                                 const ModulationConfig& mod,
                                                 Exec exec = Exec::parallel);

struct Periodogram {
    std::vector<double> frequency_hz;
    std::vector<double> psd;  // one-sided, units^2 / Hz
    double bin_width_hz = 0.0;
    double enbw_hz = 0.0;
    std::size_t segment_length = 0;
    std::size_t segments = 0;
};

/// Hann-windowed, 50 %-overlap Welch estimate whose equivalent noise bandwidth matches rbw.
Periodogram welch_periodogram(std::span<const double> samples, double sample_rate_hz,
                              double rbw_hz);

struct SnrEstimate {
    double snr_db = 0.0;
    double tone_power = 0.0;         // mean-square tone amplitude
    double noise_psd = 0.0;          // units^2 / Hz
    double noise_power_rbw_db = 0.0; // 10 log10(noise_psd * rbw)
    std::size_t tone_bin = 0;
    Periodogram periodogram;
};

/// Tone power at omega over the median neighbouring noise power in one rbw.
/// Throws InsufficientData if duration * rbw < 10.
SnrEstimate estimate_snr(std::span<const double> samples, double sample_rate_hz, double omega_hz,
                         double rbw_hz);

/// SNR that the record of `config` should show: delta_phi^2 fs / (2 rbw Var(phi)).
double analytic_snr_db(const InterferometerConfig& config, const ModulationConfig& mod);

struct ExperimentRun {
    InterferometerConfig config;
    double analytic_snr_db = 0.0;
    SnrEstimate estimate;
};

struct PairedExperiment {
    ExperimentRun squeezed;
    ExperimentRun coherent;
    double estimated_difference_db = 0.0;
    double analytic_difference_db = 0.0;
};

/// Runs a record of `config` and estimates its SNR.
ExperimentRun run_experiment(const InterferometerConfig& config, const ModulationConfig& mod,
                             Exec exec = Exec::parallel);

/// Truncated device at phi_p = phi_c = pi/2 versus coherent beams (G = 1) of equal
/// detected probe power. `detected_photons` sets the coherent shot-noise SNR.
PairedExperiment paired_experiment(double eta, double gain, double detected_photons,
                                   const ModulationConfig& mod, Exec exec = Exec::parallel);

/// Raw little-endian float64 dump of the record.
void write_samples_binary(const std::string& path, std::span<const double> samples);

}  // namespace tsui
