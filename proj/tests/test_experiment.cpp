#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "tsui/errors.hpp"
#include "tsui/experiment.hpp"
#include "tsui/snri.hpp"

using namespace tsui;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// A cos(2 pi f t) + sigma * N(0, 1): tone power A^2/2 over one-sided noise 2 sigma^2 / fs in rbw.
double tone_snr_db(double amp, double sigma, double fs, double rbw) {
    return 10 * std::log10(amp * amp * fs / (4 * sigma * sigma * rbw));
}

std::vector<double> synthetic_tone(double amp, double sigma, double f, double fs, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = amp * std::cos(2 * kPi * f * static_cast<double>(k) / fs) + g(rng);
    return x;
}

double mean_of(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("photon-number calibration") {
    const CalibrationInputs cal;
    const double n = photons_from_power(cal);
    CHECK(n == Approx(2 * 0.8 * 0.64 * 400e-9 / (1.602176634e-19 * 30e3)).epsilon(1e-14));
    CHECK(n == Approx(8.52e7).epsilon(1e-3));
    const double snr = coherent_snr_db(1.7e-3, n);
    CHECK(snr == Approx(10 * std::log10(1.7e-3 * 1.7e-3 * n)));
    CHECK(std::abs(snr - 24.0) < 0.1);
    CHECK(std::abs(snr - 22.5) <= 2.0);

    CalibrationInputs wide = cal;
    wide.enbw_hz *= 2;
    CHECK(photons_from_power(wide) == Approx(n / 2).epsilon(1e-14));
    wide.enbw_hz = 0;
    CHECK_THROWS_AS(photons_from_power(wide), ValidationError);
    CHECK(sql_variance(n) == Approx(1 / (2 * n)));
}

TEST_CASE("modulation config") {
    ModulationConfig m;
    CHECK(m.sample_count() == 1000000);
    CHECK(m.warnings().empty());
    m.delta_phi = 0.08;
    CHECK(m.warnings().size() == 1);
    m = {};
    m.sample_rate_hz = 1.5e6;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = {};
    m.rbw_hz = 2e6;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = {};
    m.delta_phi = -1;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("synthetic tone recovers its analytic SNR") {
    const double fs = 4e6, f = 1e6, rbw = 3e4;
    const std::size_t n = 1000000;
    SUBCASE("single record") {
        const double amp = 0.6, sigma = 1.0;
        const auto x = synthetic_tone(amp, sigma, f, fs, n, 7);
        const SnrEstimate e = estimate_snr(x, fs, f, rbw);
        CHECK(std::abs(e.snr_db - tone_snr_db(amp, sigma, fs, rbw)) < 0.3);
        CHECK(e.noise_psd == Approx(2 * sigma * sigma / fs).epsilon(0.03));
        CHECK(e.periodogram.enbw_hz == Approx(rbw).epsilon(1e-12));
    }
    SUBCASE("unbiased over seeds") {
        const double amp = 0.3, sigma = 1.0;
        double sum = 0;
        for (int s = 0; s < 50; ++s) sum += estimate_snr(synthetic_tone(amp, sigma, f, fs, n, 100 + s), fs, f, rbw).snr_db;
        CHECK(std::abs(sum / 50 - tone_snr_db(amp, sigma, fs, rbw)) < 0.2);
    }
    SUBCASE("halving the resolution bandwidth") {
        const auto x = synthetic_tone(0.6, 1.0, f, fs, n, 9);
        const SnrEstimate a = estimate_snr(x, fs, f, rbw);
        const SnrEstimate b = estimate_snr(x, fs, f, rbw / 2);
        CHECK(b.noise_power_rbw_db - a.noise_power_rbw_db == Approx(-3.01).epsilon(0.1));
        CHECK(b.snr_db - a.snr_db == Approx(3.01).epsilon(0.1));
    }
    SUBCASE("too short a record") {
        const auto x = synthetic_tone(0.02, 1.0, f, fs, 1000, 1);
        CHECK_THROWS_AS(estimate_snr(x, fs, f, rbw), InsufficientData);
    }
}

TEST_CASE("homodyne record") {
    ModulationConfig mod;
    mod.seed = 42;
    const InterferometerConfig cfg = InterferometerConfig::equal_loss(squeeze_from_gain(3.3), 0.65, 50.0);
    SUBCASE("unmodulated record is stationary at the operating point") {
        mod.delta_phi = 0.0;
        const auto x = simulate_homodyne_timeseries(cfg, mod);
        const SensitivityReport rep = phase_variance_homodyne(cfg);
        const double n = static_cast<double>(x.size());
        CHECK(std::abs(mean_of(x) - rep.signal_mean) < 5 * std::sqrt(rep.noise_variance / n));
        const double sd_var = rep.noise_variance * std::sqrt(2 / (n - 1));
        CHECK(std::abs(variance_of(x) - rep.noise_variance) < 5 * sd_var);
        CHECK(variance_of(x) == Approx(rep.noise_variance).epsilon(0.01));
    }
    SUBCASE("bit-identical for a fixed seed") {
        const auto a = simulate_homodyne_timeseries(cfg, mod, Exec::parallel);
        const auto b = simulate_homodyne_timeseries(cfg, mod, Exec::serial);
        CHECK(a == b);
        mod.seed = 43;
        CHECK(simulate_homodyne_timeseries(cfg, mod) != a);
    }
    SUBCASE("modulated coherent record shows a line over a flat floor") {
        const double seed = seed_photons_per_sample(photons_from_power(CalibrationInputs{}), 0.65, 3.3, mod);
        const InterferometerConfig coh = InterferometerConfig::equal_loss(0.0, 0.65, 3.3 * seed);
        const auto x = simulate_homodyne_timeseries(coh, mod);
        const SnrEstimate e = estimate_snr(x, mod.sample_rate_hz, mod.omega_hz, mod.rbw_hz);
        const auto& p = e.periodogram;
        CHECK(p.psd[e.tone_bin] > 20 * e.noise_psd);
        CHECK(std::abs(e.snr_db - analytic_snr_db(coh, mod)) < 0.3);
        CHECK(p.psd[e.tone_bin / 2] == Approx(e.noise_psd).epsilon(0.2));
    }
    SUBCASE("binary dump") {
        const auto x = simulate_homodyne_timeseries(cfg, mod);
        const auto path = std::filesystem::temp_directory_path() / "tsui_samples_test.bin";
        write_samples_binary(path.string(), x);
        CHECK(std::filesystem::file_size(path) == x.size() * 8);
        std::ifstream is(path, std::ios::binary);
        double first = 0;
        is.read(reinterpret_cast<char*>(&first), 8);
        CHECK(first == x[0]);
        std::filesystem::remove(path);
    }
}

TEST_CASE("paired squeezed and coherent experiments") {
    ModulationConfig mod;
    mod.seed = 5;
    const double photons = photons_from_power(CalibrationInputs{});
    const PairedExperiment pe = paired_experiment(0.65, 3.3, photons, mod);
    const double expected = snri_db(closed_form::truncated(0.65, squeeze_from_gain(3.3), kPi / 2, 1.0),
                                    coherent_baseline(0.65, 3.3, 1.0));
    CHECK(pe.analytic_difference_db == Approx(expected).epsilon(1e-6));
    CHECK(std::abs(pe.estimated_difference_db - expected) < 0.3);
    CHECK(std::abs(pe.coherent.analytic_snr_db - coherent_snr_db(mod.delta_phi, photons)) < 1e-6);
    CHECK(std::abs(pe.coherent.estimate.snr_db - 22.5) <= 2.0);

    // Noise floors: squeezed / coherent record variance follows the Gaussian model.
    const double floor_ratio = pe.squeezed.estimate.noise_psd / pe.coherent.estimate.noise_psd;
    const double model_ratio = phase_variance_homodyne(pe.squeezed.config).noise_variance /
                               phase_variance_homodyne(pe.coherent.config).noise_variance;
    CHECK(10 * std::log10(floor_ratio / model_ratio) == Approx(0.0).epsilon(0.15));

    const PairedExperiment again = paired_experiment(0.65, 3.3, photons, mod);
    CHECK(again.estimated_difference_db == pe.estimated_difference_db);
}
