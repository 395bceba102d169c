#include "tsui/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"
#include "tsui/snri.hpp"

namespace tsui {

namespace {

constexpr double kPi = std::numbers::pi;

// Equivalent noise bandwidth of the periodic Hann window, in bins.
constexpr double kHannEnbwBins = 1.5;
// Neighbouring bins on each side used for the noise floor.
constexpr int kNoiseBins = 32;
// Bins on each side of the tone that belong to the Hann main lobe and near sidelobes.
constexpr int kToneHalfWidth = 3;

void require_positive(const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be positive, got " << v;
        throw ValidationError(os.str());
    }
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

void ModulationConfig::validate() const {
    if (!(delta_phi >= 0.0) || !std::isfinite(delta_phi)) {
        throw ValidationError("delta_phi must be >= 0");
    }
    require_positive("omega_hz", omega_hz);
    require_positive("sample_rate_hz", sample_rate_hz);
    require_positive("duration_s", duration_s);
    require_positive("rbw_hz", rbw_hz);
    if (!(sample_rate_hz > 2.0 * omega_hz)) {
        throw ValidationError("sample rate must exceed twice the modulation frequency");
    }
    if (rbw_hz > omega_hz) throw ValidationError("rbw must not exceed the modulation frequency");
    if (sample_count() < 2) throw ValidationError("record holds fewer than two samples");
}

std::size_t ModulationConfig::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

std::vector<std::string> ModulationConfig::warnings() const {
    std::vector<std::string> w;
    if (delta_phi > kSmallSignalLimit) {
        std::ostringstream os;
        os << "delta_phi = " << delta_phi << " rad exceeds the small-signal regime ("
           << kSmallSignalLimit << " rad); the linear slope model is inaccurate";
        w.push_back(os.str());
    }
    return w;
}

void CalibrationInputs::validate() const {
    require_positive("eta_coh", eta_coh);
    if (eta_coh > 1.0) throw ValidationError("eta_coh must not exceed 1");
    require_positive("responsivity", responsivity);
    require_positive("power_w", power_w);
    require_positive("enbw_hz", enbw_hz);
    require_positive("charge", charge);
}

double photons_from_power(const CalibrationInputs& cal) {
    cal.validate();
    return 2.0 * cal.eta_coh * cal.responsivity * cal.power_w / (cal.charge * cal.enbw_hz);
}

double coherent_snr_db(double delta_phi, double photons) {
    require_positive("delta_phi", delta_phi);
    require_positive("photons", photons);
    return 10.0 * std::log10(delta_phi * delta_phi * photons);
}

double seed_photons_per_sample(double detected_photons, double eta, double gain,
                               const ModulationConfig& mod) {
    mod.validate();
    require_positive("detected_photons", detected_photons);
    coherent_baseline(eta, gain, 1.0);  // validates eta and gain
    return detected_photons * mod.rbw_hz / (eta * gain * mod.sample_rate_hz);
}

std::vector<double> simulate_homodyne_timeseries(const InterferometerConfig& config,
                                                 const ModulationConfig& mod, Exec exec) {
    mod.validate();
    config.validate();
    const std::size_t n = mod.sample_count();
    std::vector<double> phases(n);
    const double amp = std::sqrt(2.0) * mod.delta_phi;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / mod.sample_rate_hz;
        phases[k] = config.phi + amp * std::cos(2.0 * kPi * mod.omega_hz * t);
    }
    const kernels::SampleMoments m = exec == Exec::parallel
                                         ? kernels::omp::modulated_moments(config, phases)
                                         : kernels::serial::modulated_moments(config, phases);

    // One RNG stream per record keeps the draw order independent of the thread count.
    std::mt19937_64 rng(mod.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> samples(n);
    for (std::size_t k = 0; k < n; ++k) {
        samples[k] = m.mean[k] + std::sqrt(m.variance[k]) * normal(rng);
    }
    return samples;
}

Periodogram welch_periodogram(std::span<const double> samples, double sample_rate_hz,
                              double rbw_hz) {
    require_positive("sample_rate_hz", sample_rate_hz);
    require_positive("rbw_hz", rbw_hz);
    const auto seg = static_cast<std::size_t>(std::llround(kHannEnbwBins * sample_rate_hz / rbw_hz));
    if (seg < 8) throw InsufficientData("resolution bandwidth too wide for the sample rate");
    if (samples.size() < seg) throw InsufficientData("record shorter than one Welch segment");
    const std::size_t hop = seg / 2;
    const std::size_t count = (samples.size() - seg) / hop + 1;

    std::vector<double> window(seg);
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    for (std::size_t n = 0; n < seg; ++n) {
        window[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(seg)));
        sum_w += window[n];
        sum_w2 += window[n] * window[n];
    }

    const std::size_t bins = seg / 2 + 1;
    std::vector<double> acc(bins, 0.0);
    Eigen::FFT<double> fft;
    std::vector<double> buf(seg);
    std::vector<std::complex<double>> spec;
    for (std::size_t s = 0; s < count; ++s) {
        const double* x = samples.data() + s * hop;
        double mean = 0.0;
        for (std::size_t n = 0; n < seg; ++n) mean += x[n];
        mean /= static_cast<double>(seg);
        for (std::size_t n = 0; n < seg; ++n) buf[n] = (x[n] - mean) * window[n];
        fft.fwd(spec, buf);
        for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
    }

    Periodogram p;
    p.segment_length = seg;
    p.segments = count;
    p.bin_width_hz = sample_rate_hz / static_cast<double>(seg);
    p.enbw_hz = sample_rate_hz * sum_w2 / (sum_w * sum_w);
    p.frequency_hz.resize(bins);
    p.psd.resize(bins);
    const double scale = 1.0 / (sample_rate_hz * sum_w2 * static_cast<double>(count));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (seg % 2 == 0 && k == bins - 1);
        p.frequency_hz[k] = static_cast<double>(k) * p.bin_width_hz;
        p.psd[k] = (edge ? 1.0 : 2.0) * scale * acc[k];
    }
    return p;
}

SnrEstimate estimate_snr(std::span<const double> samples, double sample_rate_hz, double omega_hz,
                         double rbw_hz) {
    require_positive("sample_rate_hz", sample_rate_hz);
    require_positive("omega_hz", omega_hz);
    require_positive("rbw_hz", rbw_hz);
    const double duration = static_cast<double>(samples.size()) / sample_rate_hz;
    if (duration * rbw_hz < 10.0) {
        throw InsufficientData("duration * rbw must be >= 10 for a stable noise estimate");
    }
    SnrEstimate est;
    est.periodogram = welch_periodogram(samples, sample_rate_hz, rbw_hz);
    const Periodogram& p = est.periodogram;
    const int nbins = static_cast<int>(p.psd.size());
    const int k0 = static_cast<int>(std::lround(omega_hz / p.bin_width_hz));
    if (k0 <= 0 || k0 >= nbins - 1) throw InsufficientData("tone frequency outside the spectrum");

    std::vector<double> noise;
    for (int d = kToneHalfWidth + 1; d <= kToneHalfWidth + kNoiseBins; ++d) {
        if (k0 - d >= 1) noise.push_back(p.psd[static_cast<std::size_t>(k0 - d)]);
        if (k0 + d <= nbins - 2) noise.push_back(p.psd[static_cast<std::size_t>(k0 + d)]);
    }
    if (noise.size() < 8) throw InsufficientData("too few noise bins around the tone");

    // Each averaged bin is ~chi^2 with nu degrees of freedom (Hann, 50 % overlap:
    // adjacent-segment correlation 1/6). Divide out the median/mean bias.
    const double k = static_cast<double>(p.segments);
    const double nu = 2.0 * k / (1.0 + 2.0 * (1.0 / 36.0) * (k - 1.0) / k);
    const double median_bias = std::pow(1.0 - 2.0 / (9.0 * nu), 3);
    est.noise_psd = median(noise) / median_bias;

    double tone = 0.0;
    for (int d = -kToneHalfWidth; d <= kToneHalfWidth; ++d) {
        const int b = k0 + d;
        if (b < 1 || b > nbins - 2) continue;
        tone += (p.psd[static_cast<std::size_t>(b)] - est.noise_psd) * p.bin_width_hz;
    }
    if (!(tone > 0.0)) throw ComputationError("no tone above the noise floor at the modulation frequency");
    est.tone_power = tone;
    est.tone_bin = static_cast<std::size_t>(k0);
    est.noise_power_rbw_db = 10.0 * std::log10(est.noise_psd * rbw_hz);
    est.snr_db = 10.0 * std::log10(tone / (est.noise_psd * rbw_hz));
    return est;
}

double analytic_snr_db(const InterferometerConfig& config, const ModulationConfig& mod) {
    mod.validate();
    const SensitivityReport rep = phase_variance_homodyne(config);
    return 10.0 * std::log10(mod.delta_phi * mod.delta_phi * mod.sample_rate_hz /
                             (2.0 * mod.rbw_hz * rep.phase_variance));
}

ExperimentRun run_experiment(const InterferometerConfig& config, const ModulationConfig& mod,
                             Exec exec) {
    ExperimentRun run;
    run.config = config;
    run.analytic_snr_db = analytic_snr_db(config, mod);
    const std::vector<double> x = simulate_homodyne_timeseries(config, mod, exec);
    run.estimate = estimate_snr(x, mod.sample_rate_hz, mod.omega_hz, mod.rbw_hz);
    return run;
}

PairedExperiment paired_experiment(double eta, double gain, double detected_photons,
                                   const ModulationConfig& mod, Exec exec) {
    const double r = squeeze_from_gain(gain);
    const double seed_photons = seed_photons_per_sample(detected_photons, eta, gain, mod);

    const InterferometerConfig squeezed = InterferometerConfig::equal_loss(r, eta, seed_photons);
    const InterferometerConfig coherent = InterferometerConfig::equal_loss(0.0, eta, gain * seed_photons);

    // Independent noise for the two records, both derived from the user seed.
    ModulationConfig mod_coh = mod;
    std::seed_seq seq{static_cast<std::uint32_t>(mod.seed), static_cast<std::uint32_t>(mod.seed >> 32), 1u};
    std::uint64_t derived = 0;
    {
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        derived = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    }
    mod_coh.seed = derived;

    PairedExperiment out;
    out.squeezed = run_experiment(squeezed, mod, exec);
    out.coherent = run_experiment(coherent, mod_coh, exec);
    out.estimated_difference_db = out.squeezed.estimate.snr_db - out.coherent.estimate.snr_db;
    out.analytic_difference_db = out.squeezed.analytic_snr_db - out.coherent.analytic_snr_db;
    return out;
}

void write_samples_binary(const std::string& path, std::span<const double> samples) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    for (double v : samples) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        os.write(bytes, 8);
    }
    if (!os) throw ComputationError("failed writing samples to '" + path + "'");
}

}  // namespace tsui
