#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tsui/errors.hpp"
#include "tsui/fisher.hpp"
#include "tsui/snri.hpp"

using namespace tsui;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("quantum Fisher information") {
    CHECK(qfi(0.0, 37.0) == Approx(4 * 37.0));
    CHECK(qfi(squeeze_from_gain(2.0), 100.0) == Approx(2408.0).epsilon(1e-12));
    CHECK(qfi(0.8, 12.0) == Approx(oracle::qfi(0.8, 12.0)).epsilon(1e-14));
    CHECK_THROWS_AS(qfi(-0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(qfi(0.1, -1.0), ValidationError);
}

TEST_CASE("QFI bound approaches the dual-homodyne curve") {
    const double a2 = 1e6;
    const double r = squeeze_from_gain(2.0);
    const double bound = a2 / qfi(r, a2);
    const double curve = a2 * closed_form::truncated(1.0, r, kPi / 2, a2);
    CHECK(bound < curve);
    CHECK(bound / curve > 0.97);
}

TEST_CASE("classical Fisher information at the truncated optimum") {
    const double a2 = 1e6;
    for (double g : {2.0, 3.0, 5.0}) {
        const InterferometerConfig c = InterferometerConfig::equal_loss(squeeze_from_gain(g), 1.0, a2);
        const FisherReport f = cfi_homodyne(c);
        CHECK(f.dist_term < 1e-6 * f.snr_term);
        CHECK(f.cfi / f.qfi >= 0.97);
        CHECK(f.cfi <= f.qfi);
        CHECK(f.cfi == Approx(f.snr_term + f.dist_term));
        CHECK(f.snr_term == Approx(1.0 / phase_variance_homodyne(c).phase_variance).epsilon(1e-6));
    }
}

TEST_CASE("fitted-device phase sweep") {
    const double a2 = 1e6, eta = 0.65, r = squeeze_from_gain(3.3);
    for (int k = 1; k < 72; ++k) {
        const double phi_p = -kPi + 2 * kPi * k / 72.0;
        if (std::abs(std::sin(phi_p)) < 1e-9) continue;
        InterferometerConfig c = InterferometerConfig::equal_loss(r, eta, a2);
        c.phi_p = phi_p;
        const FisherReport f = cfi_homodyne(c);
        const double v = closed_form::truncated(eta, r, phi_p, a2);
        CHECK(1.0 / f.cfi <= v * (1 + 1e-6));
        CHECK(f.dist_term >= 0.0);
    }
    InterferometerConfig c = InterferometerConfig::equal_loss(r, eta, a2);
    const double coh = coherent_baseline(eta, 3.3, a2);
    const double closed_db = snri_db(closed_form::truncated(eta, r, kPi / 2, a2), coh);
    const double cfi_db = snri_db(1.0 / cfi_homodyne(c).cfi, coh);
    CHECK(std::abs(cfi_db - closed_db) < 0.05);
}

TEST_CASE("bound chain on random configurations") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        InterferometerConfig c;
        c.r = 1.4 * u(rng);
        c.s = k % 2 ? -c.r : 0.0;
        c.phi = 0.0;
        c.phi_p = 2 * kPi * u(rng) - kPi;
        c.phi_c = 2 * kPi * u(rng) - kPi;
        c.alpha2 = 1e3 + 1e5 * u(rng);
        const bool lossy = k % 3 == 0;
        if (lossy) {
            c.eta_p1 = 0.3 + 0.7 * u(rng);
            c.eta_c1 = 0.3 + 0.7 * u(rng);
        }
        double inv_var;
        try {
            inv_var = 1.0 / phase_variance_homodyne(c).phase_variance;
        } catch (const SlopeZero&) {
            continue;
        }
        const FisherReport f = cfi_homodyne(c);
        CHECK(inv_var <= f.cfi * (1 + 1e-9));
        if (!lossy) CHECK(f.cfi <= f.qfi * (1 + 1e-9));
    }
}

TEST_CASE("degenerate noise") {
    // Vanishing detector gains leave no measurable noise.
    InterferometerConfig c = InterferometerConfig::equal_loss(0.5, 1.0, 1.0);
    c.gain_p = c.gain_c = 1e-9;
    CHECK_THROWS_AS(cfi_homodyne(c), DegenerateNoise);
    c.gain_p = c.gain_c = 0.0;
    CHECK_THROWS_AS(cfi_homodyne(c), ValidationError);
}
