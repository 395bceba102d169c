#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tsui/detection.hpp"
#include "tsui/errors.hpp"
#include "tsui/snri.hpp"

using namespace tsui;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("coherent baseline and SQL") {
    CHECK(coherent_baseline(1.0, 1.0, 50.0) == Approx(1.0 / 100.0));
    CHECK(coherent_baseline(0.65, 3.3, 1.0) == Approx(0.2331).epsilon(1e-4));
    for (double eta : {0.2, 0.65, 1.0}) {
        for (double g : {1.0, 2.0, 3.3}) {
            const BaselineSpec b = BaselineSpec::make(eta, g, 1e4);
            CHECK(b.detected_photons == Approx(eta * g * 1e4).epsilon(1e-12));
            CHECK(sql_variance(sql_photons(eta, g, 1e4)) == Approx(coherent_baseline(eta, g, 1e4)).epsilon(1e-14));
        }
    }
    CHECK(sql_photons(0.5, 3.0, 10.0, SqlAccounting::probe_and_conjugate) == Approx(25.0));
    CHECK_THROWS_AS(coherent_baseline(0.0, 2.0, 1.0), ValidationError);
    CHECK_THROWS_AS(coherent_baseline(1.0, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(coherent_baseline(1.0, 2.0, 0.0), ValidationError);
    CHECK_THROWS_AS(sql_variance(0.0), ValidationError);
}

TEST_CASE("SNRI in dB") {
    CHECK(snri_db(3.0, 3.0) == 0.0);
    CHECK(snri_db(1.0, 10.0) == Approx(10.0));
    CHECK_THROWS_AS(snri_db(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(snri_db(1.0, -1.0), ValidationError);

    const double r = squeeze_from_gain(3.3);
    const double v = closed_form::truncated(0.65, r, kPi / 2, 1.0);
    const double db = snri_db(v, coherent_baseline(0.65, 3.3, 1.0));
    CHECK(db == Approx(-10 * std::log10(oracle::truncated(0.65, r, kPi / 2) * 2 * 0.65 * 3.3)).epsilon(1e-12));
    CHECK(std::abs(db - 3.9) < 0.1);

    const double r2 = squeeze_from_gain(2.0);
    const double anti = snri_db(closed_form::general(1.0, r2, -kPi / 2, -kPi / 2 + kPi, 1.0),
                                coherent_baseline(1.0, 2.0, 1.0));
    CHECK(anti < 0.0);
}

TEST_CASE("SNRI scan over the probe LO phase") {
    const auto curve = snri_scan_phip(0.65, 3.3, 1e6);
    REQUIRE(curve.size() == 361);
    CHECK(curve.front().phi_p == Approx(-kPi));
    CHECK(curve.back().phi_p == Approx(kPi));
    CHECK_FALSE(curve[0].snri_db.has_value());
    CHECK_FALSE(curve[180].snri_db.has_value());
    CHECK_FALSE(curve[360].snri_db.has_value());

    std::size_t best = 0;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        if (curve[k].snri_db && (!curve[best].snri_db || *curve[k].snri_db > *curve[best].snri_db)) best = k;
    }
    CHECK(curve[best].phi_p == Approx(kPi / 2).epsilon(1e-12));
    CHECK(std::abs(*curve[best].snri_db - 3.9) < 0.1);
    CHECK(*curve[90].snri_db < 0.0);  // phi_p = -pi/2
    CHECK(*curve[90].snri_db < *curve[270].snri_db);

    const auto flat = snri_scan_phip(1.0, 1.0, 1e6);
    CHECK(*flat[90].snri_db == Approx(0.0).epsilon(1e-12));
    CHECK(*flat[270].snri_db == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("SNRI behaviour in gain and seed") {
    double prev = 0.0;
    for (double g : {1.0 + 1e-9, 1.01, 1.5, 2.0, 4.0}) {
        const double r = squeeze_from_gain(g);
        const double db = snri_db(closed_form::general(1.0, r, kPi / 2, kPi / 2, 1.0), coherent_baseline(1.0, g, 1.0));
        CHECK(db > 0.0);
        CHECK(db > prev);
        prev = db;
        if (g < 1.0 + 1e-6) CHECK(db < 1e-3);
    }
    const double r = squeeze_from_gain(2.5);
    for (double a2 : {1.0, 1e3, 1e9}) {
        const double db = snri_db(closed_form::general(0.8, r, 1.3, 1.9, a2), coherent_baseline(0.8, 2.5, a2));
        CHECK(db == Approx(snri_db(closed_form::general(0.8, r, 1.3, 1.9, 1.0), coherent_baseline(0.8, 2.5, 1.0))).epsilon(1e-12));
    }
}

TEST_CASE("SNRI map") {
    const SnriMap map = snri_map(0.4605, 1.0);
    REQUIRE(map.phi_p.size() == 361);
    const auto pk = map.peak();
    CHECK(std::abs(pk.value - 4.0) < 0.05);
    CHECK(map.phi_p[pk.i] == Approx(kPi / 2));
    CHECK(map.phi_c[pk.j] == Approx(kPi / 2));
    CHECK(map.phi_p[pk.i] + map.phi_c[pk.j] == Approx(kPi));
    CHECK(pk.value == Approx(20 * 0.4605 / std::log(10.0)).epsilon(1e-4));

    // the anti-diagonal phi_p + phi_c = pi carries the best value for each phi_p
    for (std::size_t i = 1; i < 360; ++i) {
        if (i == 180) continue;
        const std::size_t j = i >= 180 ? 540 - i : 180 - i;  // phi_c = pi - phi_p (mod 2 pi)
        double row_max = -1e300;
        for (std::size_t jj = 0; jj < 361; ++jj) {
            if (auto v = map.at(i, jj)) row_max = std::max(row_max, *v);
        }
        CHECK(*map.at(i, j) == Approx(row_max).epsilon(1e-12));
    }

    // periodicity: the phi_p = +-pi rows are both insensitive, the phi_c = +-pi columns coincide
    for (std::size_t j = 0; j < 361; ++j) {
        CHECK_FALSE(map.at(0, j).has_value());
        CHECK_FALSE(map.at(360, j).has_value());
    }
    for (std::size_t i = 1; i < 360; ++i) {
        if (i == 180) continue;
        CHECK(*map.at(i, 0) == Approx(*map.at(i, 360)).epsilon(1e-12));
    }

    // phi_c = pi/2 slice equals the probe-phase scan
    const auto scan = snri_scan_phip(1.0, gain_from_squeeze(0.4605), 1e6);
    for (std::size_t i = 0; i < 361; ++i) {
        const auto m = map.at(i, 270);
        REQUIRE(m.has_value() == scan[i].snri_db.has_value());
        if (m) CHECK(std::abs(*m - *scan[i].snri_db) < 1e-12);
    }

    // <j_p> crosses zero at phi_p = pi/2 mod pi
    CHECK(std::abs(map.probe_signal[270]) < 1e-12);
    CHECK(std::abs(map.probe_signal[90]) < 1e-12);
    CHECK(map.probe_signal[269] * map.probe_signal[271] < 0);
    CHECK(std::abs(map.conjugate_signal[270]) < 1e-12);
}

TEST_CASE("map is periodic under a full turn of the probe LO") {
    const double r = 0.4605;
    for (double pp : {-2.0, -0.7, 0.4, 1.3}) {
        for (double pc : {-1.1, 0.2, 2.9}) {
            CHECK(closed_form::general(1.0, r, pp + 2 * kPi, pc, 1.0) ==
                  Approx(closed_form::general(1.0, r, pp, pc, 1.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("SNRI against a loss-free coherent detector") {
    // 15 % detector loss removed from the coherent reference only
    const double detector_db = 10 * std::log10(1.0 / 0.85);
    CHECK(detector_db == Approx(0.706).epsilon(1e-3));
    CHECK(std::round(detector_db) == 1.0);
    const double r = squeeze_from_gain(3.3);
    const double snri = snri_db(closed_form::truncated(0.65, r, kPi / 2, 1.0), coherent_baseline(0.65, 3.3, 1.0));
    const double idealized = snri - detector_db;
    CHECK(idealized == Approx(3.18).epsilon(1e-2));
    CHECK(std::round(idealized) == 3.0);
}
