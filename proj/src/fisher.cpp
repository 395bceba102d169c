#include "tsui/fisher.hpp"

#include <cmath>

#include "tsui/errors.hpp"

namespace tsui {

double qfi(double r, double alpha2) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("qfi needs r >= 0");
    if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) throw ValidationError("qfi needs alpha2 >= 0");
    const double c = std::cosh(r);
    return 2.0 * c * c * ((1.0 + 2.0 * alpha2) * std::cosh(2.0 * r) - 1.0);
}

FisherReport cfi_homodyne(const InterferometerConfig& config) {
    if (config.gain_p == 0.0 && config.gain_c == 0.0) {
        throw ValidationError("homodyne detection needs at least one non-zero detector gain");
    }
    const Vec4 u = homodyne_weights(config.phi_p, config.phi_c, config.gain_p, config.gain_c);
    InterferometerConfig plus = config;
    InterferometerConfig minus = config;
    plus.phi += kPhaseStep;
    minus.phi -= kPhaseStep;
    const Moments at = quadrature_stats(build_output_state(config), u);
    const Moments hi = quadrature_stats(build_output_state(plus), u);
    const Moments lo = quadrature_stats(build_output_state(minus), u);
    if (at.variance < 1e-15) throw DegenerateNoise("joint quadrature has vanishing variance");

    const double dmean = (hi.mean - lo.mean) / (2.0 * kPhaseStep);
    const double dstd = (std::sqrt(hi.variance) - std::sqrt(lo.variance)) / (2.0 * kPhaseStep);

    FisherReport rep;
    rep.snr_term = dmean * dmean / at.variance;
    rep.dist_term = 2.0 * dstd * dstd / at.variance;
    rep.cfi = rep.snr_term + rep.dist_term;
    rep.qfi = qfi(std::abs(config.r), config.alpha2);
    return rep;
}

}  // namespace tsui
