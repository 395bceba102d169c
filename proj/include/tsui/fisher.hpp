#pragma once

#include "tsui/detection.hpp"

namespace tsui {

struct FisherReport {
    double qfi = 0.0;        // lossless bound for the same r and seed, rad^-2
    double cfi = 0.0;        // snr_term + dist_term
    double snr_term = 0.0;   // (d<X>/dphi)^2 / Var(X)
    double dist_term = 0.0;  // 2 (d std(X)/dphi)^2 / Var(X)
};

/// Quantum Fisher information of the seeded two-mode squeezed state with the phase
/// object in the seeded arm: 2 cosh^2 r [(1 + 2|alpha|^2) cosh 2r - 1].
double qfi(double r, double alpha2);

/// Classical Fisher information of a Gaussian homodyne record of the joint quadrature.
/// Throws DegenerateNoise if Var(X) < 1e-15.
FisherReport cfi_homodyne(const InterferometerConfig& config);

}  // namespace tsui
