#pragma once

// Brute-force two-mode Fock-space model used to validate the Gaussian formalism.
// Nothing here shares code with gaussian.cpp: states are amplitude tensors
// psi(n_probe, n_conjugate), squeezing is the matrix exponential of the truncated
// generator r (a^dag b^dag - a b), and loss is an explicit Kraus sum.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsui/gaussian.hpp"
#include "tsui/parallel.hpp"

namespace tsui {

inline constexpr int kDefaultCutoff = 40;
inline constexpr int kDenseCutoffLimit = 15;
inline constexpr double kPrepareDeficitLimit = 1e-8;
inline constexpr double kSqueezeDeficitLimit = 1e-6;

/// Pure (possibly sub-normalized) state; amplitudes(n_p, n_c), 0 <= n <= cutoff.
struct FockState {
    int cutoff = 0;
    Eigen::MatrixXcd amplitudes;

    double norm() const { return amplitudes.squaredNorm(); }
    double norm_deficit() const { return 1.0 - norm(); }
};

/// Coherent seed in the probe, vacuum in the conjugate.
FockState fock_prepare(std::complex<double> alpha, int cutoff = kDefaultCutoff);

/// exp[r (a^dag b^dag - a b)] applied sector by sector (n_p - n_c is conserved). The
/// generator is truncated on a padded space of twice the cutoff, then the result is cut
/// back; the amplitude that falls outside is the truncation diagnostic (no renormalization).
FockState fock_two_mode_squeeze(const FockState& state, double r, Exec exec = Exec::parallel);

FockState fock_phase_shift(const FockState& state, Mode mode, double phi);

/// Ensemble of unnormalized pure branches; the density operator is sum |psi_k><psi_k|.
struct FockMixture {
    int cutoff = 0;
    std::vector<Eigen::MatrixXcd> branches;
    double pruned_weight = 0.0;  // weight of dropped negligible branches

    static FockMixture from(const FockState& state);
    double trace() const;
};

/// Kraus branches below this weight are dropped (and accounted in pruned_weight).
inline constexpr double kBranchPruneWeight = 1e-24;

/// Beam splitter of transmission eta with vacuum: Kraus operators
/// K_k = sum_n sqrt(C(n, k)) eta^{(n-k)/2} (1-eta)^{k/2} |n-k><n|.
FockMixture fock_loss(const FockMixture& state, Mode mode, double eta);
FockMixture fock_loss(const FockState& state, Mode mode, double eta);

FockMixture fock_two_mode_squeeze(const FockMixture& state, double r, Exec exec = Exec::parallel);
FockMixture fock_phase_shift(const FockMixture& state, Mode mode, double phi);

/// Dense density operator, only for small cutoffs (<= kDenseCutoffLimit).
struct DensityMatrix {
    int cutoff = 0;
    Eigen::MatrixXcd rho;  // index n_p * (cutoff + 1) + n_c

    static DensityMatrix from(const FockState& state);
};

DensityMatrix fock_loss(const DensityMatrix& state, Mode mode, double eta);

/// Quadrature and photon-number moments, normalized by the trace.
struct FockMoments {
    Vec4 mean = Vec4::Zero();
    Mat4 cov = Mat4::Zero();
    double n_mean[2] = {0.0, 0.0};
    double n_var[2] = {0.0, 0.0};
    double n_cov = 0.0;
    double trace = 0.0;
    double imag_residue = 0.0;  // largest imaginary part discarded from Hermitian moments
};

FockMoments fock_moments(const FockState& state);
FockMoments fock_moments(const FockMixture& state);
FockMoments fock_moments(const DensityMatrix& state);

/// Photon-number distribution P(n_p, n_c) of a pure state.
Eigen::MatrixXd photon_distribution(const FockState& state);

struct OracleGrid {
    std::vector<double> r = {0.1, 0.3, 0.6};
    std::vector<double> alpha = {0.0, 0.5, 1.0};
    std::vector<double> eta = {1.0, 0.7};
    int cutoff = kDefaultCutoff;
    double phi = 0.25;    // probe phase applied between squeezing and loss
    bool dense = false;   // density-operator loss path (cutoff <= 15)
    double tolerance = 1e-6;
};

struct DiscrepancyEntry {
    double r = 0.0;
    double alpha = 0.0;
    double eta = 1.0;
    std::string quantity;
    double gaussian = 0.0;
    double fock = 0.0;
    double difference = 0.0;  // |gaussian - fock|
};

struct DiscrepancyReport {
    std::vector<DiscrepancyEntry> entries;
    double max_discrepancy = 0.0;
    double max_norm_deficit = 0.0;
    double max_imag_residue = 0.0;
    double tolerance = 1e-6;
    bool pass = false;
};

/// Runs seed -> squeeze(r) -> phase(phi) -> loss(eta, both arms) through both pipelines
/// and compares every first/second quadrature moment and photon-number statistic.
DiscrepancyReport compare_to_gaussian(const OracleGrid& grid, Exec exec = Exec::parallel);

}  // namespace tsui
