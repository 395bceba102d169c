#include "tsui/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"

namespace tsui {

namespace {

using cd = std::complex<double>;

void check_cutoff(int cutoff) {
    if (cutoff < 1) throw ValidationError("Fock cutoff must be >= 1");
}

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("transmission must lie in [0, 1]");
}

// Propagator exp(K) for the sector n_p - n_c = delta of the space truncated at w.
Eigen::MatrixXd sector_propagator(double r, int w, int delta) {
    const int d = std::abs(delta);
    const int len = w - d + 1;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(len, len);
    for (int m = 0; m + 1 < len; ++m) {
        // a^dag b^dag |d + m, m> = sqrt((d + m + 1)(m + 1)) |d + m + 1, m + 1>
        const double c = r * std::sqrt(static_cast<double>(d + m + 1) * static_cast<double>(m + 1));
        k(m + 1, m) = c;
        k(m, m + 1) = -c;
    }
    return k.exp();
}

Eigen::MatrixXcd squeeze_amplitudes(const Eigen::MatrixXcd& amp, int cutoff, double r, Exec exec) {
    const int w = 2 * cutoff;
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(w + 1, w + 1);
    padded.topLeftCorner(cutoff + 1, cutoff + 1) = amp;

    std::vector<Eigen::MatrixXd> props(static_cast<std::size_t>(2 * w + 1));
    for (int k = 0; k <= 2 * w; ++k) {
        const int delta = k - w;
        // A sector that is empty on input stays empty; leave its propagator unset.
        if (std::abs(delta) > cutoff) continue;
        bool occupied = false;
        const int n0p = std::max(delta, 0);
        const int n0c = std::max(-delta, 0);
        for (int m = 0; n0p + m <= cutoff && n0c + m <= cutoff; ++m) {
            if (amp(n0p + m, n0c + m) != cd(0.0, 0.0)) {
                occupied = true;
                break;
            }
        }
        if (occupied) props[static_cast<std::size_t>(k)] = sector_propagator(r, w, delta);
    }
    if (exec == Exec::parallel) {
        kernels::omp::apply_sector_propagators(props, padded);
    } else {
        kernels::serial::apply_sector_propagators(props, padded);
    }
    return padded.topLeftCorner(cutoff + 1, cutoff + 1);
}

// Kraus operator K_k on one index of the amplitude tensor.
Eigen::MatrixXcd apply_kraus(const Eigen::MatrixXcd& psi, Mode mode, double eta, int k) {
    const int dim = static_cast<int>(psi.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = k; n < dim; ++n) {
        double coeff;
        if (eta == 0.0) {
            coeff = n == k ? 1.0 : 0.0;
        } else if (eta == 1.0) {
            coeff = k == 0 ? 1.0 : 0.0;
        } else {
            const double log_c = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) +
                                 0.5 * (n - k) * std::log(eta) + 0.5 * k * std::log1p(-eta);
            coeff = std::exp(log_c);
        }
        if (coeff == 0.0) continue;
        if (mode == Mode::probe) {
            out.row(n - k) = coeff * psi.row(n);
        } else {
            out.col(n - k) = coeff * psi.col(n);
        }
    }
    return out;
}

// a (probe) or b (conjugate) acting on an amplitude tensor.
Eigen::MatrixXcd lower(const Eigen::MatrixXcd& psi, Mode mode) {
    const int dim = static_cast<int>(psi.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        if (mode == Mode::probe) {
            out.row(n - 1) = s * psi.row(n);
        } else {
            out.col(n - 1) = s * psi.col(n);
        }
    }
    return out;
}

cd inner(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    return x.conjugate().cwiseProduct(y).sum();
}

// Raw (unnormalized) expectation values accumulated over branches.
struct LadderSums {
    double weight = 0.0;
    cd a = 0.0, b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0, adag_b = 0.0, a_bdag = 0.0;
    double na = 0.0, nb = 0.0, na2 = 0.0, nb2 = 0.0, nanb = 0.0;

    void add(const LadderSums& o) {
        weight += o.weight;
        a += o.a;
        b += o.b;
        aa += o.aa;
        bb += o.bb;
        ab += o.ab;
        adag_b += o.adag_b;
        a_bdag += o.a_bdag;
        na += o.na;
        nb += o.nb;
        na2 += o.na2;
        nb2 += o.nb2;
        nanb += o.nanb;
    }
};

LadderSums branch_sums(const Eigen::MatrixXcd& psi) {
    LadderSums s;
    const Eigen::MatrixXcd la = lower(psi, Mode::probe);
    const Eigen::MatrixXcd lb = lower(psi, Mode::conjugate);
    s.weight = psi.squaredNorm();
    s.a = inner(psi, la);
    s.b = inner(psi, lb);
    s.aa = inner(psi, lower(la, Mode::probe));
    s.bb = inner(psi, lower(lb, Mode::conjugate));
    s.ab = inner(psi, lower(lb, Mode::probe));
    s.adag_b = inner(la, lb);
    s.a_bdag = inner(lb, la);
    const int dim = static_cast<int>(psi.rows());
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            const double p = std::norm(psi(n, m));
            s.na += n * p;
            s.nb += m * p;
            s.na2 += static_cast<double>(n) * n * p;
            s.nb2 += static_cast<double>(m) * m * p;
            s.nanb += static_cast<double>(n) * m * p;
        }
    }
    return s;
}

FockMoments moments_from_sums(const LadderSums& raw) {
    if (!(raw.weight > 0.0)) throw ComputationError("Fock state has zero trace");
    const double w = raw.weight;
    const cd a = raw.a / w, b = raw.b / w, aa = raw.aa / w, bb = raw.bb / w, ab = raw.ab / w;
    const cd adag_b = raw.adag_b / w, a_bdag = raw.a_bdag / w;
    const double na = raw.na / w, nb = raw.nb / w;

    // o = (a, a^dag, b, b^dag); M_ij = <o_i o_j> using [a, a^dag] = 1 and cross-mode commutation.
    Eigen::Matrix4cd m;
    // clang-format off
    m << aa,             na + 1.0,       ab,             a_bdag,
         na,             std::conj(aa),  adag_b,         std::conj(ab),
         ab,             adag_b,         bb,             nb + 1.0,
         a_bdag,         std::conj(ab),  nb,             std::conj(bb);
    // clang-format on
    Eigen::Matrix4cd t;
    const cd i(0.0, 1.0);
    // clang-format off
    t << 1.0, 1.0, 0.0, 0.0,
         -i,  i,   0.0, 0.0,
         0.0, 0.0, 1.0, 1.0,
         0.0, 0.0, -i,  i;
    // clang-format on
    const Eigen::Matrix4cd q = t * m * t.transpose();
    const Eigen::Matrix4cd sym = 0.5 * (q + q.transpose());

    FockMoments out;
    out.trace = w;
    out.mean = Vec4(2.0 * a.real(), 2.0 * a.imag(), 2.0 * b.real(), 2.0 * b.imag());
    out.cov = sym.real() - out.mean * out.mean.transpose();
    out.imag_residue = sym.imag().cwiseAbs().maxCoeff();
    out.n_mean[0] = na;
    out.n_mean[1] = nb;
    out.n_var[0] = raw.na2 / w - na * na;
    out.n_var[1] = raw.nb2 / w - nb * nb;
    out.n_cov = raw.nanb / w - na * nb;
    return out;
}

// Dense single-mode operators embedded in the two-mode space.
Eigen::MatrixXcd dense_lowering(int cutoff, Mode mode) {
    const int d1 = cutoff + 1;
    const int dim = d1 * d1;
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n < d1; ++n) {
        for (int m = 0; m < d1; ++m) {
            if (mode == Mode::probe && n > 0) op((n - 1) * d1 + m, n * d1 + m) = std::sqrt(double(n));
            if (mode == Mode::conjugate && m > 0) op(n * d1 + m - 1, n * d1 + m) = std::sqrt(double(m));
        }
    }
    return op;
}

}  // namespace

FockState fock_prepare(std::complex<double> alpha, int cutoff) {
    check_cutoff(cutoff);
    const double a2 = std::norm(alpha);
    if (a2 > cutoff / 4.0) {
        std::ostringstream os;
        os << "|alpha|^2 = " << a2 << " needs a cutoff of at least " << std::ceil(4.0 * a2);
        throw TruncationInadequate(os.str());
    }
    FockState st;
    st.cutoff = cutoff;
    st.amplitudes = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    cd term = std::exp(-0.5 * a2);
    for (int n = 0; n <= cutoff; ++n) {
        if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
        st.amplitudes(n, 0) = term;
    }
    if (st.norm_deficit() > kPrepareDeficitLimit) {
        throw TruncationInadequate("coherent seed not contained in the Fock cutoff (norm deficit " +
                                   std::to_string(st.norm_deficit()) + ")");
    }
    return st;
}

FockState fock_two_mode_squeeze(const FockState& state, double r, Exec exec) {
    FockState out;
    out.cutoff = state.cutoff;
    out.amplitudes = squeeze_amplitudes(state.amplitudes, state.cutoff, r, exec);
    // Only the leakage caused by this operation counts against it.
    const double leaked = state.norm() - out.norm();
    if (leaked > kSqueezeDeficitLimit) {
        throw TruncationInadequate("squeezed state leaks out of the Fock cutoff (lost weight " +
                                   std::to_string(leaked) + ")");
    }
    return out;
}

FockState fock_phase_shift(const FockState& state, Mode mode, double phi) {
    FockState out = state;
    for (int n = 0; n <= state.cutoff; ++n) {
        const cd ph = std::polar(1.0, phi * n);
        if (mode == Mode::probe) {
            out.amplitudes.row(n) *= ph;
        } else {
            out.amplitudes.col(n) *= ph;
        }
    }
    return out;
}

FockMixture FockMixture::from(const FockState& state) {
    FockMixture m;
    m.cutoff = state.cutoff;
    m.branches.push_back(state.amplitudes);
    return m;
}

double FockMixture::trace() const {
    double t = 0.0;
    for (const auto& b : branches) t += b.squaredNorm();
    return t;
}

FockMixture fock_loss(const FockMixture& state, Mode mode, double eta) {
    check_eta(eta);
    FockMixture out;
    out.cutoff = state.cutoff;
    out.pruned_weight = state.pruned_weight;
    for (const auto& psi : state.branches) {
        for (int k = 0; k <= state.cutoff; ++k) {
            Eigen::MatrixXcd branch = apply_kraus(psi, mode, eta, k);
            const double w = branch.squaredNorm();
            if (w == 0.0) continue;
            if (w < kBranchPruneWeight) {
                out.pruned_weight += w;
                continue;
            }
            out.branches.push_back(std::move(branch));
        }
    }
    return out;
}

FockMixture fock_loss(const FockState& state, Mode mode, double eta) {
    return fock_loss(FockMixture::from(state), mode, eta);
}

FockMixture fock_two_mode_squeeze(const FockMixture& state, double r, Exec exec) {
    FockMixture out = state;
    const double before = state.trace();
    for (auto& b : out.branches) b = squeeze_amplitudes(b, state.cutoff, r, exec);
    const double leaked = before - out.trace();
    if (leaked > kSqueezeDeficitLimit) {
        throw TruncationInadequate("squeezed mixture leaks out of the Fock cutoff (lost weight " +
                                   std::to_string(leaked) + ")");
    }
    return out;
}

FockMixture fock_phase_shift(const FockMixture& state, Mode mode, double phi) {
    FockMixture out = state;
    for (auto& b : out.branches) {
        FockState tmp{state.cutoff, b};
        b = fock_phase_shift(tmp, mode, phi).amplitudes;
    }
    return out;
}

DensityMatrix DensityMatrix::from(const FockState& state) {
    if (state.cutoff > kDenseCutoffLimit) {
        throw ValidationError("dense density-operator path supports cutoffs up to " +
                              std::to_string(kDenseCutoffLimit));
    }
    const int d1 = state.cutoff + 1;
    Eigen::VectorXcd v(d1 * d1);
    for (int n = 0; n < d1; ++n) {
        for (int m = 0; m < d1; ++m) v(n * d1 + m) = state.amplitudes(n, m);
    }
    return {state.cutoff, v * v.adjoint()};
}

DensityMatrix fock_loss(const DensityMatrix& state, Mode mode, double eta) {
    check_eta(eta);
    const int d1 = state.cutoff + 1;
    const int dim = d1 * d1;
    DensityMatrix out{state.cutoff, Eigen::MatrixXcd::Zero(dim, dim)};
    for (int k = 0; k <= state.cutoff; ++k) {
        Eigen::MatrixXcd kraus = Eigen::MatrixXcd::Zero(dim, dim);
        for (int n = k; n < d1; ++n) {
            double coeff;
            if (eta == 0.0) {
                coeff = n == k ? 1.0 : 0.0;
            } else if (eta == 1.0) {
                coeff = k == 0 ? 1.0 : 0.0;
            } else {
                coeff = std::sqrt(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))) *
                        std::pow(eta, 0.5 * (n - k)) * std::pow(1.0 - eta, 0.5 * k);
            }
            for (int o = 0; o < d1; ++o) {
                if (mode == Mode::probe) {
                    kraus((n - k) * d1 + o, n * d1 + o) = coeff;
                } else {
                    kraus(o * d1 + n - k, o * d1 + n) = coeff;
                }
            }
        }
        out.rho += kraus * state.rho * kraus.adjoint();
    }
    return out;
}

FockMoments fock_moments(const FockState& state) {
    return moments_from_sums(branch_sums(state.amplitudes));
}

FockMoments fock_moments(const FockMixture& state) {
    LadderSums total;
    for (const auto& b : state.branches) total.add(branch_sums(b));
    return moments_from_sums(total);
}

FockMoments fock_moments(const DensityMatrix& state) {
    const int d1 = state.cutoff + 1;
    const Eigen::MatrixXcd a = dense_lowering(state.cutoff, Mode::probe);
    const Eigen::MatrixXcd b = dense_lowering(state.cutoff, Mode::conjugate);
    const Eigen::MatrixXcd& rho = state.rho;
    auto ev = [&](const Eigen::MatrixXcd& op) { return (rho * op).trace(); };

    LadderSums s;
    s.weight = rho.trace().real();
    s.a = ev(a);
    s.b = ev(b);
    s.aa = ev(a * a);
    s.bb = ev(b * b);
    s.ab = ev(a * b);
    s.adag_b = ev(a.adjoint() * b);
    s.a_bdag = ev(b.adjoint() * a);
    for (int n = 0; n < d1; ++n) {
        for (int m = 0; m < d1; ++m) {
            const double p = rho(n * d1 + m, n * d1 + m).real();
            s.na += n * p;
            s.nb += m * p;
            s.na2 += static_cast<double>(n) * n * p;
            s.nb2 += static_cast<double>(m) * m * p;
            s.nanb += static_cast<double>(n) * m * p;
        }
    }
    return moments_from_sums(s);
}

Eigen::MatrixXd photon_distribution(const FockState& state) {
    return state.amplitudes.cwiseAbs2();
}

DiscrepancyReport compare_to_gaussian(const OracleGrid& grid, Exec exec) {
    check_cutoff(grid.cutoff);
    if (grid.dense && grid.cutoff > kDenseCutoffLimit) {
        throw ValidationError("dense oracle path needs cutoff <= " + std::to_string(kDenseCutoffLimit));
    }
    for (double e : grid.eta) check_eta(e);

    struct Point {
        double r, alpha, eta;
    };
    std::vector<Point> points;
    for (double r : grid.r)
        for (double a : grid.alpha)
            for (double e : grid.eta) points.push_back({r, a, e});

    std::vector<std::vector<DiscrepancyEntry>> per_point(points.size());
    std::vector<double> deficits(points.size(), 0.0);
    std::vector<double> residues(points.size(), 0.0);
    const int n = static_cast<int>(points.size());

    // Validate truncation up front so no exception has to leave the parallel region.
    for (const Point& p : points) {
        if (p.alpha * p.alpha > grid.cutoff / 4.0) {
            throw TruncationInadequate("grid seed too large for cutoff " + std::to_string(grid.cutoff));
        }
    }

    std::vector<std::string> errors(points.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int k = 0; k < n; ++k) {
        const Point& p = points[k];
        try {
            GaussianState g = coherent_seed_state({p.alpha, 0.0});
            g = apply_two_mode_squeeze(g, p.r);
            g = apply_phase_shift(g, Mode::probe, grid.phi);
            g = apply_loss(g, Mode::probe, p.eta);
            g = apply_loss(g, Mode::conjugate, p.eta);

            FockState f = fock_prepare({p.alpha, 0.0}, grid.cutoff);
            f = fock_two_mode_squeeze(f, p.r, Exec::serial);
            f = fock_phase_shift(f, Mode::probe, grid.phi);
            FockMoments fm;
            if (grid.dense) {
                DensityMatrix rho = DensityMatrix::from(f);
                rho = fock_loss(rho, Mode::probe, p.eta);
                rho = fock_loss(rho, Mode::conjugate, p.eta);
                fm = fock_moments(rho);
            } else {
                FockMixture mix = fock_loss(f, Mode::probe, p.eta);
                mix = fock_loss(mix, Mode::conjugate, p.eta);
                fm = fock_moments(mix);
            }
            deficits[k] = 1.0 - fm.trace;
            residues[k] = fm.imag_residue;

            auto& out = per_point[k];
            auto add = [&](std::string q, double gv, double fv) {
                out.push_back({p.r, p.alpha, p.eta, std::move(q), gv, fv, std::abs(gv - fv)});
            };
            static const char* names[4] = {"x_p", "p_p", "x_c", "p_c"};
            for (int i = 0; i < 4; ++i) add(std::string("mean_") + names[i], g.mean()(i), fm.mean(i));
            for (int i = 0; i < 4; ++i) {
                for (int j = i; j < 4; ++j) {
                    add(std::string("cov_") + names[i] + "_" + names[j], g.cov()(i, j), fm.cov(i, j));
                }
            }
            const Moments np = number_stats(g, Mode::probe);
            const Moments nc = number_stats(g, Mode::conjugate);
            add("n_mean_p", np.mean, fm.n_mean[0]);
            add("n_mean_c", nc.mean, fm.n_mean[1]);
            add("n_var_p", np.variance, fm.n_var[0]);
            add("n_var_c", nc.variance, fm.n_var[1]);
            add("n_cov_pc", number_cross_covariance(g), fm.n_cov);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw TruncationInadequate(e);
    }

    DiscrepancyReport rep;
    rep.tolerance = grid.tolerance;
    for (int k = 0; k < n; ++k) {
        for (auto& e : per_point[k]) {
            rep.max_discrepancy = std::max(rep.max_discrepancy, e.difference);
            rep.entries.push_back(std::move(e));
        }
        rep.max_norm_deficit = std::max(rep.max_norm_deficit, deficits[k]);
        rep.max_imag_residue = std::max(rep.max_imag_residue, residues[k]);
    }
    rep.pass = rep.max_discrepancy < grid.tolerance;
    return rep;
}

}  // namespace tsui
