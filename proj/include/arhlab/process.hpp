#pragma once

#include "arhlab/hilbert.hpp"
#include "arhlab/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arhlab {

/// Law of a strong H-white noise: independent Gaussian curves
/// eps = sum_p sqrt(gamma_p) xi_p e_p with orthonormal e_p.
struct NoiseSpec {
    Vector eigenvalues;               // gamma_1 >= gamma_2 > ... > 0
    Matrix eigenfunctions;            // m x P, column p is e_{p+1}
    GridPtr grid;
    std::uint64_t seed = 0;

    /// Fourier system {1, sqrt2 cos(2 pi p t), sqrt2 sin(2 pi p t)} with
    /// gamma_p = p^{-decay}.
    static NoiseSpec fourier(const GridPtr& grid, int count = 20, double decay = 2.0,
                             std::uint64_t seed = 0);

    /// Noise with the covariance described by an eigensystem (used when
    /// simulating from a fitted model).
    static NoiseSpec from_eigensystem(const EigenSystem& eig, std::uint64_t seed);

    Index dim() const { return eigenvalues.size(); }
    /// Covariance operator Gamma_eps = sum_p gamma_p e_p (x) e_p.
    OperatorMatrix covariance() const;
    Curve eigenfunction(Index p) const { return Curve(grid, eigenfunctions.col(p)); }

    /// One draw from substream `stream`.
    Curve draw(std::uint64_t stream) const;
};

/// Fourier basis curves on a grid (orthonormal under the trapezoid weights
/// as long as frequencies stay well below Nyquist).
Matrix fourier_basis(const GridPtr& grid, int count);

/// X_k = mu + sum_{j=0..M} a_j(eps_{k-j}) with a_0 = I (implicit).
struct LinearProcessSpec {
    std::vector<OperatorMatrix> coefficients;  // a_1 ... a_M
    NoiseSpec noise;
    std::optional<Curve> mean;
};

struct ArhSpec {
    OperatorMatrix rho;
    NoiseSpec noise;
    int burnin = 200;
};

/// A segmented sample X_1..X_n with the innovations that produced it (when
/// analytically available) and, for the closed-form processes, the true
/// autocorrelation operator.
struct SegmentedProcess {
    std::vector<Curve> sample;
    std::vector<Curve> innovations;
    std::optional<OperatorMatrix> truth;
};

struct StationarityReport {
    double radius = 0.0;
    bool pass = false;
};

struct InvertibilityReport {
    bool pass = false;
    double margin = 0.0;
};

std::vector<Curve> gen_white_noise(const NoiseSpec& spec, int n);

std::vector<Curve> simulate_linear_process(const LinearProcessSpec& spec, int n);

SegmentedProcess simulate_arh1(const ArhSpec& spec, int n);

/// ARH(p) through the companion (Markov) representation on the p-fold
/// product grid; returns the first block of the stacked iteration.
SegmentedProcess simulate_arh_p(const std::vector<OperatorMatrix>& rhos,
                                const NoiseSpec& noise, int n, int burnin = 200);

/// Companion operator of rho_1..rho_p on the stacked grid.
OperatorMatrix companion_operator(const std::vector<OperatorMatrix>& rhos);

/// Exact segment sampling of the stationary Ornstein-Uhlenbeck process:
/// X_k(t) = eta_{(k-1)+t}. Innovations eps_k(t) = X_k(t) - e^{-a t} X_k(0)
/// and the true operator rho(x)(t) = e^{-a t} x(1) are returned.
SegmentedProcess simulate_ou_segments(double a, int n, const GridPtr& grid, std::uint64_t seed);

/// Exact segment sampling of the Wong process (a stationary, mean-square
/// differentiable Gaussian functional of an integrated Wiener process).
/// The truth operator is A = phi + Psi(D) with
///   [phi f](t)    = [e^{-sqrt3 t} + sqrt3 c(t)] f(1)
///   [Psi(D) f](t) = c(t) f'(1),   c(t) = (sqrt3/2) e^{-sqrt3 t}(e^{2t/sqrt3} - 1),
/// where f'(1) is realized by the one-sided finite difference of `derivative`.
SegmentedProcess simulate_wong_segments(int n, const GridPtr& grid, std::uint64_t seed);

/// Cut a scalar path into consecutive curves of grid size.
std::vector<Curve> segment_path(const Vector& path, const GridPtr& grid,
                                bool allow_truncate = false);

/// Spectral radius by repeated squaring of the metric-symmetrized matrix
/// (safe for non-symmetric and nilpotent operators); pass iff radius < 1 - 1e-6.
StationarityReport stationarity_check(const OperatorMatrix& rho);

/// Sufficient invertibility condition for a linear process: sum_j ||a_j|| < 1.
InvertibilityReport invertibility_check(const std::vector<double>& coefficient_norms);

}  // namespace arhlab
