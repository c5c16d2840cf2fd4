#pragma once

#include "arhlab/hilbert.hpp"

#include <string>
#include <vector>

namespace arhlab {

/// Bounded surrogates for the unbounded inverse of a covariance operator.
/// Multipliers on the eigendirections:
///   spectral cut-off : 1/lambda_l for l <= k, 0 beyond
///   penalized        : 1/(lambda_l + alpha)
///   Tikhonov         : lambda_l/(lambda_l^2 + alpha)
struct RegScheme {
    enum class Kind { SpectralCutoff, Penalized, Tikhonov };

    Kind kind = Kind::SpectralCutoff;
    Index k = 1;          // cut-off rank
    double alpha = 0.0;   // penalization level

    static RegScheme cutoff(Index k);
    static RegScheme penalized(double alpha);
    static RegScheme tikhonov(double alpha);

    /// Multiplier applied to the l-th eigendirection (0-based).
    double multiplier(Index l, double lambda) const;

    std::string describe() const;
};

/// Relative floor below which empirical eigenvalues are treated as zero.
inline constexpr double kEigenvalueFloor = 1e-12;

struct RegularizedInverse {
    OperatorMatrix op;        // Gamma-dagger
    RegScheme scheme;
    EigenSystem source;       // eigensystem the inverse was built from
    double bound = 0.0;       // operator norm of Gamma-dagger on the retained span
};

/// Build Gamma-dagger in the eigenbasis according to the scheme. For the
/// cut-off the rank must not exceed the count of eigenvalues above the floor;
/// the error message carries the largest admissible k.
RegularizedInverse reg_inverse(const EigenSystem& eig, const RegScheme& scheme);

struct PointwiseLimitResult {
    std::vector<double> errors;  // || Gamma-dagger x - Gamma^{-1} x || per scheme
    bool in_domain = false;      // x carried by the strictly positive eigenspace
};

/// Errors of Gamma-dagger x against the exact inverse on the positive
/// eigenspan, along a schedule of schemes (k increasing or alpha decreasing).
PointwiseLimitResult pointwise_limit_check(const EigenSystem& eig, const Curve& x,
                                           const std::vector<RegScheme>& schedule);

/// Partial sums of x_p^2 / lambda_p^2; rapid growth signals that x leaves the
/// practical domain of Gamma^{-1}.
std::vector<double> domain_diagnostic(const Curve& x, const EigenSystem& eig);

/// k_n = max(1, floor(c * n^{1/5})), a schedule satisfying k_n = o(n^{1/4}/log n).
Index cutoff_schedule(int n, double c = 1.0);

}  // namespace arhlab
