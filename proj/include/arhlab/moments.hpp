#pragma once

#include "arhlab/hilbert.hpp"
#include "arhlab/process.hpp"

#include <map>
#include <span>
#include <vector>

namespace arhlab {

/// Empirical first and second moments of a functional sample.
struct MomentSet {
    Curve mean;
    OperatorMatrix cov;                     // Gamma_{n,0}
    std::map<int, OperatorMatrix> crosscov; // Gamma_{n,h} per requested lag
    int n = 0;
};

enum class LocalKernel { Gaussian, Epanechnikov, Flat };

Curve empirical_mean(std::span<const Curve> sample);

/// Lag-h covariance: (1/(n-h)) sum_{t=1..n-h} (X_{t+h} - mean) (x) (X_t - mean);
/// `center = false` drops the mean subtraction.
OperatorMatrix empirical_cov(std::span<const Curve> sample, int lag, bool center = true);

MomentSet compute_moments(std::span<const Curve> sample, std::span<const int> lags,
                          bool center = true);

/// Functional PCA of a covariance operator.
EigenSystem functional_pca(const OperatorMatrix& cov, Index rank);

/// Kernel-weighted covariance emphasizing curves close to x_ref:
/// sum_i [X_i (x) X_i] K(||X_i - x_ref|| / h) / sum_i K(...).
OperatorMatrix local_cov(std::span<const Curve> sample, const Curve& x_ref,
                         double bandwidth, LocalKernel kernel = LocalKernel::Gaussian);

/// Median pairwise L2 distance, the default local_cov bandwidth.
double median_pairwise_distance(std::span<const Curve> sample);

/// Stationary covariance of X_n = rho(X_{n-1}) + eps: sum_k rho^k Gamma_eps rho*^k,
/// truncated when the relative HS increment drops below tol.
OperatorMatrix stationary_covariance(const OperatorMatrix& rho, const OperatorMatrix& gamma_eps,
                                     double tol = 1e-10);

struct TensorizedDecomposition {
    std::vector<OperatorMatrix> u;  // martingale-difference increments u_i
    double max_violation = 0.0;     // max_i || Z_i - R(Z_{i-1}) - u_i ||_HS
    OperatorMatrix gamma;           // stationary Gamma used for Z_i = X_i (x) X_i - Gamma
};

/// Autoregressive decomposition of the tensorized process Z_i = X_i (x) X_i - Gamma:
/// Z_i = R(Z_{i-1}) + u_i with R(S) = rho S rho* and
/// u_i = rho(X_{i-1}) (x) eps_i + eps_i (x) rho(X_{i-1}) + eps_i (x) eps_i - Gamma_eps.
TensorizedDecomposition tensorized_decomposition(std::span<const Curve> sample,
                                                 std::span<const Curve> innovations,
                                                 const OperatorMatrix& rho,
                                                 const OperatorMatrix& gamma_eps);

/// trace(Gamma_0) + 2 sum_{k>=1} trace(rho^k Gamma_0), the limit of n E||S_n/n||^2.
double longrun_trace(const OperatorMatrix& rho, const OperatorMatrix& gamma0,
                     double tol = 1e-12);

}  // namespace arhlab
