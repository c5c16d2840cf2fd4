#pragma once

#include "arhlab/hilbert.hpp"
#include "arhlab/moments.hpp"
#include "arhlab/process.hpp"
#include "arhlab/reginv.hpp"

#include <span>
#include <vector>

namespace arhlab {

/// Yule-Walker plug-in estimate rho_hat = Delta_n Gamma_n^dagger together
/// with everything needed to predict and to diagnose the fit.
struct ArhEstimate {
    OperatorMatrix rho_hat;
    RegScheme scheme;
    EigenSystem eigens;          // PCA of the centered sample
    Index projector_rank = 0;    // retained rank (cut-off case)
    MomentSet moments;
    Curve mean;                  // added back for prediction
    int n = 0;
};

struct CvCandidate {
    RegScheme scheme;
    double mse = 0.0;
    int evaluations = 0;
};

struct CvReport {
    std::vector<CvCandidate> candidates;
    std::size_t selected = 0;    // index into candidates
    int origin = 0;              // first predicted index (0-based)

    const RegScheme& selected_scheme() const { return candidates[selected].scheme; }
};

struct ResidualSeries {
    std::vector<Curve> residuals;  // eps_hat_k = X_k - prediction(X_{k-1}), k = 2..n
};

struct ChangepointStatistic {
    std::vector<Curve> partial_sums;  // S(t), t = 2..n
    double max_cusum = 0.0;           // max_t || S(t) - (t/n) S(n) || / sqrt(n)
};

struct PredictorCltReport {
    OperatorMatrix error_covariance;  // covariance of sqrt(n/k)(rho_hat - rho Pi_hat)(X_{n+1})
    OperatorMatrix gamma_eps;
    double hs_relative_error = 0.0;
    Index k = 0;
    std::vector<double> first_scores;  // <scaled error, e_1> per replication
};

/// Fit rho_hat on a sample; centers by default and refuses degenerate samples
/// (ker Gamma_n != {0} up to numerical rank 0).
ArhEstimate estimate_rho(std::span<const Curve> sample, const RegScheme& scheme,
                         bool center = true);

/// One-step predictor: mean + rho_hat(x - mean).
Curve predict(const ArhEstimate& est, const Curve& x);

/// Rolling-origin one-step cross-validation; the fit window is [0, t) for each
/// evaluation index t >= ceil(origin_fraction * n). Ties break toward the most
/// regularized candidate (smallest k, largest alpha).
CvReport cross_validate(std::span<const Curve> sample, const std::vector<RegScheme>& candidates,
                        double origin_fraction = 0.75, bool center = true);

ResidualSeries residuals(const ArhEstimate& est, std::span<const Curve> sample);

ChangepointStatistic changepoint_statistic(const ResidualSeries& res);

/// 95%-style critical value for max_cusum, simulated under the fitted null
/// (ARH(1) with rho_hat and noise drawn from the residual covariance).
double changepoint_null_quantile(const ArhEstimate& est, std::span<const Curve> sample,
                                 int reps, double level, std::uint64_t seed);

/// Monte Carlo check of the predictor CLT: the scaled one-step error
/// sqrt(n/k_n)(rho_hat(X_{n+1}) - rho Pi_hat_{k_n}(X_{n+1})) should have
/// covariance close to Gamma_eps.
PredictorCltReport predictor_clt_experiment(const ArhSpec& spec, int n, int reps,
                                            double schedule_c = 1.0);

/// Stack p consecutive curves into product-grid curves Y_k = (X_k, ..., X_{k-p+1}).
std::vector<Curve> companion_embed(std::span<const Curve> sample, int p);

/// Undo companion_embed (recovers X_1..X_n on the base grid).
std::vector<Curve> companion_extract(std::span<const Curve> stacked, int p,
                                     const GridPtr& base);

/// Block (i, j) of an operator on the p-fold product grid, as an operator on
/// the base grid (0-based block indices).
OperatorMatrix companion_block(const OperatorMatrix& op, const GridPtr& base, int p,
                               int block_row, int block_col);

}  // namespace arhlab
