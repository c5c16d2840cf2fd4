#pragma once

#include "arhlab/moments.hpp"
#include "arhlab/process.hpp"

#include <vector>

namespace arhlab {

struct McLlnReport {
    double estimate = 0.0;       // Monte Carlo n E||S_n/n||^2
    double standard_error = 0.0;
    double longrun = 0.0;        // analytic longrun_trace target
    double ratio = 0.0;
    bool wide_variance = false;  // flagged when reps are too few to trust the SE
};

struct McCltDirection {
    double variance = 0.0;        // empirical variance of <S_n/sqrt(n), e_p>
    double variance_se = 0.0;
    double target = 0.0;          // (I - rho)^{-1}-form limit variance
    double normality_reject_rate = 0.0;  // share of batches rejected at the level
};

struct McCltReport {
    std::vector<McCltDirection> directions;
    int batches = 0;
    int batch_size = 0;
    double level = 0.01;
};

/// Monte Carlo check of n E||S_n/n||^2 against the long-run trace.
McLlnReport mc_lln_rate(const ArhSpec& spec, int n, int reps);

/// Jarque-Bera statistic of a sample.
double jarque_bera(const std::vector<double>& sample);

/// Critical value of Jarque-Bera at `level` for samples of `size`, calibrated
/// on Gaussian draws (the chi-squared asymptotics are poor at small sizes).
double jarque_bera_critical(int size, double level, int calibration_reps,
                            std::uint64_t seed);

/// CLT check for the mean: projected scores of S_n/sqrt(n) on the leading
/// noise eigenfunctions, their variances against the closed-form targets, and
/// a calibrated normality rejection rate over batches.
McCltReport mc_mean_clt(const ArhSpec& spec, int n, int batches, int batch_size,
                        int directions = 3, double level = 0.01);

}  // namespace arhlab
