#pragma once

#include "arhlab/arh.hpp"
#include "arhlab/hilbert.hpp"
#include "arhlab/smoothing.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace arhlab {

/// Gap-free monthly scalar series.
struct ScalarSeries {
    std::vector<int> years;
    std::vector<int> months;  // 1..12
    Vector values;

    int size() const { return static_cast<int>(values.size()); }
};

struct SmoothingConfig {
    enum class Kind { None, PenalizedBasis };
    Kind kind = Kind::PenalizedBasis;
    int basis_dim = 8;
    /// Roughness penalty; negative means "select by rolling cross-validation".
    double penalty = -1.0;
    int output_points = 101;
};

struct EvalReport {
    double mse = 0.0;
    double rmae_percent = 0.0;
    Vector predictions;  // 12 values
    Vector actuals;      // 12 values
};

struct ElninoConfig {
    SmoothingConfig smoothing;
    int train_end_year = 1985;
    int target_year = 1986;
    std::uint64_t seed = 1;
    /// Candidate penalties for the smoothing stage (used when penalty < 0).
    std::vector<double> penalty_grid = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
};

struct ElninoResult {
    EvalReport report;
    CvReport scheme_cv;
    double chosen_penalty = 0.0;
    RegScheme chosen_scheme;
    Curve prediction_curve;   // on the working grid
    std::vector<int> train_years;
};

/// Strict `year,month,value` reader; any gap, duplicate or parse failure is
/// reported with its row number.
ScalarSeries ingest_monthly_csv(const std::filesystem::path& path);

/// One curve per whole calendar year. `None` maps the 12 values onto a
/// 12-point grid; `PenalizedBasis` fits the penalized spline and evaluates it
/// on a finer uniform grid.
std::vector<Curve> series_to_curves(const ScalarSeries& series, const SmoothingConfig& cfg);

/// Month sampling positions of a year on [0,1].
Vector month_positions();

/// MSE and relative mean absolute error (percent) over the 12 months.
EvalReport evaluate(const Vector& predictions, const Vector& actuals);

/// Fit on years <= train_end_year, select smoothing penalty and regularization
/// scheme by rolling CV, predict the target year, score it against the actual
/// monthly values.
ElninoResult elnino_pipeline(const ScalarSeries& series, const ElninoConfig& cfg);

}  // namespace arhlab
