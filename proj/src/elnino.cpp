#include "arhlab/elnino.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace arhlab {

ScalarSeries ingest_monthly_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_monthly_csv: cannot open " + path.string());

    ScalarSeries s;
    std::vector<double> vals;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "year,month,value") {
                throw std::runtime_error(path.string() + ":1: expected header 'year,month,value'");
            }
            continue;
        }
        std::stringstream ss(line);
        std::string ys, ms, vs;
        if (!std::getline(ss, ys, ',') || !std::getline(ss, ms, ',') || !std::getline(ss, vs)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'year,month,value'");
        }
        int year, month;
        double value;
        try {
            year = std::stoi(ys);
            month = std::stoi(ms);
            value = std::stod(vs);
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unparsable row");
        }
        if (month < 1 || month > 12) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": month out of range");
        }
        if (!s.years.empty()) {
            const int py = s.years.back();
            const int pm = s.months.back();
            const bool next = (month == pm + 1 && year == py) || (month == 1 && pm == 12 && year == py + 1);
            if (!next) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": month discontinuity after " + std::to_string(py) +
                                         "-" + std::to_string(pm));
            }
        }
        s.years.push_back(year);
        s.months.push_back(month);
        vals.push_back(value);
    }
    if (vals.empty()) throw std::runtime_error("ingest_monthly_csv: no data rows");
    s.values = Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
    return s;
}

Vector month_positions() { return Vector::LinSpaced(12, 0.0, 1.0); }

std::vector<Curve> series_to_curves(const ScalarSeries& series, const SmoothingConfig& cfg) {
    const int n = series.size();
    if (n % 12 != 0 || series.months.front() != 1 || series.months.back() != 12) {
        throw std::invalid_argument("series_to_curves: series must cover whole years");
    }
    const int years = n / 12;

    std::vector<Curve> out;
    out.reserve(years);
    if (cfg.kind == SmoothingConfig::Kind::None) {
        GridPtr grid = Grid::uniform(12);
        for (int y = 0; y < years; ++y) {
            out.emplace_back(grid, series.values.segment(12 * y, 12).eval());
        }
        return out;
    }

    GridPtr grid = Grid::uniform(cfg.output_points);
    BSplineBasis basis(cfg.basis_dim);
    const Vector at = month_positions();
    const double penalty = cfg.penalty < 0.0 ? 0.0 : cfg.penalty;
    for (int y = 0; y < years; ++y) {
        out.push_back(smooth_to_grid(at, series.values.segment(12 * y, 12), basis, penalty, grid));
    }
    return out;
}

EvalReport evaluate(const Vector& predictions, const Vector& actuals) {
    if (predictions.size() != 12 || actuals.size() != 12) {
        throw std::invalid_argument("evaluate: need 12 predictions and 12 actuals");
    }
    EvalReport rep;
    rep.predictions = predictions;
    rep.actuals = actuals;
    double mse = 0.0, rmae = 0.0;
    for (Index i = 0; i < 12; ++i) {
        const double err = actuals(i) - predictions(i);
        mse += err * err;
        if (std::abs(actuals(i)) < 1e-9) {
            throw std::invalid_argument("evaluate: actual value near zero, RMAE undefined");
        }
        rmae += std::abs(err) / std::abs(actuals(i));
    }
    rep.mse = mse / 12.0;
    rep.rmae_percent = 100.0 * rmae / 12.0;
    return rep;
}

namespace {

std::vector<RegScheme> default_scheme_candidates(const EigenSystem& eig) {
    std::vector<RegScheme> out;
    const Index positive = eig.positive_count(kEigenvalueFloor);
    const Index kmax = std::min<Index>(positive, 6);
    for (Index k = 1; k <= kmax; ++k) out.push_back(RegScheme::cutoff(k));
    // log grid from lambda_1 down to 1e-6 lambda_1
    const double top = eig.eigenvalues(0);
    for (int i = 0; i < 20; ++i) {
        const double alpha = top * std::pow(10.0, -6.0 * i / 19.0);
        out.push_back(RegScheme::penalized(alpha));
        out.push_back(RegScheme::tikhonov(alpha));
    }
    return out;
}

/// Rolling one-step CV scored at the 12 raw month values of the predicted
/// year, the quantity the pipeline is ultimately evaluated on. Scoring
/// against smoothed targets would reward oversmoothing.
CvReport rolling_raw_month_cv(const std::vector<Curve>& curves, const Matrix& raw_months,
                              const std::vector<RegScheme>& candidates,
                              double origin_fraction) {
    const int n = static_cast<int>(curves.size());
    const int origin = std::max(3, static_cast<int>(std::ceil(origin_fraction * n)));
    if (n - origin < 1)
        throw std::invalid_argument("rolling_raw_month_cv: no evaluation points past the origin");
    const Vector at = month_positions();

    CvReport report;
    report.origin = origin;
    report.candidates.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        report.candidates[c].scheme = candidates[c];
    }

    for (int t = origin; t < n; ++t) {
        std::span<const Curve> window(curves.data(), static_cast<std::size_t>(t));
        Curve mean = empirical_mean(window);
        const int lag_one[] = {1};
        MomentSet ms = compute_moments(window, lag_one, true);
        EigenSystem eig =
            functional_pca(ms.cov, std::min<Index>(curves[0].grid->size(), t));
        const Index positive = eig.positive_count(kEigenvalueFloor);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            RegScheme scheme = candidates[c];
            if (scheme.kind == RegScheme::Kind::SpectralCutoff && scheme.k > positive) {
                scheme.k = positive;
            }
            RegularizedInverse inv = reg_inverse(eig, scheme);
            OperatorMatrix rho_hat = compose(ms.crosscov.at(1), inv.op);
            Curve centered(curves[t - 1].grid, curves[t - 1].values - mean.values);
            Curve pred = apply_operator(rho_hat, centered);
            pred.values += mean.values;
            Vector pred12 = interpolate(pred, at);
            report.candidates[c].mse += (pred12 - raw_months.col(t)).squaredNorm() / 12.0;
            report.candidates[c].evaluations += 1;
        }
    }
    for (auto& cand : report.candidates) {
        cand.mse /= std::max(1, cand.evaluations);
    }
    report.selected = 0;
    for (std::size_t c = 1; c < report.candidates.size(); ++c) {
        if (report.candidates[c].mse <
            report.candidates[report.selected].mse - 1e-12) {
            report.selected = c;
        }
    }
    return report;
}

}  // namespace

ElninoResult elnino_pipeline(const ScalarSeries& series, const ElninoConfig& cfg) {
    // split: whole years up to train_end_year for fitting, target year for scoring
    std::vector<int> year_list;
    for (int i = 0; i < series.size(); i += 12) year_list.push_back(series.years[i]);

    ScalarSeries train;
    Vector actual(12);
    bool have_target = false;
    std::vector<double> train_vals;
    for (std::size_t y = 0; y < year_list.size(); ++y) {
        const int year = year_list[y];
        if (year <= cfg.train_end_year) {
            for (int i = 0; i < 12; ++i) {
                train.years.push_back(year);
                train.months.push_back(i + 1);
                train_vals.push_back(series.values(12 * static_cast<Index>(y) + i));
            }
        } else if (year == cfg.target_year) {
            actual = series.values.segment(12 * static_cast<Index>(y), 12);
            have_target = true;
        }
    }
    if (train_vals.size() < 5 * 12) {
        throw std::invalid_argument("elnino_pipeline: insufficient training years");
    }
    if (!have_target) {
        throw std::invalid_argument("elnino_pipeline: target year missing from the series");
    }
    train.values = Eigen::Map<const Vector>(train_vals.data(),
                                            static_cast<Index>(train_vals.size()));

    ElninoResult result;
    for (std::size_t i = 0; i < train.years.size(); i += 12) {
        result.train_years.push_back(train.years[i]);
    }

    const int n_years = static_cast<int>(train.years.size()) / 12;
    Matrix raw_months(12, n_years);
    for (int y = 0; y < n_years; ++y) raw_months.col(y) = train.values.segment(12 * y, 12);

    // Stage 1: smoothing penalty by rolling CV with the default scheme fixed,
    // scored at the raw month values.
    SmoothingConfig smoothing = cfg.smoothing;
    if (smoothing.kind == SmoothingConfig::Kind::PenalizedBasis && smoothing.penalty < 0.0) {
        const RegScheme pilot = RegScheme::cutoff(cutoff_schedule(n_years));
        double best = std::numeric_limits<double>::infinity();
        for (double pen : cfg.penalty_grid) {
            SmoothingConfig trial = smoothing;
            trial.penalty = pen;
            std::vector<Curve> curves = series_to_curves(train, trial);
            CvReport cv = rolling_raw_month_cv(curves, raw_months, {pilot}, 0.75);
            if (cv.candidates[0].mse < best) {
                best = cv.candidates[0].mse;
                smoothing.penalty = pen;
            }
        }
    }
    result.chosen_penalty = smoothing.kind == SmoothingConfig::Kind::PenalizedBasis
                                ? smoothing.penalty
                                : 0.0;

    // Stage 2: regularization scheme by the same rolling CV on the fixed
    // smoothing.
    std::vector<Curve> curves = series_to_curves(train, smoothing);
    {
        MomentSet pilot_moments = compute_moments(curves, std::vector<int>{}, true);
        EigenSystem pilot_eig = functional_pca(pilot_moments.cov,
                                               std::min<Index>(curves[0].grid->size(),
                                                               static_cast<Index>(curves.size())));
        result.scheme_cv = rolling_raw_month_cv(curves, raw_months,
                                                default_scheme_candidates(pilot_eig), 0.75);
    }
    result.chosen_scheme = result.scheme_cv.selected_scheme();

    // Final fit on all training years, one-step prediction of the target year.
    ArhEstimate est = estimate_rho(curves, result.chosen_scheme);
    result.prediction_curve = predict(est, curves.back());

    Vector pred12 = interpolate(result.prediction_curve, month_positions());
    result.report = evaluate(pred12, actual);
    return result;
}

}  // namespace arhlab
