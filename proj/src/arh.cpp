#include "arhlab/arh.hpp"

#include <algorithm>
#include <cmath>

namespace arhlab {

namespace {

/// Most regularized wins ties: smaller k, then larger alpha; cut-off counts as
/// more regularized than the alpha families only through its own ordering.
bool more_regularized(const RegScheme& a, const RegScheme& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == RegScheme::Kind::SpectralCutoff) return a.k < b.k;
    return a.alpha > b.alpha;
}

}  // namespace

ArhEstimate estimate_rho(std::span<const Curve> sample, const RegScheme& scheme, bool center) {
    const int n = static_cast<int>(sample.size());
    if (n < 3) throw std::invalid_argument("estimate_rho: need at least 3 curves");
    const GridPtr& grid = sample[0].grid;

    ArhEstimate est;
    est.n = n;
    est.mean = center ? empirical_mean(sample) : zero_curve(grid);

    const int lag_one[] = {1};
    est.moments = compute_moments(sample, lag_one, center);

    const Index rank = std::min<Index>(grid->size(), n);
    est.eigens = functional_pca(est.moments.cov, rank);
    if (est.eigens.positive_count(kEigenvalueFloor) == 0) {
        throw std::invalid_argument(
            "estimate_rho: ker Gamma_n is nontrivial (degenerate sample); "
            "the Yule-Walker equation does not identify rho");
    }

    RegularizedInverse inv = reg_inverse(est.eigens, scheme);
    est.rho_hat = compose(est.moments.crosscov.at(1), inv.op);
    est.scheme = scheme;
    est.projector_rank = scheme.kind == RegScheme::Kind::SpectralCutoff
                             ? scheme.k
                             : est.eigens.positive_count(kEigenvalueFloor);
    return est;
}

Curve predict(const ArhEstimate& est, const Curve& x) {
    require_same_grid(est.rho_hat.grid, x.grid, "predict");
    Curve centered(x.grid, x.values - est.mean.values);
    Curve out = apply_operator(est.rho_hat, centered);
    out.values += est.mean.values;
    return out;
}

CvReport cross_validate(std::span<const Curve> sample, const std::vector<RegScheme>& candidates,
                        double origin_fraction, bool center) {
    if (candidates.empty()) throw std::invalid_argument("cross_validate: no candidates");
    const int n = static_cast<int>(sample.size());
    const int origin = std::max(3, static_cast<int>(std::ceil(origin_fraction * n)));
    if (n - origin < 5)
        throw std::invalid_argument("cross_validate: need at least 5 evaluation points past the origin");

    CvReport report;
    report.origin = origin;
    report.candidates.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        report.candidates[c].scheme = candidates[c];
    }

    for (int t = origin; t < n; ++t) {
        std::span<const Curve> window = sample.subspan(0, t);
        // Moments and PCA are shared across candidates at each origin.
        Curve mean = center ? empirical_mean(window) : zero_curve(sample[0].grid);
        const int lag_one[] = {1};
        MomentSet ms = compute_moments(window, lag_one, center);
        EigenSystem eig = functional_pca(ms.cov, std::min<Index>(sample[0].grid->size(), t));
        const Index positive = eig.positive_count(kEigenvalueFloor);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            RegScheme scheme = candidates[c];
            if (scheme.kind == RegScheme::Kind::SpectralCutoff && scheme.k > positive) {
                scheme.k = positive;  // clip to the admissible rank for this window
            }
            RegularizedInverse inv = reg_inverse(eig, scheme);
            OperatorMatrix rho_hat = compose(ms.crosscov.at(1), inv.op);
            Curve centered(sample[t - 1].grid, sample[t - 1].values - mean.values);
            Curve pred = apply_operator(rho_hat, centered);
            pred.values += mean.values;
            Curve err(sample[t].grid, sample[t].values - pred.values);
            report.candidates[c].mse += inner_product(err, err);
            report.candidates[c].evaluations += 1;
        }
    }
    for (auto& cand : report.candidates) {
        cand.mse /= std::max(1, cand.evaluations);
    }

    report.selected = 0;
    for (std::size_t c = 1; c < report.candidates.size(); ++c) {
        const double best = report.candidates[report.selected].mse;
        const double cur = report.candidates[c].mse;
        const double tol = 1e-12 * std::max(1.0, best);
        if (cur < best - tol) {
            report.selected = c;
        } else if (std::abs(cur - best) <= tol &&
                   more_regularized(report.candidates[c].scheme,
                                    report.candidates[report.selected].scheme)) {
            report.selected = c;
        }
    }
    return report;
}

ResidualSeries residuals(const ArhEstimate& est, std::span<const Curve> sample) {
    if (sample.size() < 2) throw std::invalid_argument("residuals: need at least 2 curves");
    ResidualSeries out;
    out.residuals.reserve(sample.size() - 1);
    for (std::size_t k = 1; k < sample.size(); ++k) {
        Curve pred = predict(est, sample[k - 1]);
        out.residuals.emplace_back(sample[k].grid, sample[k].values - pred.values);
    }
    return out;
}

ChangepointStatistic changepoint_statistic(const ResidualSeries& res) {
    const std::size_t len = res.residuals.size();
    if (len < 2) throw std::invalid_argument("changepoint_statistic: need at least 2 residuals");
    const GridPtr& grid = res.residuals[0].grid;

    ChangepointStatistic out;
    out.partial_sums.reserve(len);
    Vector acc = Vector::Zero(grid->size());
    for (const Curve& r : res.residuals) {
        acc += r.values;
        out.partial_sums.emplace_back(grid, acc);
    }
    const Vector& total = out.partial_sums.back().values;
    const double scale = std::sqrt(static_cast<double>(len));
    for (std::size_t i = 0; i < len; ++i) {
        const double frac = static_cast<double>(i + 1) / static_cast<double>(len);
        Curve bridge(grid, out.partial_sums[i].values - frac * total);
        out.max_cusum = std::max(out.max_cusum, norm(bridge) / scale);
    }
    return out;
}

double changepoint_null_quantile(const ArhEstimate& est, std::span<const Curve> sample,
                                 int reps, double level, std::uint64_t seed) {
    if (reps < 20) throw std::invalid_argument("changepoint_null_quantile: need reps >= 20");
    ResidualSeries fitted_res = residuals(est, sample);
    OperatorMatrix gamma_eps_hat = empirical_cov(fitted_res.residuals, 0, true);
    EigenSystem noise_eig =
        eigendecompose(gamma_eps_hat, std::min<Index>(est.rho_hat.grid->size(),
                                                      static_cast<Index>(fitted_res.residuals.size())));

    const int n = static_cast<int>(sample.size());
    std::vector<double> stats;
    stats.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        ArhSpec null_spec{est.rho_hat, NoiseSpec::from_eigensystem(noise_eig, seed + 1 + r)};
        SegmentedProcess sim = simulate_arh1(null_spec, n);
        ArhEstimate refit = estimate_rho(sim.sample, est.scheme);
        ChangepointStatistic cp = changepoint_statistic(residuals(refit, sim.sample));
        stats.push_back(cp.max_cusum);
    }
    std::sort(stats.begin(), stats.end());
    const std::size_t idx = std::min(stats.size() - 1,
                                     static_cast<std::size_t>(std::ceil(level * reps)) - 1);
    return stats[idx];
}

PredictorCltReport predictor_clt_experiment(const ArhSpec& spec, int n, int reps,
                                            double schedule_c) {
    const GridPtr& grid = spec.noise.grid;
    const Index m = grid->size();
    const Index k = std::min<Index>(cutoff_schedule(n, schedule_c), m);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(k));

    PredictorCltReport rep;
    rep.k = k;
    rep.gamma_eps = spec.noise.covariance();
    rep.first_scores.reserve(reps);

    Curve e1 = spec.noise.eigenfunction(0);
    Matrix errors(m, reps);
    for (int r = 0; r < reps; ++r) {
        ArhSpec run = spec;
        run.noise.seed = spec.noise.seed + 7919ULL * static_cast<std::uint64_t>(r + 1);
        SegmentedProcess sim = simulate_arh1(run, n + 1);
        std::span<const Curve> fit_window(sim.sample.data(), static_cast<std::size_t>(n));
        ArhEstimate est = estimate_rho(fit_window, RegScheme::cutoff(k), false);
        const Curve& x_next = sim.sample.back();
        Curve predicted = apply_operator(est.rho_hat, x_next);
        Curve projected = apply_operator(eigen_projector(est.eigens, k), x_next);
        Curve target = apply_operator(spec.rho, projected);
        errors.col(r) = scale * (predicted.values - target.values);
        rep.first_scores.push_back(inner_product(Curve(grid, errors.col(r)), e1));
    }

    Vector mean = errors.rowwise().mean();
    Matrix kern = Matrix::Zero(m, m);
    for (int r = 0; r < reps; ++r) {
        Vector d = errors.col(r) - mean;
        kern.noalias() += d * d.transpose();
    }
    kern /= static_cast<double>(reps);
    rep.error_covariance = OperatorMatrix(grid, std::move(kern));
    rep.hs_relative_error =
        hs_norm(rep.error_covariance - rep.gamma_eps) / hs_norm(rep.gamma_eps);
    return rep;
}

std::vector<Curve> companion_embed(std::span<const Curve> sample, int p) {
    const int n = static_cast<int>(sample.size());
    if (p < 1) throw std::invalid_argument("companion_embed: p must be >= 1");
    if (n < p + 2) throw std::invalid_argument("companion_embed: need n >= p + 2");
    const GridPtr& base = sample[0].grid;
    if (p == 1) return {sample.begin(), sample.end()};

    GridPtr stacked = Grid::stacked(base, p);
    const Index m = base->size();
    std::vector<Curve> out;
    out.reserve(n - p + 1);
    for (int t = p - 1; t < n; ++t) {
        Vector v(m * p);
        for (int j = 0; j < p; ++j) v.segment(j * m, m) = sample[t - j].values;
        out.emplace_back(stacked, std::move(v));
    }
    return out;
}

std::vector<Curve> companion_extract(std::span<const Curve> stacked, int p,
                                     const GridPtr& base) {
    if (stacked.empty()) throw std::invalid_argument("companion_extract: empty sample");
    if (p < 1) throw std::invalid_argument("companion_extract: p must be >= 1");
    if (p == 1) return {stacked.begin(), stacked.end()};
    const Index mp = stacked[0].grid->size();
    if (mp != base->size() * p)
        throw std::invalid_argument("companion_extract: stacked grid is not p copies of base");
    const Index m = base->size();

    std::vector<Curve> out;
    out.reserve(stacked.size() + p - 1);
    // trailing blocks of the first stacked curve hold X_{p-1}..X_1
    for (int j = p - 1; j >= 1; --j) {
        out.emplace_back(base, stacked[0].values.segment(j * m, m).eval());
    }
    for (const Curve& y : stacked) {
        out.emplace_back(base, y.values.head(m).eval());
    }
    return out;
}

OperatorMatrix companion_block(const OperatorMatrix& op, const GridPtr& base, int p,
                               int block_row, int block_col) {
    const Index m = base->size();
    if (op.grid->size() != m * p) throw std::invalid_argument("companion_block: size mismatch");
    if (block_row < 0 || block_row >= p || block_col < 0 || block_col >= p)
        throw std::invalid_argument("companion_block: block index out of range");
    Matrix k = op.kernel.block(block_row * m, block_col * m, m, m) / static_cast<double>(p);
    return OperatorMatrix(base, std::move(k));
}

}  // namespace arhlab
