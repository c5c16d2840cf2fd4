#include "arhlab/mc.hpp"

#include "arhlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace arhlab {

McLlnReport mc_lln_rate(const ArhSpec& spec, int n, int reps) {
    if (reps < 1) throw std::invalid_argument("mc_lln_rate: reps must be >= 1");
    const GridPtr& grid = spec.noise.grid;
    const Matrix act = action_matrix(spec.rho);

    std::vector<double> stats;
    stats.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        ArhSpec run = spec;
        run.noise.seed = spec.noise.seed + 104729ULL * static_cast<std::uint64_t>(r + 1);
        Vector state = Vector::Zero(grid->size());
        Vector sum = Vector::Zero(grid->size());
        for (int k = 0; k < run.burnin + n; ++k) {
            Curve eps = run.noise.draw(static_cast<std::uint64_t>(k));
            state = act * state + eps.values;
            if (k >= run.burnin) sum += state;
        }
        Curve mean(grid, sum / static_cast<double>(n));
        stats.push_back(n * inner_product(mean, mean));
    }

    McLlnReport rep;
    for (double s : stats) rep.estimate += s;
    rep.estimate /= reps;
    double var = 0.0;
    for (double s : stats) var += (s - rep.estimate) * (s - rep.estimate);
    rep.standard_error = reps > 1 ? std::sqrt(var / (reps - 1) / reps) : 0.0;
    rep.wide_variance = reps < 30;

    OperatorMatrix gamma0 = stationary_covariance(spec.rho, spec.noise.covariance());
    rep.longrun = longrun_trace(spec.rho, gamma0);
    rep.ratio = rep.estimate / rep.longrun;
    return rep;
}

double jarque_bera(const std::vector<double>& sample) {
    const int n = static_cast<int>(sample.size());
    if (n < 8) throw std::invalid_argument("jarque_bera: need at least 8 points");
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sample) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    return n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
}

double jarque_bera_critical(int size, double level, int calibration_reps, std::uint64_t seed) {
    std::vector<double> stats;
    stats.reserve(calibration_reps);
    for (int r = 0; r < calibration_reps; ++r) {
        RngStream rng(seed, 0x6a62ULL + static_cast<std::uint64_t>(r));
        std::vector<double> sample(size);
        for (double& v : sample) v = rng.gaussian();
        stats.push_back(jarque_bera(sample));
    }
    std::sort(stats.begin(), stats.end());
    const std::size_t idx = std::min(stats.size() - 1,
                                     static_cast<std::size_t>(std::ceil((1.0 - level) * calibration_reps)) - 1);
    return stats[idx];
}

McCltReport mc_mean_clt(const ArhSpec& spec, int n, int batches, int batch_size,
                        int directions, double level) {
    if (batches < 1 || batch_size < 8)
        throw std::invalid_argument("mc_mean_clt: need batches >= 1 and batch_size >= 8");
    const GridPtr& grid = spec.noise.grid;
    const Matrix act = action_matrix(spec.rho);
    directions = std::min<int>(directions, static_cast<int>(spec.noise.dim()));

    // scores(:, r) = <S_n/sqrt(n), e_p> for replication r
    const int reps = batches * batch_size;
    Matrix scores(directions, reps);
    for (int r = 0; r < reps; ++r) {
        ArhSpec run = spec;
        run.noise.seed = spec.noise.seed + 15485863ULL * static_cast<std::uint64_t>(r + 1);
        Vector state = Vector::Zero(grid->size());
        Vector sum = Vector::Zero(grid->size());
        for (int k = 0; k < run.burnin + n; ++k) {
            Curve eps = run.noise.draw(static_cast<std::uint64_t>(k));
            state = act * state + eps.values;
            if (k >= run.burnin) sum += state;
        }
        Curve scaled(grid, sum / std::sqrt(static_cast<double>(n)));
        for (int p = 0; p < directions; ++p) {
            scores(p, r) = inner_product(scaled, spec.noise.eigenfunction(p));
        }
    }

    // limit variance of <S_n/sqrt(n), e_p> is <Lambda e_p, e_p> with
    // Lambda = (I - rho)^{-1} Gamma_eps (I - rho*)^{-1}; in weighted
    // coordinates <Lambda e, e> = (W e)' R K_eps R' (W e), R = (I - K W)^{-1}
    OperatorMatrix gamma_eps = spec.noise.covariance();
    const Index m = grid->size();
    Matrix resolvent = (Matrix::Identity(m, m) - act).partialPivLu().solve(Matrix::Identity(m, m));
    Matrix lambda_quad = resolvent * gamma_eps.kernel * resolvent.transpose();

    const double crit = jarque_bera_critical(batch_size, level, 4000, spec.noise.seed ^ 0x4a42ULL);

    McCltReport rep;
    rep.batches = batches;
    rep.batch_size = batch_size;
    rep.level = level;
    for (int p = 0; p < directions; ++p) {
        McCltDirection dir;
        Curve ep = spec.noise.eigenfunction(p);
        Vector we = grid->weights().cwiseProduct(ep.values);
        dir.target = we.dot(lambda_quad * we);

        const auto row = scores.row(p);
        const double mean = row.mean();
        double var = 0.0, m4 = 0.0;
        for (int r = 0; r < reps; ++r) {
            const double d = row(r) - mean;
            var += d * d;
            m4 += d * d * d * d;
        }
        var /= (reps - 1);
        m4 /= reps;
        dir.variance = var;
        dir.variance_se = std::sqrt(std::max(0.0, m4 - var * var) / reps);

        int rejections = 0;
        for (int b = 0; b < batches; ++b) {
            std::vector<double> batch(batch_size);
            for (int i = 0; i < batch_size; ++i) batch[i] = row(b * batch_size + i);
            if (jarque_bera(batch) > crit) ++rejections;
        }
        dir.normality_reject_rate = static_cast<double>(rejections) / batches;
        rep.directions.push_back(dir);
    }
    return rep;
}

}  // namespace arhlab
