#include "arhlab/moments.hpp"

#include <algorithm>
#include <cmath>

namespace arhlab {

Curve empirical_mean(std::span<const Curve> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical_mean: empty sample");
    Vector acc = Vector::Zero(sample[0].grid->size());
    for (const Curve& x : sample) {
        require_same_grid(x.grid, sample[0].grid, "empirical_mean");
        acc += x.values;
    }
    return Curve(sample[0].grid, acc / static_cast<double>(sample.size()));
}

OperatorMatrix empirical_cov(std::span<const Curve> sample, int lag, bool center) {
    const int n = static_cast<int>(sample.size());
    if (lag < 0) throw std::invalid_argument("empirical_cov: lag must be >= 0");
    if (n <= lag) throw std::invalid_argument("empirical_cov: need n > lag");
    const GridPtr& grid = sample[0].grid;
    const Index m = grid->size();

    Vector mean = Vector::Zero(m);
    if (center) mean = empirical_mean(sample).values;

    Matrix k = Matrix::Zero(m, m);
    for (int t = 0; t + lag < n; ++t) {
        k.noalias() += (sample[t + lag].values - mean) * (sample[t].values - mean).transpose();
    }
    k /= static_cast<double>(n - lag);
    if (lag == 0) k = 0.5 * (k + k.transpose()).eval();
    return OperatorMatrix(grid, std::move(k));
}

MomentSet compute_moments(std::span<const Curve> sample, std::span<const int> lags, bool center) {
    MomentSet ms;
    ms.n = static_cast<int>(sample.size());
    ms.mean = empirical_mean(sample);
    ms.cov = empirical_cov(sample, 0, center);
    for (int h : lags) {
        if (h == 0) continue;
        ms.crosscov.emplace(h, empirical_cov(sample, h, center));
    }
    return ms;
}

EigenSystem functional_pca(const OperatorMatrix& cov, Index rank) {
    return eigendecompose(cov, rank);
}

OperatorMatrix local_cov(std::span<const Curve> sample, const Curve& x_ref,
                         double bandwidth, LocalKernel kernel) {
    if (sample.empty()) throw std::invalid_argument("local_cov: empty sample");
    if (bandwidth <= 0.0) throw std::invalid_argument("local_cov: bandwidth must be positive");
    const GridPtr& grid = sample[0].grid;
    require_same_grid(grid, x_ref.grid, "local_cov");

    auto weight = [&](double u) {
        switch (kernel) {
            case LocalKernel::Gaussian: return std::exp(-0.5 * u * u);
            case LocalKernel::Epanechnikov: return u < 1.0 ? 1.0 - u * u : 0.0;
            case LocalKernel::Flat: return 1.0;
        }
        return 0.0;
    };

    Matrix acc = Matrix::Zero(grid->size(), grid->size());
    double total = 0.0;
    for (const Curve& x : sample) {
        Curve diff(grid, x.values - x_ref.values);
        const double w = weight(norm(diff) / bandwidth);
        if (w == 0.0) continue;
        acc.noalias() += w * x.values * x.values.transpose();
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument(
            "local_cov: all kernel weights vanished; increase the bandwidth");
    }
    return OperatorMatrix(grid, acc / total);
}

double median_pairwise_distance(std::span<const Curve> sample) {
    std::vector<double> d;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            d.push_back(norm(Curve(sample[i].grid, sample[i].values - sample[j].values)));
        }
    }
    if (d.empty()) throw std::invalid_argument("median_pairwise_distance: need >= 2 curves");
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

OperatorMatrix stationary_covariance(const OperatorMatrix& rho, const OperatorMatrix& gamma_eps,
                                     double tol) {
    require_same_grid(rho.grid, gamma_eps.grid, "stationary_covariance");
    StationarityReport st = stationarity_check(rho);
    if (!st.pass) {
        throw std::invalid_argument("stationary_covariance: spectral radius " +
                                    std::to_string(st.radius) + " is not < 1");
    }
    OperatorMatrix total = gamma_eps;
    OperatorMatrix term = gamma_eps;
    OperatorMatrix rho_adj = adjoint(rho);
    for (int k = 1; k <= 10000; ++k) {
        term = compose(rho, compose(term, rho_adj));
        total = total + term;
        if (hs_norm(term) <= tol * hs_norm(total)) break;
    }
    return total;
}

TensorizedDecomposition tensorized_decomposition(std::span<const Curve> sample,
                                                 std::span<const Curve> innovations,
                                                 const OperatorMatrix& rho,
                                                 const OperatorMatrix& gamma_eps) {
    if (sample.size() != innovations.size())
        throw std::invalid_argument("tensorized_decomposition: sample/innovations misaligned");
    if (sample.size() < 2)
        throw std::invalid_argument("tensorized_decomposition: need at least 2 observations");

    TensorizedDecomposition out;
    out.gamma = stationary_covariance(rho, gamma_eps);
    OperatorMatrix rho_adj = adjoint(rho);

    auto z_at = [&](std::size_t i) {
        return tensor_product(sample[i], sample[i]) - out.gamma;
    };

    out.u.reserve(sample.size() - 1);
    OperatorMatrix z_prev = z_at(0);
    for (std::size_t i = 1; i < sample.size(); ++i) {
        Curve rho_x = apply_operator(rho, sample[i - 1]);
        OperatorMatrix u_i = tensor_product(rho_x, innovations[i]) +
                             tensor_product(innovations[i], rho_x) +
                             tensor_product(innovations[i], innovations[i]) - gamma_eps;
        OperatorMatrix z_i = z_at(i);
        OperatorMatrix residual = z_i - compose(rho, compose(z_prev, rho_adj)) - u_i;
        out.max_violation = std::max(out.max_violation, hs_norm(residual));
        out.u.push_back(std::move(u_i));
        z_prev = std::move(z_i);
    }
    return out;
}

double longrun_trace(const OperatorMatrix& rho, const OperatorMatrix& gamma0, double tol) {
    require_same_grid(rho.grid, gamma0.grid, "longrun_trace");
    StationarityReport st = stationarity_check(rho);
    if (!st.pass) {
        throw std::invalid_argument("longrun_trace: spectral radius " +
                                    std::to_string(st.radius) + " is not < 1");
    }
    double total = trace_of(gamma0);
    OperatorMatrix term = gamma0;
    for (int k = 1; k <= 100000; ++k) {
        term = compose(rho, term);
        const double inc = 2.0 * trace_of(term);
        total += inc;
        if (std::abs(inc) < tol) break;
    }
    return total;
}

}  // namespace arhlab
