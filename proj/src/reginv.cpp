#include "arhlab/reginv.hpp"

#include <cmath>

namespace arhlab {

RegScheme RegScheme::cutoff(Index k) {
    if (k < 1) throw std::invalid_argument("RegScheme::cutoff: k must be >= 1");
    RegScheme s;
    s.kind = Kind::SpectralCutoff;
    s.k = k;
    return s;
}

RegScheme RegScheme::penalized(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("RegScheme::penalized: alpha must be positive");
    RegScheme s;
    s.kind = Kind::Penalized;
    s.alpha = alpha;
    return s;
}

RegScheme RegScheme::tikhonov(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("RegScheme::tikhonov: alpha must be positive");
    RegScheme s;
    s.kind = Kind::Tikhonov;
    s.alpha = alpha;
    return s;
}

double RegScheme::multiplier(Index l, double lambda) const {
    switch (kind) {
        case Kind::SpectralCutoff:
            return l < k ? 1.0 / lambda : 0.0;
        case Kind::Penalized:
            return 1.0 / (lambda + alpha);
        case Kind::Tikhonov:
            return lambda / (lambda * lambda + alpha);
    }
    return 0.0;
}

std::string RegScheme::describe() const {
    switch (kind) {
        case Kind::SpectralCutoff: return "cutoff:" + std::to_string(k);
        case Kind::Penalized: return "penalized:" + std::to_string(alpha);
        case Kind::Tikhonov: return "tikhonov:" + std::to_string(alpha);
    }
    return "?";
}

RegularizedInverse reg_inverse(const EigenSystem& eig, const RegScheme& scheme) {
    if (eig.count() == 0) throw std::invalid_argument("reg_inverse: empty eigensystem");
    const Index positive = eig.positive_count(kEigenvalueFloor);
    if (positive == 0) throw std::invalid_argument("reg_inverse: no strictly positive eigenvalues");
    if (scheme.kind == RegScheme::Kind::SpectralCutoff && scheme.k > positive) {
        throw std::invalid_argument("reg_inverse: cutoff k exceeds the positive spectrum; largest admissible k is " +
                                    std::to_string(positive));
    }

    RegularizedInverse out;
    out.scheme = scheme;
    out.source = eig;

    Matrix kern = Matrix::Zero(eig.grid->size(), eig.grid->size());
    double bound = 0.0;
    for (Index l = 0; l < positive; ++l) {
        const double mult = scheme.multiplier(l, eig.eigenvalues(l));
        if (mult == 0.0) continue;
        kern.noalias() += mult * eig.functions.col(l) * eig.functions.col(l).transpose();
        bound = std::max(bound, mult);
    }
    out.op = OperatorMatrix(eig.grid, std::move(kern));
    out.bound = bound;
    return out;
}

PointwiseLimitResult pointwise_limit_check(const EigenSystem& eig, const Curve& x,
                                           const std::vector<RegScheme>& schedule) {
    require_same_grid(eig.grid, x.grid, "pointwise_limit_check");
    const Index positive = eig.positive_count(kEigenvalueFloor);
    Vector scores = eigen_scores(eig, x);

    PointwiseLimitResult res;
    // mass of x outside the strictly positive eigenspan
    Curve recon = zero_curve(x.grid);
    for (Index l = 0; l < positive; ++l) {
        recon.values += scores(l) * eig.functions.col(l);
    }
    const double leftover = norm(Curve(x.grid, x.values - recon.values));
    res.in_domain = leftover <= 1e-8 * std::max(1.0, norm(x));
    if (!res.in_domain) return res;

    for (const RegScheme& s : schedule) {
        double err2 = 0.0;
        for (Index l = 0; l < positive; ++l) {
            const double lambda = eig.eigenvalues(l);
            const double diff = s.multiplier(l, lambda) - 1.0 / lambda;
            err2 += diff * diff * scores(l) * scores(l);
        }
        res.errors.push_back(std::sqrt(err2));
    }
    return res;
}

std::vector<double> domain_diagnostic(const Curve& x, const EigenSystem& eig) {
    require_same_grid(eig.grid, x.grid, "domain_diagnostic");
    const Index positive = eig.positive_count(kEigenvalueFloor);
    Vector scores = eigen_scores(eig, x);
    std::vector<double> sums;
    sums.reserve(positive);
    double acc = 0.0;
    for (Index l = 0; l < positive; ++l) {
        const double ratio = scores(l) / eig.eigenvalues(l);
        acc += ratio * ratio;
        sums.push_back(acc);
    }
    return sums;
}

Index cutoff_schedule(int n, double c) {
    if (n < 2) throw std::invalid_argument("cutoff_schedule: n must be >= 2");
    const double k = std::floor(c * std::pow(static_cast<double>(n), 0.2));
    return std::max<Index>(1, static_cast<Index>(k));
}

}  // namespace arhlab
