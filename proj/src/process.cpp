#include "arhlab/process.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace arhlab {

namespace {

constexpr std::uint64_t kNoiseDomain = 0x6e6f697365ULL;  // substream tag

Curve draw_from_basis(const GridPtr& grid, const Matrix& basis, const Vector& gamma,
                      RngStream& rng) {
    Vector coef(gamma.size());
    for (Index p = 0; p < gamma.size(); ++p) coef(p) = std::sqrt(gamma(p)) * rng.gaussian();
    return Curve(grid, basis * coef);
}

}  // namespace

Matrix fourier_basis(const GridPtr& grid, int count) {
    const Vector& t = grid->points();
    Matrix basis(grid->size(), count);
    const double sqrt2 = std::numbers::sqrt2;
    for (int p = 0; p < count; ++p) {
        if (p == 0) {
            basis.col(p).setOnes();
        } else {
            const double freq = 2.0 * std::numbers::pi * ((p + 1) / 2);
            if (p % 2 == 1) {
                basis.col(p) = (freq * t.array()).cos() * sqrt2;
            } else {
                basis.col(p) = (freq * t.array()).sin() * sqrt2;
            }
        }
    }
    return basis;
}

NoiseSpec NoiseSpec::fourier(const GridPtr& grid, int count, double decay, std::uint64_t seed) {
    NoiseSpec spec;
    spec.grid = grid;
    spec.seed = seed;
    spec.eigenfunctions = fourier_basis(grid, count);
    spec.eigenvalues = Vector(count);
    for (int p = 0; p < count; ++p) spec.eigenvalues(p) = std::pow(p + 1.0, -decay);
    return spec;
}

NoiseSpec NoiseSpec::from_eigensystem(const EigenSystem& eig, std::uint64_t seed) {
    const Index k = eig.positive_count();
    if (k == 0) throw std::invalid_argument("NoiseSpec: eigensystem has no positive eigenvalues");
    NoiseSpec spec;
    spec.grid = eig.grid;
    spec.seed = seed;
    spec.eigenvalues = eig.eigenvalues.head(k);
    spec.eigenfunctions = eig.functions.leftCols(k);
    return spec;
}

OperatorMatrix NoiseSpec::covariance() const {
    Matrix k = Matrix::Zero(grid->size(), grid->size());
    for (Index p = 0; p < dim(); ++p) {
        k.noalias() += eigenvalues(p) * eigenfunctions.col(p) * eigenfunctions.col(p).transpose();
    }
    return OperatorMatrix(grid, std::move(k));
}

Curve NoiseSpec::draw(std::uint64_t stream) const {
    RngStream rng(seed ^ kNoiseDomain, stream);
    return draw_from_basis(grid, eigenfunctions, eigenvalues, rng);
}

std::vector<Curve> gen_white_noise(const NoiseSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("gen_white_noise: n must be >= 1");
    std::vector<Curve> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(spec.draw(static_cast<std::uint64_t>(k)));
    return out;
}

std::vector<Curve> simulate_linear_process(const LinearProcessSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("simulate_linear_process: n must be >= 1");
    const GridPtr& grid = spec.noise.grid;
    const int order = static_cast<int>(spec.coefficients.size());
    std::vector<Matrix> action;
    action.reserve(order);
    for (const auto& a : spec.coefficients) {
        require_same_grid(a.grid, grid, "simulate_linear_process");
        action.push_back(action_matrix(a));
    }

    // eps_{1-order} ... eps_n so that X_1 already carries the full window
    std::vector<Curve> eps = gen_white_noise(spec.noise, n + order);
    std::vector<Curve> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        Vector x = eps[k + order].values;
        for (int j = 1; j <= order; ++j) {
            x.noalias() += action[j - 1] * eps[k + order - j].values;
        }
        if (spec.mean) {
            require_same_grid(spec.mean->grid, grid, "simulate_linear_process");
            x += spec.mean->values;
        }
        out.emplace_back(grid, std::move(x));
    }
    return out;
}

SegmentedProcess simulate_arh1(const ArhSpec& spec, int n) {
    return simulate_arh_p({spec.rho}, spec.noise, n, spec.burnin);
}

OperatorMatrix companion_operator(const std::vector<OperatorMatrix>& rhos) {
    const int p = static_cast<int>(rhos.size());
    if (p < 1) throw std::invalid_argument("companion_operator: need at least one operator");
    const GridPtr& base = rhos.front().grid;
    for (const auto& r : rhos) require_same_grid(r.grid, base, "companion_operator");
    if (p == 1) return rhos.front();

    const Index m = base->size();
    GridPtr stacked = Grid::stacked(base, p);
    // Block (i,j) of the stacked kernel represents the operator B_ij through
    // the scaled weights w/p, hence the factor p.
    Matrix k = Matrix::Zero(m * p, m * p);
    for (int j = 0; j < p; ++j) {
        k.block(0, j * m, m, m) = static_cast<double>(p) * rhos[j].kernel;
    }
    OperatorMatrix ident = identity_operator(base);
    for (int i = 1; i < p; ++i) {
        k.block(i * m, (i - 1) * m, m, m) = static_cast<double>(p) * ident.kernel;
    }
    return OperatorMatrix(stacked, std::move(k));
}

SegmentedProcess simulate_arh_p(const std::vector<OperatorMatrix>& rhos,
                                const NoiseSpec& noise, int n, int burnin) {
    if (n < 1) throw std::invalid_argument("simulate_arh_p: n must be >= 1");
    const int p = static_cast<int>(rhos.size());
    OperatorMatrix comp = companion_operator(rhos);
    StationarityReport st = stationarity_check(comp);
    if (!st.pass) {
        throw std::invalid_argument("simulate_arh_p: companion spectral radius " +
                                    std::to_string(st.radius) + " is not < 1");
    }

    const GridPtr& base = noise.grid;
    require_same_grid(rhos.front().grid, base, "simulate_arh_p");
    const Index m = base->size();
    const Matrix act = action_matrix(comp);

    SegmentedProcess out;
    out.sample.reserve(n);
    out.innovations.reserve(n);
    Vector state = Vector::Zero(m * p);
    for (int k = 0; k < burnin + n; ++k) {
        Curve eps = noise.draw(static_cast<std::uint64_t>(k));
        state = act * state;
        state.head(m) += eps.values;
        if (k >= burnin) {
            out.sample.emplace_back(base, state.head(m).eval());
            out.innovations.push_back(std::move(eps));
        }
    }
    out.truth = rhos.size() == 1 ? std::optional<OperatorMatrix>(rhos.front()) : std::nullopt;
    return out;
}

SegmentedProcess simulate_ou_segments(double a, int n, const GridPtr& grid, std::uint64_t seed) {
    if (a <= 0.0) throw std::invalid_argument("simulate_ou_segments: rate a must be positive");
    if (n < 1) throw std::invalid_argument("simulate_ou_segments: n must be >= 1");
    if (!grid->is_uniform()) throw std::invalid_argument("simulate_ou_segments: grid must be uniform");

    const Index m = grid->size();
    const double dt = grid->step();
    const double phi = std::exp(-a * dt);
    const double innov_sd = std::sqrt((1.0 - phi * phi) / (2.0 * a));

    RngStream rng(seed, 0x6f75ULL);
    // stationary start, then exact AR(1) steps along the concatenated axis
    const Index total = static_cast<Index>(n) * (m - 1) + 1;
    Vector path(total);
    path(0) = std::sqrt(1.0 / (2.0 * a)) * rng.gaussian();
    for (Index i = 1; i < total; ++i) path(i) = phi * path(i - 1) + innov_sd * rng.gaussian();

    SegmentedProcess out;
    out.sample.reserve(n);
    out.innovations.reserve(n);
    Vector decay = (-a * grid->points().array()).exp();
    for (int k = 0; k < n; ++k) {
        Vector seg = path.segment(static_cast<Index>(k) * (m - 1), m);
        Vector innov = seg - decay * seg(0);  // X_k(t) - e^{-a t} X_{k-1}(1)
        out.sample.emplace_back(grid, std::move(seg));
        out.innovations.emplace_back(grid, std::move(innov));
    }

    Matrix kernel = Matrix::Zero(m, m);
    kernel.col(m - 1) = decay / grid->weights()(m - 1);
    out.truth = OperatorMatrix(grid, std::move(kernel));
    return out;
}

SegmentedProcess simulate_wong_segments(int n, const GridPtr& grid, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_wong_segments: n must be >= 1");
    if (!grid->is_uniform()) throw std::invalid_argument("simulate_wong_segments: grid must be uniform");
    if (grid->size() < 3)
        throw std::invalid_argument("simulate_wong_segments: need at least 3 grid points");

    const Index m = grid->size();
    const double dt = grid->step();
    const double sqrt3 = std::numbers::sqrt3;

    // State (xi, zeta) with zeta = sqrt3 U^{-1/2} w_U, U(tau) = exp(2 tau / sqrt3).
    // Both are stationary; the update over one step is linear with a bivariate
    // Gaussian innovation whose covariance follows from the Wiener integrals:
    //   xi'   = r^{3/2} xi + r^{1/2}(1-r) zeta + n1,   Var n1 = (1-r)^3
    //   zeta' = r^{1/2} zeta + n2,                     Var n2 = 3(1-r)
    //   Cov(n1, n2) = (3/2)(1-r)^2,   r = exp(-2 dt / sqrt3).
    const double r = std::exp(-2.0 * dt / sqrt3);
    const double v1 = (1.0 - r) * (1.0 - r) * (1.0 - r);
    const double v2 = 3.0 * (1.0 - r);
    const double c12 = 1.5 * (1.0 - r) * (1.0 - r);
    const double l11 = std::sqrt(v1);
    const double l21 = c12 / l11;
    const double l22 = std::sqrt(std::max(0.0, v2 - l21 * l21));

    RngStream rng(seed, 0x776f6e67ULL);
    const Index total = static_cast<Index>(n) * (m - 1) + 1;
    Vector xi(total), zeta(total);
    // stationary initial law: Var xi = 1, Var zeta = 3, Cov = 3/2
    {
        const double z1 = rng.gaussian();
        const double z2 = rng.gaussian();
        xi(0) = z1;
        zeta(0) = 1.5 * z1 + std::sqrt(0.75) * z2;
    }
    const double a11 = std::pow(r, 1.5);
    const double a12 = std::sqrt(r) * (1.0 - r);
    const double a22 = std::sqrt(r);
    for (Index i = 1; i < total; ++i) {
        const double z1 = rng.gaussian();
        const double z2 = rng.gaussian();
        xi(i) = a11 * xi(i - 1) + a12 * zeta(i - 1) + l11 * z1;
        zeta(i) = a22 * zeta(i - 1) + l21 * z1 + l22 * z2;
    }

    const Vector& t = grid->points();
    Vector e3 = (-sqrt3 * t.array()).exp();
    Vector c = 0.5 * sqrt3 * e3.array() * ((2.0 / sqrt3 * t.array()).exp() - 1.0);

    SegmentedProcess out;
    out.sample.reserve(n);
    out.innovations.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Index off = static_cast<Index>(k) * (m - 1);
        Vector seg = xi.segment(off, m);
        // exact innovation via the state at the left junction:
        // xi' = -sqrt3 xi + (2/sqrt3) zeta
        const double f1 = xi(off);
        const double f1p = -sqrt3 * xi(off) + (2.0 / sqrt3) * zeta(off);
        Vector fitted = (e3.array() + sqrt3 * c.array()) * f1 + c.array() * f1p;
        out.sample.emplace_back(grid, std::move(seg));
        out.innovations.emplace_back(grid, (xi.segment(off, m) - fitted).eval());
    }

    // A = phi + Psi(D) as a kernel: the f(1) part loads the last column, the
    // c(t) f'(1) part loads the one-sided difference stencil at the endpoint.
    Matrix kernel = Matrix::Zero(m, m);
    const Vector& w = grid->weights();
    kernel.col(m - 1) += ((e3.array() + sqrt3 * c.array()) / w(m - 1)).matrix();
    kernel.col(m - 1) += (c.array() * (3.0 / (2.0 * dt)) / w(m - 1)).matrix();
    kernel.col(m - 2) += (c.array() * (-4.0 / (2.0 * dt)) / w(m - 2)).matrix();
    kernel.col(m - 3) += (c.array() * (1.0 / (2.0 * dt)) / w(m - 3)).matrix();
    out.truth = OperatorMatrix(grid, std::move(kernel));
    return out;
}

std::vector<Curve> segment_path(const Vector& path, const GridPtr& grid, bool allow_truncate) {
    const Index m = grid->size();
    const Index whole = path.size() / m;
    if (whole < 1) throw std::invalid_argument("segment_path: path shorter than one segment");
    if (path.size() % m != 0 && !allow_truncate)
        throw std::invalid_argument("segment_path: length is not a multiple of the grid size");
    std::vector<Curve> out;
    out.reserve(whole);
    for (Index k = 0; k < whole; ++k) {
        out.emplace_back(grid, path.segment(k * m, m).eval());
    }
    return out;
}

StationarityReport stationarity_check(const OperatorMatrix& rho) {
    // Gelfand: ||rho^(2^j)||^(1/2^j) -> spectral radius. Repeated squaring of
    // the symmetrized matrix with Frobenius rescaling; 12 squarings put the
    // polynomial prefactor within ~0.2%.
    Matrix s = sym_matrix(rho);
    double log_norm = 0.0;
    double power = 1.0;
    StationarityReport rep;
    for (int j = 0; j < 12; ++j) {
        const double norm = s.norm();
        if (norm == 0.0 || !std::isfinite(norm)) {
            rep.radius = norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            rep.pass = norm == 0.0;
            return rep;
        }
        log_norm += std::log(norm) / power;
        s = ((s / norm) * (s / norm)).eval();
        power *= 2.0;
    }
    log_norm += std::log(s.norm()) / power;
    rep.radius = std::exp(log_norm);
    rep.pass = rep.radius < 1.0 - 1e-6;
    return rep;
}

InvertibilityReport invertibility_check(const std::vector<double>& coefficient_norms) {
    double total = 0.0;
    for (double v : coefficient_norms) {
        if (v < 0.0) throw std::invalid_argument("invertibility_check: norms must be nonnegative");
        total += v;
    }
    InvertibilityReport rep;
    rep.margin = 1.0 - total;
    rep.pass = total < 1.0;
    return rep;
}

}  // namespace arhlab
