#include "arhlab/smoothing.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace arhlab {

namespace {

constexpr int kOrder = 4;  // cubic

// Cox-de Boor values of all B-splines at x; derivatives by the standard
// divided-difference recursion on lower-order splines.
Vector bspline_all(const Vector& knots, int n_basis, double x, int deriv) {
    x = std::clamp(x, 0.0, 1.0);

    auto value = [&](const auto& self, int i, int order, double t) -> double {
        if (order == 1) {
            const bool last = t >= 1.0 && std::abs(knots(i + 1) - 1.0) < 1e-14;
            return (t >= knots(i) && t < knots(i + 1)) || last ? 1.0 : 0.0;
        }
        double left = 0.0, right = 0.0;
        const double dl = knots(i + order - 1) - knots(i);
        const double dr = knots(i + order) - knots(i + 1);
        if (dl > 0.0) left = (t - knots(i)) / dl * self(self, i, order - 1, t);
        if (dr > 0.0) right = (knots(i + order) - t) / dr * self(self, i + 1, order - 1, t);
        return left + right;
    };

    auto deriv_value = [&](const auto& self, int i, int order, double t, int d) -> double {
        if (d == 0) return value(value, i, order, t);
        double left = 0.0, right = 0.0;
        const double dl = knots(i + order - 1) - knots(i);
        const double dr = knots(i + order) - knots(i + 1);
        if (dl > 0.0) left = self(self, i, order - 1, t, d - 1) / dl;
        if (dr > 0.0) right = self(self, i + 1, order - 1, t, d - 1) / dr;
        return (order - 1) * (left - right);
    };

    Vector out(n_basis);
    for (int i = 0; i < n_basis; ++i) {
        out(i) = deriv == 0 ? value(value, i, kOrder, x)
                            : deriv_value(deriv_value, i, kOrder, x, deriv);
    }
    return out;
}

}  // namespace

BSplineBasis::BSplineBasis(int dimension) : dim_(dimension) {
    if (dimension < kOrder)
        throw std::invalid_argument("BSplineBasis: dimension must be >= 4 (cubic order)");
    const int interior = dimension - kOrder;
    knots_ = Vector(dimension + kOrder);
    for (int i = 0; i < kOrder; ++i) knots_(i) = 0.0;
    for (int i = 0; i < interior; ++i)
        knots_(kOrder + i) = static_cast<double>(i + 1) / (interior + 1);
    for (int i = 0; i < kOrder; ++i) knots_(dimension + i) = 1.0;
}

Vector BSplineBasis::evaluate(double x, int deriv) const {
    return bspline_all(knots_, dim_, x, deriv);
}

Matrix BSplineBasis::design(const Vector& points, int deriv) const {
    Matrix b(points.size(), dim_);
    for (Index i = 0; i < points.size(); ++i) b.row(i) = evaluate(points(i), deriv).transpose();
    return b;
}

Matrix BSplineBasis::roughness_penalty() const {
    // 3-point Gauss-Legendre per knot span; second derivatives of cubics are
    // linear, so the product is quadratic and the rule is exact.
    static const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    Matrix omega = Matrix::Zero(dim_, dim_);
    for (int span = kOrder - 1; span < dim_; ++span) {
        const double a = knots_(span);
        const double b = knots_(span + 1);
        if (b - a < 1e-14) continue;
        for (int g = 0; g < 3; ++g) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * gp[g];
            const double w = 0.5 * (b - a) * gw[g];
            Vector d2 = evaluate(x, 2);
            omega.noalias() += w * d2 * d2.transpose();
        }
    }
    return omega;
}

Curve smooth_to_grid(const Vector& sample_points, const Vector& sample_values,
                     const BSplineBasis& basis, double penalty, const GridPtr& out_grid) {
    if (sample_points.size() != sample_values.size())
        throw std::invalid_argument("smooth_to_grid: points/values size mismatch");
    if (penalty < 0.0) throw std::invalid_argument("smooth_to_grid: penalty must be >= 0");

    Matrix b = basis.design(sample_points);
    Matrix gram = b.transpose() * b;
    // tiny ridge keeps the system solvable when penalty = 0 and the design is
    // thin; it must scale with the data term only, or large penalties would
    // pull the fit away from the penalty's null space
    const double ridge = 1e-12 * std::max(1.0, gram.diagonal().maxCoeff());
    Matrix lhs = gram + penalty * basis.roughness_penalty();
    lhs.diagonal().array() += ridge;
    Vector coef = lhs.ldlt().solve(b.transpose() * sample_values);

    Matrix out_design = basis.design(out_grid->points());
    return Curve(out_grid, out_design * coef);
}

Vector interpolate(const Curve& u, const Vector& at) {
    const Vector& t = u.grid->points();
    const Vector& v = u.values;
    Vector out(at.size());
    for (Index i = 0; i < at.size(); ++i) {
        const double x = std::clamp(at(i), t(0), t(t.size() - 1));
        Index hi = 1;
        while (hi < t.size() - 1 && t(hi) < x) ++hi;
        const Index lo = hi - 1;
        const double span = t(hi) - t(lo);
        const double frac = span > 0.0 ? (x - t(lo)) / span : 0.0;
        out(i) = (1.0 - frac) * v(lo) + frac * v(hi);
    }
    return out;
}

}  // namespace arhlab
