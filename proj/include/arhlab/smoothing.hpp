#pragma once

#include "arhlab/hilbert.hpp"

namespace arhlab {

/// Cubic B-spline basis with uniform knots on [0,1].
class BSplineBasis {
  public:
    explicit BSplineBasis(int dimension);

    int dimension() const { return dim_; }

    /// Basis values (deriv = 0) or derivative values at x.
    Vector evaluate(double x, int deriv = 0) const;

    /// Design matrix at the given points (rows = points, cols = basis).
    Matrix design(const Vector& points, int deriv = 0) const;

    /// Roughness penalty Omega_ij = int f_i'' f_j'' (Gauss quadrature per
    /// knot interval; exact for cubics).
    Matrix roughness_penalty() const;

  private:
    int dim_;
    Vector knots_;  // clamped: order-fold endpoint knots
};

/// Penalized least-squares fit of noisy point values onto the spline basis:
/// argmin ||B c - y||^2 + penalty * c' Omega c, evaluated on the output grid.
Curve smooth_to_grid(const Vector& sample_points, const Vector& sample_values,
                     const BSplineBasis& basis, double penalty, const GridPtr& out_grid);

/// Linear interpolation of a curve at arbitrary points of [0,1].
Vector interpolate(const Curve& u, const Vector& at);

}  // namespace arhlab
