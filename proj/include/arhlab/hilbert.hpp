#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>

namespace arhlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Discretization of [0,1] with quadrature weights. All curve and operator
/// arithmetic happens in the weighted (quadrature) geometry, so inner
/// products approximate their L^2[0,1] counterparts.
class Grid {
  public:
    /// m uniform points on [0,1] with trapezoidal weights (weights sum to 1).
    static GridPtr uniform(Index m);

    /// Arbitrary strictly increasing points spanning [0,1], trapezoidal weights.
    static GridPtr from_points(Vector points);

    /// Bookkeeping grid for the p-fold product space H^p: blocks of the base
    /// grid laid out consecutively, weights scaled by 1/p. Points are nominal
    /// coordinates; block j of a stacked curve lives at indices [j*m, (j+1)*m).
    static GridPtr stacked(const GridPtr& base, int blocks);

    const Vector& points() const { return points_; }
    const Vector& weights() const { return weights_; }
    Index size() const { return points_.size(); }

    bool compatible_with(const Grid& other) const;
    bool is_uniform() const { return uniform_; }
    /// Spacing of a uniform grid; throws otherwise.
    double step() const;

  private:
    Grid(Vector points, Vector weights);

    Vector points_;
    Vector weights_;
    bool uniform_ = false;
};

enum class SpaceKind { L2, Sobolev21 };

/// One functional observation: values at the grid points.
struct Curve {
    GridPtr grid;
    Vector values;

    Curve() = default;
    Curve(GridPtr g, Vector v);
};

Curve zero_curve(const GridPtr& grid);

/// Kernel of a linear operator on the grid, acting through the quadrature:
/// (A u)(s) = sum_t kernel(s, t) * w_t * u(t).
struct OperatorMatrix {
    GridPtr grid;
    Matrix kernel;

    OperatorMatrix() = default;
    OperatorMatrix(GridPtr g, Matrix k);
};

struct OpNorms {
    double operator_norm;
    double hs_norm;
    double trace_norm;
};

/// Decreasing nonnegative eigenvalues with W-orthonormal eigenfunctions
/// (columns of `functions`).
struct EigenSystem {
    GridPtr grid;
    Vector eigenvalues;   // lambda_1 >= lambda_2 >= ... >= 0
    Matrix functions;     // m x count, column l is e_{l+1}

    Index count() const { return eigenvalues.size(); }
    Curve eigenfunction(Index l) const { return Curve(grid, functions.col(l)); }
    /// Number of eigenvalues above floor_rel * lambda_1.
    Index positive_count(double floor_rel = 1e-12) const;
};

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what);

double inner_product(const Curve& u, const Curve& v, SpaceKind space = SpaceKind::L2);
double norm(const Curve& u, SpaceKind space = SpaceKind::L2);

/// Finite-difference derivative: central in the interior, one-sided
/// second-order at the endpoints. Requires a uniform grid with m >= 3.
Curve derivative(const Curve& u);

Curve apply_operator(const OperatorMatrix& a, const Curve& x);

/// Rank-one operator (u (x) v)(x) = <v, x> u, kernel K(s,t) = u(s) v(t).
OperatorMatrix tensor_product(const Curve& u, const Curve& v);

OperatorMatrix identity_operator(const GridPtr& grid);
OperatorMatrix zero_operator(const GridPtr& grid);

/// Composition A after B.
OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix adjoint(const OperatorMatrix& a);

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(double c, const OperatorMatrix& a);

/// Hilbert-Schmidt norm in the weighted metric (no factorization needed).
double hs_norm(const OperatorMatrix& a);
/// Operator, Hilbert-Schmidt and trace norms via singular values of the
/// metric-symmetrized matrix.
OpNorms op_norms(const OperatorMatrix& a);
/// Quadrature trace: sum_s kernel(s,s) w_s.
double trace_of(const OperatorMatrix& a);

/// Matrix of the operator action on value vectors: kernel * diag(w).
Matrix action_matrix(const OperatorMatrix& a);
/// Metric-symmetrized matrix D K D with D = diag(sqrt(w)); shares the
/// operator's singular values and, for symmetric kernels, its spectrum.
Matrix sym_matrix(const OperatorMatrix& a);

/// Symmetric psd eigendecomposition in the weighted metric. Rejects
/// asymmetric kernels and spectra with eigenvalues below -1e-8 * lambda_1;
/// small negative noise is clamped to zero. Retains the `rank` leading pairs.
EigenSystem eigendecompose(const OperatorMatrix& a, Index rank);

/// Sum of lambda_l e_l (x) e_l over the retained system.
OperatorMatrix reconstruct(const EigenSystem& eig);

/// Coefficients <e_l, x> for l = 1..count.
Vector eigen_scores(const EigenSystem& eig, const Curve& x);

/// Projector onto the first k eigenfunctions.
OperatorMatrix eigen_projector(const EigenSystem& eig, Index k);

}  // namespace arhlab
