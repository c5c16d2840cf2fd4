#include "arhlab/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace arhlab {

namespace {

constexpr double kGridTol = 1e-12;

Vector trapezoid_weights(const Vector& points) {
    const Index m = points.size();
    Vector w(m);
    w(0) = 0.5 * (points(1) - points(0));
    for (Index i = 1; i + 1 < m; ++i) {
        w(i) = 0.5 * (points(i + 1) - points(i - 1));
    }
    w(m - 1) = 0.5 * (points(m - 1) - points(m - 2));
    return w;
}

}  // namespace

Grid::Grid(Vector points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    const Index m = points_.size();
    if (m < 2) throw std::invalid_argument("Grid: need at least 2 points");
    if (weights_.size() != m) throw std::invalid_argument("Grid: weights/points size mismatch");
    if (std::abs(points_(0)) > kGridTol || std::abs(points_(m - 1) - 1.0) > kGridTol)
        throw std::invalid_argument("Grid: points must span [0,1]");
    for (Index i = 1; i < m; ++i) {
        if (points_(i) <= points_(i - 1))
            throw std::invalid_argument("Grid: points must be strictly increasing");
    }
    if ((weights_.array() <= 0.0).any())
        throw std::invalid_argument("Grid: weights must be strictly positive");
    if (std::abs(weights_.sum() - 1.0) > kGridTol)
        throw std::invalid_argument("Grid: weights must sum to 1");

    const double h = points_(1) - points_(0);
    uniform_ = true;
    for (Index i = 1; i < m; ++i) {
        if (std::abs(points_(i) - points_(i - 1) - h) > 1e-10) {
            uniform_ = false;
            break;
        }
    }
}

GridPtr Grid::uniform(Index m) {
    if (m < 2) throw std::invalid_argument("Grid::uniform: need m >= 2");
    Vector pts = Vector::LinSpaced(m, 0.0, 1.0);
    return GridPtr(new Grid(std::move(pts), trapezoid_weights(Vector::LinSpaced(m, 0.0, 1.0))));
}

GridPtr Grid::from_points(Vector points) {
    Vector w = trapezoid_weights(points);
    return GridPtr(new Grid(std::move(points), std::move(w)));
}

GridPtr Grid::stacked(const GridPtr& base, int blocks) {
    if (blocks < 1) throw std::invalid_argument("Grid::stacked: blocks must be >= 1");
    if (blocks == 1) return base;
    const Index m = base->size();
    Vector pts = Vector::LinSpaced(m * blocks, 0.0, 1.0);
    Vector w(m * blocks);
    for (int b = 0; b < blocks; ++b) {
        w.segment(b * m, m) = base->weights() / static_cast<double>(blocks);
    }
    return GridPtr(new Grid(std::move(pts), std::move(w)));
}

bool Grid::compatible_with(const Grid& other) const {
    if (this == &other) return true;
    if (size() != other.size()) return false;
    return (points_ - other.points_).cwiseAbs().maxCoeff() <= 1e-10 &&
           (weights_ - other.weights_).cwiseAbs().maxCoeff() <= 1e-10;
}

double Grid::step() const {
    if (!uniform_) throw std::invalid_argument("Grid::step: grid is not uniform");
    return points_(1) - points_(0);
}

Curve::Curve(GridPtr g, Vector v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("Curve: null grid");
    if (values.size() != grid->size())
        throw std::invalid_argument("Curve: values length must equal grid size");
    if (!values.allFinite()) throw std::invalid_argument("Curve: values must be finite");
}

Curve zero_curve(const GridPtr& grid) { return Curve(grid, Vector::Zero(grid->size())); }

OperatorMatrix::OperatorMatrix(GridPtr g, Matrix k) : grid(std::move(g)), kernel(std::move(k)) {
    if (!grid) throw std::invalid_argument("OperatorMatrix: null grid");
    if (kernel.rows() != grid->size() || kernel.cols() != grid->size())
        throw std::invalid_argument("OperatorMatrix: kernel must be m x m");
    if (!kernel.allFinite()) throw std::invalid_argument("OperatorMatrix: kernel must be finite");
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what) {
    if (a == b) return;
    if (!a || !b || !a->compatible_with(*b)) {
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
    }
}

double inner_product(const Curve& u, const Curve& v, SpaceKind space) {
    require_same_grid(u.grid, v.grid, "inner_product");
    const double l2 = (u.values.array() * v.values.array() * u.grid->weights().array()).sum();
    if (space == SpaceKind::L2) return l2;
    const Curve du = derivative(u);
    const Curve dv = derivative(v);
    return l2 + (du.values.array() * dv.values.array() * u.grid->weights().array()).sum();
}

double norm(const Curve& u, SpaceKind space) {
    return std::sqrt(std::max(0.0, inner_product(u, u, space)));
}

Curve derivative(const Curve& u) {
    const Index m = u.grid->size();
    if (m < 3) throw std::invalid_argument("derivative: need at least 3 points");
    const double h = u.grid->step();
    const Vector& f = u.values;
    Vector d(m);
    d(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    for (Index i = 1; i + 1 < m; ++i) d(i) = (f(i + 1) - f(i - 1)) / (2.0 * h);
    d(m - 1) = (3.0 * f(m - 1) - 4.0 * f(m - 2) + f(m - 3)) / (2.0 * h);
    return Curve(u.grid, std::move(d));
}

Curve apply_operator(const OperatorMatrix& a, const Curve& x) {
    require_same_grid(a.grid, x.grid, "apply_operator");
    Vector weighted = a.grid->weights().cwiseProduct(x.values);
    return Curve(x.grid, a.kernel * weighted);
}

OperatorMatrix tensor_product(const Curve& u, const Curve& v) {
    require_same_grid(u.grid, v.grid, "tensor_product");
    return OperatorMatrix(u.grid, u.values * v.values.transpose());
}

OperatorMatrix identity_operator(const GridPtr& grid) {
    Matrix k = Matrix::Zero(grid->size(), grid->size());
    k.diagonal() = grid->weights().cwiseInverse();
    return OperatorMatrix(grid, std::move(k));
}

OperatorMatrix zero_operator(const GridPtr& grid) {
    return OperatorMatrix(grid, Matrix::Zero(grid->size(), grid->size()));
}

OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_grid(a.grid, b.grid, "compose");
    return OperatorMatrix(a.grid, a.kernel * a.grid->weights().asDiagonal() * b.kernel);
}

OperatorMatrix adjoint(const OperatorMatrix& a) {
    return OperatorMatrix(a.grid, a.kernel.transpose());
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_grid(a.grid, b.grid, "operator+");
    return OperatorMatrix(a.grid, a.kernel + b.kernel);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_grid(a.grid, b.grid, "operator-");
    return OperatorMatrix(a.grid, a.kernel - b.kernel);
}

OperatorMatrix operator*(double c, const OperatorMatrix& a) {
    return OperatorMatrix(a.grid, c * a.kernel);
}

Matrix action_matrix(const OperatorMatrix& a) {
    return a.kernel * a.grid->weights().asDiagonal();
}

Matrix sym_matrix(const OperatorMatrix& a) {
    Vector d = a.grid->weights().cwiseSqrt();
    return d.asDiagonal() * a.kernel * d.asDiagonal();
}

double hs_norm(const OperatorMatrix& a) {
    return sym_matrix(a).norm();
}

OpNorms op_norms(const OperatorMatrix& a) {
    const Matrix s = sym_matrix(a);
    Eigen::JacobiSVD<Matrix> svd(s);
    const Vector& sv = svd.singularValues();
    OpNorms out;
    out.operator_norm = sv.size() > 0 ? sv(0) : 0.0;
    out.hs_norm = sv.norm();
    out.trace_norm = sv.sum();
    return out;
}

double trace_of(const OperatorMatrix& a) {
    return a.kernel.diagonal().cwiseProduct(a.grid->weights()).sum();
}

Index EigenSystem::positive_count(double floor_rel) const {
    if (count() == 0) return 0;
    const double floor = floor_rel * std::max(eigenvalues(0), 0.0);
    Index k = 0;
    while (k < count() && eigenvalues(k) > floor) ++k;
    return k;
}

EigenSystem eigendecompose(const OperatorMatrix& a, Index rank) {
    const Index m = a.grid->size();
    const double scale = std::max(1.0, a.kernel.cwiseAbs().maxCoeff());
    if ((a.kernel - a.kernel.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("eigendecompose: kernel is not symmetric");

    Matrix s = sym_matrix(a);
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: eigensolver failed");

    // ascending from Eigen; flip to decreasing
    Vector ev = es.eigenvalues().reverse();
    Matrix vecs = es.eigenvectors().rowwise().reverse();

    const double lambda1 = std::max(ev(0), 0.0);
    if (ev(m - 1) < -1e-8 * std::max(lambda1, 1e-300))
        throw std::invalid_argument("eigendecompose: operator is not positive semidefinite");
    ev = ev.cwiseMax(0.0);

    rank = std::min(rank, m);
    if (rank < 1) throw std::invalid_argument("eigendecompose: rank must be >= 1");

    Vector inv_d = a.grid->weights().cwiseSqrt().cwiseInverse();
    EigenSystem out;
    out.grid = a.grid;
    out.eigenvalues = ev.head(rank);
    out.functions = inv_d.asDiagonal() * vecs.leftCols(rank);
    return out;
}

OperatorMatrix reconstruct(const EigenSystem& eig) {
    Matrix k = Matrix::Zero(eig.grid->size(), eig.grid->size());
    for (Index l = 0; l < eig.count(); ++l) {
        k.noalias() += eig.eigenvalues(l) * eig.functions.col(l) * eig.functions.col(l).transpose();
    }
    return OperatorMatrix(eig.grid, std::move(k));
}

Vector eigen_scores(const EigenSystem& eig, const Curve& x) {
    require_same_grid(eig.grid, x.grid, "eigen_scores");
    return eig.functions.transpose() * eig.grid->weights().cwiseProduct(x.values);
}

OperatorMatrix eigen_projector(const EigenSystem& eig, Index k) {
    if (k < 0 || k > eig.count())
        throw std::invalid_argument("eigen_projector: k out of range");
    Matrix kern = Matrix::Zero(eig.grid->size(), eig.grid->size());
    for (Index l = 0; l < k; ++l) {
        kern.noalias() += eig.functions.col(l) * eig.functions.col(l).transpose();
    }
    return OperatorMatrix(eig.grid, std::move(kern));
}

}  // namespace arhlab
