#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lrbms/mesh.hpp"

namespace lrbms {

/// Number of local basis functions for polynomial degree 0 or 1.
constexpr int block_size_for(int order) { return order == 0 ? 1 : 3; }

/// Gauss-Legendre rule on the reference interval [-1/2, 1/2]; weights sum to 1.
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;

    static const GaussRule& get(int num_points);
};

/// Values of the scaled monomial basis {1, xi, eta} at local coordinates
/// xi = (x - b_x)/hx, eta = (y - b_y)/hy in [-1/2, 1/2].
inline std::array<double, 3> basis_values(double xi, double eta) { return {1.0, xi, eta}; }

/// Gradients of {1, xi, eta}; constant on every cell.
inline std::array<Point, 3> basis_gradients(double hx, double hy) {
    return {Point{0.0, 0.0}, Point{1.0 / hx, 0.0}, Point{0.0, 1.0 / hy}};
}

/// Element of the broken polynomial space V_h (degree 0 or 1), stored as one
/// coefficient block per cell in the local basis {1, xi, eta}.
class DgField {
public:
    DgField() = default;
    DgField(int num_cells, int order);

    static DgField constant(int num_cells, int order, double value);

    int order() const { return order_; }
    int block_size() const { return block_size_for(order_); }
    int num_cells() const { return num_cells_; }
    int num_dofs() const { return static_cast<int>(coeffs_.size()); }

    Eigen::VectorXd& coefficients() { return coeffs_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }

    auto block(int cell) { return coeffs_.segment(cell * block_size(), block_size()); }
    auto block(int cell) const { return coeffs_.segment(cell * block_size(), block_size()); }

    /// Cell mean (the constant coefficient).
    double mean(int cell) const { return coeffs_[cell * block_size()]; }
    double slope_x(int cell) const { return order_ == 0 ? 0.0 : coeffs_[cell * 3 + 1]; }
    double slope_y(int cell) const { return order_ == 0 ? 0.0 : coeffs_[cell * 3 + 2]; }

    /// Value at local coordinates of `cell`.
    double local_value(int cell, double xi, double eta) const {
        return order_ == 0 ? coeffs_[cell] : coeffs_[cell * 3] + coeffs_[cell * 3 + 1] * xi +
                                                 coeffs_[cell * 3 + 2] * eta;
    }

    /// Same field represented in degree `order` (degree 0 drops slopes).
    DgField with_order(int order) const;

private:
    int order_ = 1;
    int num_cells_ = 0;
    Eigen::VectorXd coeffs_;
};

/// One value per fine cell (permeability in m^2, porosity).
class CellScalarField {
public:
    CellScalarField() = default;
    explicit CellScalarField(std::vector<double> values) : values_(std::move(values)) {}
    CellScalarField(int num_cells, double value) : values_(num_cells, value) {}

    double operator[](int cell) const { return values_[cell]; }
    double& operator[](int cell) { return values_[cell]; }
    int size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Throws ConfigError unless every value is finite and > 0.
void validate_permeability(const CellScalarField& k, int num_cells);
/// Throws ConfigError unless every value lies in (0, 1].
void validate_porosity(const CellScalarField& phi, int num_cells);

/// Diffusivity weights of a face. On boundary faces a1 = a2 and tau1 = 1.
struct FaceWeights {
    double tau1 = 1.0;
    double tau2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    double harmonic() const { return 2.0 * a1 * a2 / (a1 + a2); }
};

/// How the weighted face mean distributes over the two sides of a face.
enum class MeanWeighting {
    /// tau_l = a_l / (a1 + a2): the larger diffusivity dominates the mean.
    kDiffusivity,
    /// tau_1 = a2 / (a1 + a2), tau_2 = a1 / (a1 + a2): the mean of a grad v becomes
    /// the harmonic mean of a times the arithmetic mean of grad v, which keeps
    /// the form coercive at any contrast.
    kSwip,
};

FaceWeights face_weights(const FineGrid& grid, const CellScalarField& k, int face,
                         MeanWeighting weighting = MeanWeighting::kSwip);

/// Local coordinates of a physical point in a cell.
inline std::array<double, 2> local_coordinates(const FineGrid& grid, int cell, Point p) {
    const Point b = grid.barycenter(cell);
    return {(p.x - b.x) / grid.hx(), (p.y - b.y) / grid.hy()};
}

/// Physical quadrature points and weights (including the face length) on a face.
struct FaceQuadrature {
    std::vector<Point> points;
    std::vector<double> weights;
};
FaceQuadrature face_quadrature(const FineGrid& grid, int face, int num_points = 2);

/// Evaluates a DG field; throws DomainError if `p` is outside the cell's closure.
double evaluate(const FineGrid& grid, const DgField& f, int cell, Point p);

/// Trace of a DG field on side 0 or 1 of a face at a point of the face.
double trace(const FineGrid& grid, const DgField& f, int face, int side, Point p);

struct JumpMean {
    double jump = 0.0;
    double mean = 0.0;
};

/// [f] = f|T1 - f|T2 and {f} = tau1 f|T1 + tau2 f|T2 on an interior face.
/// Throws DomainError on boundary faces.
JumpMean jump_and_mean(const FineGrid& grid, const DgField& f, int face, const FaceWeights& w,
                       Point p);

using ScalarFunction = std::function<double(Point)>;

/// L2 projection onto V_h using tensor Gauss quadrature per cell.
DgField l2_project(const FineGrid& grid, const ScalarFunction& g, int order, int quad_points = 2);

struct BrokenNorms {
    double l2 = 0.0;
    double h1 = 0.0;
};

/// L2 norm and broken H1 norm sqrt(L2^2 + sum_T |grad f|^2_{L2(T)}).
BrokenNorms broken_norms(const FineGrid& grid, const DgField& f);

/// Diagonal of the block mass matrix: |T| * (1, 1/12, 1/12) per cell.
Eigen::VectorXd mass_diagonal(const FineGrid& grid, int order);

/// (f, g)_{L2(Omega)}; both fields must share the degree.
double l2_inner(const FineGrid& grid, const DgField& f, const DgField& g);

/// Error norms against a pointwise function, with `quad_points` Gauss points per
/// direction. `grad` may be empty, in which case h1 is left at zero.
struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};
ErrorNorms error_norms(const FineGrid& grid, const DgField& f, const ScalarFunction& exact,
                       const std::function<Point(Point)>& exact_gradient, int quad_points = 4);

}  // namespace lrbms
