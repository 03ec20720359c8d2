#pragma once

#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/mesh.hpp"
#include "lrbms/problem.hpp"

namespace lrbms {

/// Lowest-order Raviart-Thomas velocity on rectangles: one mean normal
/// velocity u.n per face, signed relative to the face's stored normal.
class FaceFluxField {
public:
    FaceFluxField() = default;
    explicit FaceFluxField(int num_faces) : flux_(num_faces, 0.0) {}
    explicit FaceFluxField(std::vector<double> flux) : flux_(std::move(flux)) {}

    int num_faces() const { return static_cast<int>(flux_.size()); }
    bool empty() const { return flux_.empty(); }
    double operator[](int face) const { return flux_[face]; }
    double& operator[](int face) { return flux_[face]; }
    const std::vector<double>& values() const { return flux_; }

    /// u.n_T on `face` with n_T the outward normal of `cell`.
    double outward(const FineGrid& grid, int face, int cell) const {
        return grid.face(face).cells[0] == cell ? flux_[face] : -flux_[face];
    }
    double max_abs() const;

private:
    std::vector<double> flux_;
};

/// Velocity from pressure and given phase mobilities:
///   |F| u.n = int_F -n.{lambda_t K grad p - K g_rho G} + (sigma/h_F)[p]*,
/// g_rho = lambda_w rho_w + lambda_n rho_n, [p]* = p - p_D on Dirichlet faces.
/// Neumann faces carry the prescribed u_N, no-flow faces 0.
FaceFluxField reconstruct_velocity(const FlowProblem& problem, const DgField& p,
                                   const DgField& lambda_w, const DgField& lambda_n);

/// Same with the linear mobilities of the saturation `s`.
FaceFluxField reconstruct_velocity(const FlowProblem& problem, const DgField& p,
                                   const DgField& s);

/// Per cell: sum_F |F| u.n_T - int_T q1.
std::vector<double> divergence_defect(const FineGrid& grid, const FaceFluxField& u,
                                      const ScalarFunction& q1 = {});

/// Per coarse cell: outgoing flux through the coarse boundary minus int_E q1.
std::vector<double> coarse_flux_balance(const FineGrid& grid, const CoarseGrid& coarse,
                                        const FaceFluxField& u, const ScalarFunction& q1 = {});

/// RT velocity vector at a point of `cell`.
Point velocity_at(const FineGrid& grid, const FaceFluxField& u, int cell, Point p);

/// Largest Euclidean norm of the velocity over the corners of `cell`.
double max_corner_speed(const FineGrid& grid, const FaceFluxField& u, int cell);

/// zeta(T) = |sum_F |F| u.n_T| / max_{dT} |u|; 0 where the velocity is below 1e-14.
std::vector<double> mass_loss(const FineGrid& grid, const FaceFluxField& u);

/// max_F |u.n| dt / (phi_T h_n) over faces and adjacent cells, h_n the cell
/// width normal to the face.
double cfl_number(const FineGrid& grid, const FaceFluxField& u, const CellScalarField& porosity,
                  double dt);

/// Integral of q over every cell with the 2x2 Gauss rule (0 for an empty q).
std::vector<double> cell_integrals(const FineGrid& grid, const ScalarFunction& q);

}  // namespace lrbms
