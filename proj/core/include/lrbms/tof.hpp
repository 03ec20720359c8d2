#pragma once

#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/linalg.hpp"
#include "lrbms/mesh.hpp"
#include "lrbms/velocity.hpp"

namespace lrbms {

/// Element matrices of the upwind-DG time-of-flight system
///   -int_T tau u.grad psi + int_dT tau^up (u.n) psi = int_T phi psi.
/// `diagonal[T]` couples T with itself, `upwind[T]` lists (neighbour, block) pairs
/// for the inflow faces of T. Inflow boundary values are zero.
struct TofSystem {
    int block_size = 3;
    std::vector<DenseMatrix> diagonal;
    std::vector<std::vector<std::pair<int, DenseMatrix>>> upwind;
    Vector rhs;
};

TofSystem assemble_tof(const FineGrid& grid, const FaceFluxField& u,
                       const CellScalarField& porosity, int order);

struct TofSolution {
    DgField tau;
    /// Strongly connected components in solve order.
    std::vector<std::vector<int>> components;
    int largest_component = 0;
};

/// Flow-ordered solve: cells are visited in a topological order of the
/// upstream-to-downstream graph and flow cycles are solved jointly.
/// Throws DegenerateFlowError when the velocity vanishes or a block is singular.
TofSolution solve_tof_detailed(const FineGrid& grid, const FaceFluxField& u,
                               const CellScalarField& porosity, int order = 1);

DgField solve_tof(const FineGrid& grid, const FaceFluxField& u, const CellScalarField& porosity,
                  int order = 1);

/// Strongly connected components of a directed graph in topological order
/// (every edge leads to the same or a later component).
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& successors);

}  // namespace lrbms
