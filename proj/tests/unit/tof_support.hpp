#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/SparseLU>

#include "lrbms/tof.hpp"

namespace lrbms::testing {

inline FaceFluxField uniform_x(const FineGrid& g, double ux) {
    FaceFluxField u(g.num_faces());
    for (int f = 0; f < g.num_x_faces(); ++f) u[f] = ux * g.face(f).normal.x;
    return u;
}

// Random fluxes: inflow on the left, outflow on the right, random signs
// elsewhere, so flow cycles appear.
inline FaceFluxField random_flow(const FineGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.2, 1.0);
    std::bernoulli_distribution flip(0.35);
    FaceFluxField u(g.num_faces());
    for (int f = 0; f < g.num_faces(); ++f) {
        const Face& face = g.face(f);
        if (face.boundary) {
            if (face.side == Side::kLeft) u[f] = -d(rng);
            if (face.side == Side::kRight) u[f] = d(rng);
            continue;
        }
        const double base = face.axis == Axis::kX ? d(rng) : 0.5 * d(rng) - 0.25;
        u[f] = flip(rng) ? -base : base;
    }
    // Closed flow loops are singular; open an exit to the right of every
    // component without one.
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::vector<int>> succ(g.num_cells());
        for (int c = 0; c < g.num_cells(); ++c) {
            for (int f : g.cell_faces(c)) {
                const Face& face = g.face(f);
                const int other = face.cells[0] == c ? face.cells[1] : face.cells[0];
                if (other >= 0 && u.outward(g, f, c) > 0.0) succ[c].push_back(other);
            }
        }
        for (const auto& comp : strongly_connected_components(succ)) {
            bool exit = false;
            int rightmost = comp.front();
            for (int c : comp) {
                for (int f : g.cell_faces(c)) {
                    const Face& face = g.face(f);
                    const int other = face.cells[0] == c ? face.cells[1] : face.cells[0];
                    if (u.outward(g, f, c) <= 0.0) continue;
                    exit = exit || other < 0 || std::find(comp.begin(), comp.end(), other) == comp.end();
                }
                if (g.cell_ij(c)[0] > g.cell_ij(rightmost)[0]) rightmost = c;
            }
            if (exit) continue;
            const auto [i, j] = g.cell_ij(rightmost);
            u[g.x_face(i + 1, j)] = d(rng);
            changed = true;
        }
    }
    return u;
}

// Global sparse matrix of the element equations, solved in one piece.
inline Vector monolithic_tof(const FineGrid& g, const FaceFluxField& u, const CellScalarField& phi) {
    const TofSystem sys = assemble_tof(g, u, phi, 1);
    const int bs = sys.block_size;
    std::vector<Eigen::Triplet<double>> entries;
    auto put = [&](int row_cell, int col_cell, const DenseMatrix& m) {
        for (int r = 0; r < bs; ++r) {
            for (int s = 0; s < bs; ++s) entries.emplace_back(row_cell * bs + r, col_cell * bs + s, m(r, s));
        }
    };
    for (int c = 0; c < g.num_cells(); ++c) {
        put(c, c, sys.diagonal[c]);
        for (const auto& [source, m] : sys.upwind[c]) put(c, source, m);
    }
    Eigen::SparseMatrix<double> a(sys.rhs.size(), sys.rhs.size());
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    return lu.solve(sys.rhs);
}

}  // namespace lrbms::testing
