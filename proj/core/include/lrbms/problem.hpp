#pragma once

#include <algorithm>
#include <array>

#include "lrbms/field.hpp"
#include "lrbms/linalg.hpp"
#include "lrbms/mesh.hpp"

namespace lrbms {

/// Phase densities (kg/m^3) and viscosities (Pa s).
struct Fluids {
    double rho_w = 999.749;
    double rho_n = 890.0;
    double mu_w = 0.00130581;
    double mu_n = 0.008;

    double max_viscosity() const { return std::max(mu_w, mu_n); }
    bool operator==(const Fluids&) const = default;
};

/// Boundary values per side. `pressure[s]` is p_D on Dirichlet sides and the
/// outward normal velocity u_N on Neumann sides; it is ignored on no-flow sides.
/// `saturation[s]` is s_D on saturation-Dirichlet sides.
struct BoundaryData {
    std::array<ScalarFunction, 4> pressure{};
    std::array<double, 4> saturation{0.0, 0.0, 0.0, 0.0};

    double pressure_at(Side s, Point p) const {
        const auto& fn = pressure[static_cast<int>(s)];
        return fn ? fn(p) : 0.0;
    }
    double saturation_at(Side s) const { return saturation[static_cast<int>(s)]; }
};

/// Everything the fine discretization needs: grid, rock, fluids, data and DG options.
struct FlowProblem {
    FineGrid grid;
    CellScalarField permeability{};
    CellScalarField porosity{};
    Fluids fluids{};
    Point gravity{0.0, 0.0};
    BoundaryData boundary{};
    ScalarFunction pressure_source{};   ///< q1; empty means zero
    ScalarFunction saturation_source{}; ///< q2; empty means zero
    int order = 1;
    /// Penalty constant c_F before division by max(mu_w, mu_n).
    double penalty_base = 30.0;
    MeanWeighting mean_weighting = MeanWeighting::kSwip;
    CgOptions cg{};

    bool has_gravity() const { return gravity.x != 0.0 || gravity.y != 0.0; }
    /// Throws ConfigError on inconsistent sizes or invalid rock data.
    void validate() const;
};

/// Default penalty constant 10 k (k + 1) + 10.
inline double default_penalty_base(int order) { return 10.0 * order * (order + 1) + 10.0; }

}  // namespace lrbms
