#pragma once

#include <cmath>
#include <random>

#include "lrbms/field.hpp"
#include "lrbms/mesh.hpp"
#include "lrbms/problem.hpp"

namespace lrbms::testing {

inline SideTag dirichlet_tag() { return {PressureBc::kDirichlet, false}; }

// Unit viscosities so that lambda_t = 1 for every saturation.
inline Fluids unit_fluids() {
    Fluids f;
    f.mu_w = 1.0;
    f.mu_n = 1.0;
    return f;
}

inline FlowProblem make_problem(double lx, double ly, int nx, int ny, BoundarySpec spec,
                                double k = 1.0, double phi = 1.0) {
    FlowProblem pb{FineGrid(lx, ly, nx, ny, spec),
                   CellScalarField(nx * ny, k),
                   CellScalarField(nx * ny, phi),
                   unit_fluids()};
    return pb;
}

inline void set_pressure(FlowProblem& pb, Side s, ScalarFunction g) {
    pb.boundary.pressure[static_cast<int>(s)] = std::move(g);
}

inline CellScalarField random_field(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    std::vector<double> v(n);
    for (double& x : v) x = std::exp(d(rng));
    return CellScalarField(v);
}

inline DgField random_dg(int cells, int order, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    DgField f(cells, order);
    for (int i = 0; i < f.num_dofs(); ++i) f.coefficients()[i] = d(rng);
    return f;
}

}  // namespace lrbms::testing
