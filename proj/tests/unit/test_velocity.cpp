#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lrbms/mesh.hpp"
#include "lrbms/mobility.hpp"
#include "lrbms/pressure.hpp"
#include "lrbms/velocity.hpp"
#include "support.hpp"

using namespace lrbms;
using namespace lrbms::testing;

namespace {

DgField solve_unit_mobility(const FlowProblem& pb) {
    const DgField one = DgField::constant(pb.grid.num_cells(), pb.order, 1.0);
    const DgField zero = DgField::constant(pb.grid.num_cells(), pb.order, 0.0);
    return solve_pressure(pb, PressureAssembler(pb).system(one, zero));
}

FaceFluxField unit_mobility_velocity(const FlowProblem& pb, const DgField& p) {
    const DgField one = DgField::constant(pb.grid.num_cells(), pb.order, 1.0);
    const DgField zero = DgField::constant(pb.grid.num_cells(), pb.order, 0.0);
    return reconstruct_velocity(pb, p, one, zero);
}

// Left p = 1, right p = 0, no-flow top and bottom.
FlowProblem channel(int nx, int ny, double k) {
    BoundarySpec spec = BoundarySpec::uniform({PressureBc::kNoFlow, false});
    spec[Side::kLeft] = dirichlet_tag();
    spec[Side::kRight] = dirichlet_tag();
    FlowProblem pb = make_problem(1.0, 1.0, nx, ny, spec, k);
    set_pressure(pb, Side::kLeft, [](Point) { return 1.0; });
    set_pressure(pb, Side::kRight, [](Point) { return 0.0; });
    return pb;
}

double flux_scale(const FineGrid& g, const FaceFluxField& u) {
    double s = 0.0;
    for (int f = 0; f < g.num_faces(); ++f) s = std::max(s, std::abs(u[f]) * g.face(f).length);
    return s;
}

TEST(ReconstructVelocity, UniformChannelFlow) {
    const FlowProblem pb = channel(4, 3, 2.0);
    const FaceFluxField u = unit_mobility_velocity(pb, solve_unit_mobility(pb));
    for (int f = 0; f < pb.grid.num_faces(); ++f) {
        const Face& face = pb.grid.face(f);
        const double expected = 2.0 * face.normal.x;
        EXPECT_NEAR(u[f], expected, 1e-8) << "face " << f;
    }
}

TEST(ReconstructVelocity, NeumannFacesCarryPrescribedRate) {
    FlowProblem pb = make_problem(3.0, 1.0, 6, 2, BoundarySpec::benchmark());
    set_pressure(pb, Side::kLeft, [](Point) { return 1.0; });
    set_pressure(pb, Side::kRight, [](Point p) { return 0.5 + p.y; });
    const FaceFluxField u = unit_mobility_velocity(pb, solve_unit_mobility(pb));
    for (int j = 0; j < 2; ++j) {
        const int f = pb.grid.x_face(6, j);
        EXPECT_NEAR(u[f], 0.5 + pb.grid.face(f).center.y, 1e-14);
    }
    for (int i = 0; i < 6; ++i) {
        EXPECT_EQ(u[pb.grid.y_face(i, 0)], 0.0);
        EXPECT_EQ(u[pb.grid.y_face(i, 2)], 0.0);
    }
}

TEST(ReconstructVelocity, LocallyConservativeOnRandomScenarios) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        BoundarySpec spec = BoundarySpec::benchmark();
        FlowProblem pb = make_problem(2.0, 1.0, 8, 5, spec);
        pb.permeability = random_field(pb.grid.num_cells(), 1e-3, 1.0, rng);
        pb.fluids = Fluids{};
        // The identity holds up to the algebraic residual of the solve.
        pb.cg = CgOptions{1e-14, 20000};
        std::uniform_real_distribution<double> d(0.5, 2.0);
        const double pl = d(rng);
        const double un = 0.1 * d(rng);
        const double q = d(rng);
        set_pressure(pb, Side::kLeft, [pl](Point) { return pl; });
        set_pressure(pb, Side::kRight, [un](Point) { return un; });
        pb.pressure_source = [q](Point p) { return q * p.x * p.y; };
        const DgField s = random_dg(pb.grid.num_cells(), 1, 0.0, 0.3, rng);
        const Mobilities mob = linear_mobilities(s, pb.fluids.mu_w, pb.fluids.mu_n);
        const DgField p = solve_pressure(pb, PressureAssembler(pb).system(mob.w, mob.n));
        const FaceFluxField u = reconstruct_velocity(pb, p, mob.w, mob.n);
        const double scale = flux_scale(pb.grid, u);
        for (double defect : divergence_defect(pb.grid, u, pb.pressure_source)) {
            EXPECT_LE(std::abs(defect), 1e-10 * scale) << "trial " << trial;
        }
    }
}

TEST(ReconstructVelocity, GravityOnlyColumnIsAtRest) {
    // Hydrostatic column: p = rho g y balances gravity, so the flux vanishes.
    BoundarySpec spec = BoundarySpec::uniform({PressureBc::kNoFlow, false});
    spec[Side::kTop] = dirichlet_tag();
    FlowProblem pb = make_problem(1.0, 2.0, 2, 4, spec);
    pb.gravity = {0.0, -1.0};
    pb.fluids.rho_w = 3.0;
    set_pressure(pb, Side::kTop, [](Point p) { return -3.0 * p.y; });
    const DgField one = DgField::constant(pb.grid.num_cells(), 1, 1.0);
    const DgField zero = DgField::constant(pb.grid.num_cells(), 1, 0.0);
    const DgField p = solve_pressure(pb, PressureAssembler(pb).system(one, zero));
    const FaceFluxField u = reconstruct_velocity(pb, p, one, zero);
    EXPECT_LT(u.max_abs(), 1e-8);
}

TEST(DivergenceDefect, TwoCellHandCase) {
    const FineGrid g(2.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    FaceFluxField u(g.num_faces());
    u[g.x_face(0, 0)] = -1.0;  // inflow 1 through the left side
    u[g.x_face(1, 0)] = 0.25;
    u[g.x_face(2, 0)] = 0.5;
    const auto d = divergence_defect(g, u);
    EXPECT_DOUBLE_EQ(d[0], -1.0 + 0.25);
    EXPECT_DOUBLE_EQ(d[1], -0.25 + 0.5);
    const auto with_source = divergence_defect(g, u, [](Point) { return 2.0; });
    EXPECT_NEAR(with_source[0], -0.75 - 2.0, 1e-14);
}

TEST(CoarseFluxBalance, SumsFineDefects) {
    const FineGrid g(4.0, 2.0, 4, 2, BoundarySpec::uniform({}));
    const CoarseGrid c = build_coarse_grid(g, 2, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    FaceFluxField u(g.num_faces());
    for (int f = 0; f < g.num_faces(); ++f) u[f] = d(rng);
    const auto fine = divergence_defect(g, u);
    const auto coarse = coarse_flux_balance(g, c, u);
    for (int e = 0; e < c.num_cells(); ++e) {
        double sum = 0.0;
        for (int cell : c.cells_of(e)) sum += fine[cell];
        EXPECT_NEAR(coarse[e], sum, 1e-14);
    }
}

TEST(VelocityAt, InterpolatesFaceValues) {
    const FineGrid g(2.0, 1.0, 1, 1, BoundarySpec::uniform({}));
    FaceFluxField u(g.num_faces());
    u[g.x_face(0, 0)] = -1.0;  // outward normal -x: u.x = 1
    u[g.x_face(1, 0)] = 3.0;
    u[g.y_face(0, 0)] = 0.0;
    u[g.y_face(0, 1)] = 2.0;
    const Point mid = velocity_at(g, u, 0, {1.0, 0.5});
    EXPECT_DOUBLE_EQ(mid.x, 2.0);
    EXPECT_DOUBLE_EQ(mid.y, 1.0);
    const Point corner = velocity_at(g, u, 0, {2.0, 1.0});
    EXPECT_DOUBLE_EQ(corner.x, 3.0);
    EXPECT_DOUBLE_EQ(corner.y, 2.0);
    EXPECT_DOUBLE_EQ(max_corner_speed(g, u, 0), std::sqrt(13.0));
}

TEST(MassLoss, ZeroForConservativeAndGuardedForRest) {
    const FineGrid g(1.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    FaceFluxField u(g.num_faces());
    EXPECT_EQ(mass_loss(g, u)[0], 0.0);
    for (int j = 0; j < 1; ++j) {
        for (int i = 0; i <= 2; ++i) u[g.x_face(i, j)] = i == 0 ? -1.0 : 1.0;
    }
    const auto zeta = mass_loss(g, u);
    EXPECT_NEAR(zeta[0], 0.0, 1e-15);
    EXPECT_NEAR(zeta[1], 0.0, 1e-15);
    u[g.x_face(2, 0)] = 3.0;
    // cell 1: outflow 3 * 1 minus inflow 1 * 1 over max corner speed 3
    EXPECT_NEAR(mass_loss(g, u)[1], 2.0 / 3.0, 1e-14);
}

TEST(CflNumber, HandValue) {
    const FineGrid g(4.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    FaceFluxField u(g.num_faces());
    u[g.x_face(1, 0)] = 0.5;
    const CellScalarField phi(std::vector<double>{0.25, 0.5});
    EXPECT_DOUBLE_EQ(cfl_number(g, u, phi, 2.0), 0.5 * 2.0 / (0.25 * 2.0));
}

TEST(CellIntegrals, AffineSourceIsExact) {
    const FineGrid g(2.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    const auto q = cell_integrals(g, [](Point p) { return p.x + 2.0 * p.y; });
    EXPECT_NEAR(q[0], 0.5 + 1.0, 1e-14);
    EXPECT_NEAR(q[1], 1.5 + 1.0, 1e-14);
    EXPECT_EQ(cell_integrals(g, {})[1], 0.0);
}

}  // namespace
