#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lrbms/mesh.hpp"
#include "lrbms/transport.hpp"
#include "support.hpp"

using namespace lrbms;
using namespace lrbms::testing;

namespace {

SideTag inflow_tag() { return {PressureBc::kDirichlet, true}; }

// 1D channel along x with one row of cells, saturation-Dirichlet inflow on the left.
FlowProblem channel(int nx, double k, double phi) {
    BoundarySpec spec = BoundarySpec::uniform({PressureBc::kNoFlow, false});
    spec[Side::kLeft] = inflow_tag();
    spec[Side::kRight] = {PressureBc::kNeumann, false};
    FlowProblem pb = make_problem(nx * 1.0, 1.0, nx, 1, spec, k, phi);
    pb.boundary.saturation[static_cast<int>(Side::kLeft)] = 1.0;
    return pb;
}

FaceFluxField uniform_x(const FineGrid& g, double ux) {
    FaceFluxField u(g.num_faces());
    for (int f = 0; f < g.num_x_faces(); ++f) {
        const Face& face = g.face(f);
        u[f] = ux * face.normal.x;
    }
    return u;
}

TEST(FractionalFlow, PurePhases) {
    EXPECT_EQ(fractional_flow(0.0, 1e-3, 8e-3), 0.0);
    EXPECT_EQ(fractional_flow(1.0, 1e-3, 8e-3), 1.0);
}

TEST(FractionalFlow, EqualViscositiesIsIdentity) {
    for (double s : {0.1, 0.37, 0.9}) EXPECT_NEAR(fractional_flow(s, 2.0, 2.0), s, 1e-15);
}

TEST(FractionalFlow, BenchmarkHalfSaturation) {
    EXPECT_NEAR(fractional_flow(0.5, 0.00130581, 0.008), 0.85968, 1e-5);
}

TEST(FractionalFlow, ClampsOutOfRange) {
    EXPECT_EQ(fractional_flow(-0.2, 1.0, 3.0), 0.0);
    EXPECT_EQ(fractional_flow(1.4, 1.0, 3.0), 1.0);
}

TEST(SaturationStep, StationaryWithoutFlow) {
    FlowProblem pb = make_problem(2.0, 1.0, 4, 2, BoundarySpec::uniform({}));
    std::mt19937_64 rng(1);
    const DgField s = l2_project(pb.grid, [](Point p) { return 0.2 + 0.1 * p.x + 0.05 * p.y; }, 1);
    const DgField next = saturation_step(pb, s, FaceFluxField(pb.grid.num_faces()), 10.0);
    EXPECT_LT((next.coefficients() - s.coefficients()).norm(), 1e-10);
}

TEST(SaturationStep, PiecewiseConstantMatchesFiniteVolumeOracle) {
    // f(s) = s, k = 0: upwind FV plus the penalty exchange sigma_F [s] on each face.
    FlowProblem pb = channel(6, 1e-3, 0.5);
    pb.order = 0;
    const double ux = 0.2;
    const double dt = 0.7;
    const FaceFluxField u = uniform_x(pb.grid, ux);
    DgField s(6, 0);
    s.coefficients() << 0.9, 0.8, 0.3, 0.0, 0.0, 0.1;
    const DgField next = saturation_step(pb, s, u, dt);
    const FineGrid& g = pb.grid;
    const double sigma = 30.0 * 1e-3;
    for (int i = 0; i < 6; ++i) {
        const double in = i == 0 ? 1.0 : s.mean(i - 1);
        const double out = s.mean(i);
        double penalty_flux = 0.0;
        penalty_flux += sigma * (s.mean(i) - in);
        if (i + 1 < 6) penalty_flux += sigma * (s.mean(i) - s.mean(i + 1));
        const double expected =
            s.mean(i) - dt / (0.5 * g.cell_area()) * (g.hy() * ux * (out - in) + penalty_flux);
        EXPECT_NEAR(next.mean(i), expected, 1e-14) << "cell " << i;
    }
}

TEST(SaturationStep, ConservesMassUpToBoundaryTerms) {
    std::mt19937_64 rng(7);
    BoundarySpec spec = BoundarySpec::benchmark();
    FlowProblem pb = make_problem(3.0, 2.0, 6, 4, spec, 1e-2, 0.3);
    pb.porosity = random_field(pb.grid.num_cells(), 0.1, 0.4, rng);
    pb.fluids = Fluids{};
    pb.boundary.saturation[static_cast<int>(Side::kLeft)] = 1.0;
    pb.saturation_source = [](Point p) { return 1e-3 * p.x; };
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        FaceFluxField u(pb.grid.num_faces());
        for (int f = 0; f < pb.grid.num_faces(); ++f) {
            const Face& face = pb.grid.face(f);
            if (face.boundary && pb.grid.tag(face.side).pressure == PressureBc::kNoFlow) continue;
            u[f] = d(rng);
        }
        const DgField s = random_dg(pb.grid.num_cells(), 1, 0.0, 0.4, rng);
        const double dt = 0.01;
        const SaturationStepper stepper(pb);
        const DgField next = stepper.step(s, u, dt);
        double before = 0.0;
        double after = 0.0;
        for (int c = 0; c < pb.grid.num_cells(); ++c) {
            before += pb.porosity[c] * pb.grid.cell_area() * s.mean(c);
            after += pb.porosity[c] * pb.grid.cell_area() * next.mean(c);
        }
        const double change = dt * stepper.mass_change(s, u);
        EXPECT_NEAR(after - before, change, 1e-10 * std::max(1.0, std::abs(before)));
    }
}

TEST(ShockDetector, ContinuousFieldGivesZero) {
    FlowProblem pb = channel(5, 1.0, 1.0);
    const DgField s = l2_project(pb.grid, [](Point p) { return 1.0 - 0.1 * p.x; }, 1);
    for (double d : shock_detector(pb, s, uniform_x(pb.grid, 1.0))) EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(ShockDetector, PureOutflowCellGivesZero) {
    FlowProblem pb = make_problem(1.0, 1.0, 1, 1, BoundarySpec::uniform({PressureBc::kNeumann, false}));
    FaceFluxField u(pb.grid.num_faces());
    for (int f = 0; f < pb.grid.num_faces(); ++f) u[f] = 1.0;
    EXPECT_EQ(shock_detector(pb, DgField::constant(1, 1, 0.3), u)[0], 0.0);
}

TEST(ShockDetector, SingleUpstreamJump) {
    FlowProblem pb = channel(2, 1.0, 1.0);
    DgField s = DgField::constant(2, 1, 0.0);
    s.coefficients()[0] = 0.6;
    s.coefficients()[3] = 0.2;
    FaceFluxField u(pb.grid.num_faces());
    u[pb.grid.x_face(1, 0)] = 1.0;
    const double h = std::sqrt(2.0);
    const double expected = std::abs(0.2 - 0.6) * 1.0 / (0.08 * 2.0 * std::sqrt(h) * 1.0);
    EXPECT_NEAR(shock_detector(pb, s, u)[1], expected, 1e-14);
    EXPECT_EQ(shock_detector(pb, s, u)[0], 0.0);
}

TEST(Limiter, GloballyLinearFieldUntouched) {
    FlowProblem pb = channel(6, 1.0, 1.0);
    pb.boundary.saturation[static_cast<int>(Side::kLeft)] = 0.1;
    const DgField s = l2_project(pb.grid, [](Point p) { return 0.1 + 0.1 * p.x; }, 1);
    LimiterStats stats;
    const DgField out = limit(pb, s, uniform_x(pb.grid, 1.0), &stats);
    EXPECT_EQ(stats.flagged, 0);
    EXPECT_EQ((out.coefficients() - s.coefficients()).norm(), 0.0);
}

TEST(Limiter, LocalExtremumIsFlattened) {
    FlowProblem pb = channel(3, 1.0, 1.0);
    DgField s = DgField::constant(3, 1, 0.5);
    s.coefficients()[3] = 0.9;
    s.coefficients()[4] = 0.5;  // corners reach 1.15
    s.coefficients()[0] = 0.2;
    s.coefficients()[6] = 0.3;
    const DgField out = limit(pb, s, uniform_x(pb.grid, 1.0));
    EXPECT_EQ(out.slope_x(1), 0.0);
    EXPECT_EQ(out.slope_y(1), 0.0);
    EXPECT_EQ(out.mean(1), 0.9);
}

TEST(Limiter, ScalesOvershootingSlopeToNeighbourDifference) {
    FlowProblem pb = channel(3, 1.0, 1.0);
    DgField s = DgField::constant(3, 1, 0.0);
    s.coefficients()[0] = 0.0;
    s.coefficients()[3] = 0.5;
    s.coefficients()[4] = 1.2;  // corners -0.1 and 1.1, g = +-1.2, d = +-0.5
    s.coefficients()[6] = 1.0;
    const DgField out = limit(pb, s, uniform_x(pb.grid, 1.0));
    EXPECT_NEAR(out.slope_x(1), 0.5, 1e-15);
}

TEST(Limiter, PreservesCellMeans) {
    std::mt19937_64 rng(11);
    FlowProblem pb = make_problem(4.0, 2.0, 8, 4, BoundarySpec::benchmark());
    for (int trial = 0; trial < 5; ++trial) {
        const DgField s = random_dg(pb.grid.num_cells(), 1, -0.3, 1.3, rng);
        FaceFluxField u(pb.grid.num_faces());
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int f = 0; f < pb.grid.num_faces(); ++f) u[f] = d(rng);
        LimiterStats stats;
        const DgField out = limit(pb, s, u, &stats);
        EXPECT_GT(stats.flagged, 0);
        for (int c = 0; c < pb.grid.num_cells(); ++c) EXPECT_EQ(out.mean(c), s.mean(c));
    }
}

TEST(CornerRange, HandField) {
    DgField s(2, 1);
    s.coefficients() << 0.5, 0.2, 0.0, 0.1, 0.0, -0.4;
    const auto [lo, hi] = corner_range(s);
    EXPECT_DOUBLE_EQ(lo, -0.1);
    EXPECT_DOUBLE_EQ(hi, 0.6);
}

TEST(RiemannFront, LimitedRunStaysNearUnitInterval) {
    // Benchmark fluids, uniform flow, effective CFL about 0.3.
    FlowProblem pb = channel(40, 1e-12, 0.2);
    pb.fluids = Fluids{};
    const double ux = 1e-4;
    const double dt = 0.3 * 0.2 * 1.0 / (ux * 6.2);
    const FaceFluxField u = uniform_x(pb.grid, ux);
    const SaturationStepper stepper(pb);
    DgField s = DgField::constant(40, 1, 0.0);
    double lo = 0.0;
    double hi = 0.0;
    for (int n = 0; n < 120; ++n) {
        const DgField candidate = stepper.step(s, u, dt);
        s = limit(pb, candidate, u);
        for (int c = 0; c < 40; ++c) ASSERT_NEAR(s.mean(c), candidate.mean(c), 1e-12);
        const auto [l, h] = corner_range(s);
        lo = std::min(lo, l);
        hi = std::max(hi, h);
    }
    EXPECT_GT(s.mean(2), 0.5);
    EXPECT_LT(s.mean(30), 0.05);
    EXPECT_LE(hi, 1.05);
    RecordProperty("min_corner", std::to_string(lo));
}

}  // namespace
