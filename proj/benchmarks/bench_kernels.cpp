#include <benchmark/benchmark.h>

#include <cmath>

#include "lrbms/pressure.hpp"
#include "lrbms/rom.hpp"
#include "lrbms/tof.hpp"
#include "lrbms/transport.hpp"
#include "lrbms/velocity.hpp"

using namespace lrbms;

namespace {

// Benchmark layout on an nx-by-ny grid with a smooth permeability contrast.
FlowProblem make_problem(int nx, int ny) {
    FlowProblem pb{.grid = FineGrid(300.0, 60.0, nx, ny, BoundarySpec::benchmark())};
    std::vector<double> k(nx * ny);
    for (int c = 0; c < nx * ny; ++c) {
        const Point b = pb.grid.barycenter(c);
        k[c] = 1e-9 * std::pow(10.0, 0.5 * std::sin(b.x / 40.0) * std::cos(b.y / 15.0));
    }
    pb.permeability = CellScalarField(k);
    pb.porosity = CellScalarField(nx * ny, 0.2);
    pb.boundary.pressure[static_cast<int>(Side::kLeft)] = [](Point) { return 10.0; };
    pb.boundary.pressure[static_cast<int>(Side::kRight)] = [](Point) { return 4e-5; };
    pb.boundary.saturation[static_cast<int>(Side::kLeft)] = 1.0;
    return pb;
}

DgField front(const FineGrid& g) {
    return l2_project(g, [](Point p) { return p.x < 100.0 ? 0.8 : 0.0; }, 1);
}

void BM_PressureAssembly(benchmark::State& state) {
    const FlowProblem pb = make_problem(state.range(0), state.range(0) / 5);
    const PressureAssembler assembler(pb);
    const Mobilities m = linear_mobilities(front(pb.grid), pb.fluids.mu_w, pb.fluids.mu_n);
    for (auto _ : state) benchmark::DoNotOptimize(assembler.system(m.w, m.n));
}
BENCHMARK(BM_PressureAssembly)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PressureSolve(benchmark::State& state) {
    const FlowProblem pb = make_problem(state.range(0), state.range(0) / 5);
    const Mobilities m = linear_mobilities(front(pb.grid), pb.fluids.mu_w, pb.fluids.mu_n);
    const PressureSystem sys = PressureAssembler(pb).system(m.w, m.n);
    for (auto _ : state) benchmark::DoNotOptimize(solve_pressure(pb, sys));
}
BENCHMARK(BM_PressureSolve)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SaturationStep(benchmark::State& state) {
    const FlowProblem pb = make_problem(state.range(0), state.range(0) / 5);
    const DgField s = front(pb.grid);
    const Mobilities m = linear_mobilities(s, pb.fluids.mu_w, pb.fluids.mu_n);
    const DgField p = solve_pressure(pb, PressureAssembler(pb).system(m.w, m.n));
    const FaceFluxField u = reconstruct_velocity(pb, p, m.w, m.n);
    const SaturationStepper stepper(pb);
    for (auto _ : state) benchmark::DoNotOptimize(limit(pb, stepper.step(s, u, 500.0), u));
}
BENCHMARK(BM_SaturationStep)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_TimeOfFlight(benchmark::State& state) {
    const FlowProblem pb = make_problem(state.range(0), state.range(0) / 5);
    const Mobilities m = linear_mobilities(DgField::constant(pb.grid.num_cells(), 1, 0.0),
                                           pb.fluids.mu_w, pb.fluids.mu_n);
    const DgField p = solve_pressure(pb, PressureAssembler(pb).system(m.w, m.n));
    const FaceFluxField u = reconstruct_velocity(pb, p, m.w, m.n);
    for (auto _ : state) benchmark::DoNotOptimize(solve_tof(pb.grid, u, pb.porosity));
}
BENCHMARK(BM_TimeOfFlight)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_OnlineSolve(benchmark::State& state) {
    const FlowProblem pb = make_problem(100, 20);
    const CoarseGrid coarse = build_coarse_grid(pb.grid, 4, 2);
    std::vector<DgField> sats;
    for (double x : {0.0, 50.0, 100.0, 200.0, 300.0}) {
        sats.push_back(l2_project(pb.grid, [x](Point p) { return p.x < x ? 1.0 : 0.0; }, 1));
    }
    const MobilityBasis basis = profiles_from_snapshots(pb.grid, sats, pb.fluids.mu_w, pb.fluids.mu_n);
    GreedyOptions opt;
    opt.max_basis_size = static_cast<int>(state.range(0));
    opt.tolerance = 0.0;
    const GreedyResult g = greedy_build(pb, basis, coarse, sample_training_set(5, 20, 1), opt);
    const ReducedModel model = precompute_offline(pb, coarse, g.bases, basis);
    const OnlineSolver online(model, pb);
    const DgField s = front(pb.grid);
    for (auto _ : state) benchmark::DoNotOptimize(online.solve(s));
    state.counters["N"] = model.size();
}
BENCHMARK(BM_OnlineSolve)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
