#include "app/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "app/output.hpp"
#include "app/scenario.hpp"
#include "lrbms/error.hpp"
#include "lrbms/parallel.hpp"
#include "lrbms/tof.hpp"

namespace lrbms::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing: " + path);
}

std::string in_dir(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<NamedValues> final_fields(const Trajectory& run) {
    std::vector<NamedValues> cells{{"saturation", cell_means(run.saturation.back())}};
    if (!run.pressure.empty()) cells.push_back({"pressure", cell_means(run.pressure.back())});
    return cells;
}

void write_run(const std::string& dir, const std::string& tag, const FlowProblem& pb,
               const Scenario& sc, const Trajectory& run) {
    save_trajectory(in_dir(dir, tag + ".traj"), pb.grid, run);
    write_steps_csv(in_dir(dir, tag + "_steps.csv"), run, sc.end_time / sc.num_steps);
    std::vector<NamedValues> cells = final_fields(run);
    if (!run.last_velocity.empty()) {
        cells.push_back({"mass_loss", mass_loss(pb.grid, run.last_velocity)});
    }
    write_vtk(in_dir(dir, tag + "_final.vtk"), pb.grid, cells);
    if (sc.output_every > 0) {
        for (std::size_t n = sc.output_every; n < run.saturation.size(); n += sc.output_every) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_%05zu.vtk", tag.c_str(), n);
            write_vtk(in_dir(dir, name), pb.grid, {{"saturation", cell_means(run.saturation[n])}});
        }
    }
}

OfflineResult offline(const Scenario& sc, const FlowProblem& pb, int threads,
                      const Trajectory* snapshots_from) {
    OfflineConfig cfg = build_offline_config(sc, threads);
    if (cfg.mode == ProfileMode::kSnapshots) {
        if (snapshots_from == nullptr) {
            throw ConfigError("rom.profile_mode = snapshots needs a high-dimensional trajectory "
                              "(--trajectory)");
        }
        cfg.snapshot_saturations = snapshot_saturations(*snapshots_from, cfg.profiles);
    }
    const CoarseGrid coarse = build_coarse(sc, pb.grid);
    return run_offline(pb, coarse, cfg);
}

Trajectory load_matching(const std::string& path, const FineGrid& grid) {
    int nx = 0;
    int ny = 0;
    Trajectory run = load_trajectory(path, &nx, &ny);
    if (nx != grid.nx() || ny != grid.ny()) {
        throw ConfigError("trajectory " + path + " is on a " + std::to_string(nx) + "x" +
                          std::to_string(ny) + " grid, scenario has " + std::to_string(grid.nx()) +
                          "x" + std::to_string(grid.ny()));
    }
    return run;
}

Trajectory rb_run(const Scenario& sc, const FlowProblem& pb, const ReducedModel& model) {
    const CoarseGrid coarse = build_coarse(sc, pb.grid);
    return run_lrbms(pb, build_stepping(sc), model, sc.rom.reconstruction, &coarse);
}

double seconds(const PhaseTimings& t) {
    return t.assembly + t.pressure + t.fit + t.velocity + t.transport + t.limiter;
}

json timings_json(const PhaseTimings& t) {
    return {{"assembly", t.assembly}, {"pressure", t.pressure}, {"fit", t.fit},
            {"velocity", t.velocity}, {"transport", t.transport}, {"limiter", t.limiter},
            {"total", seconds(t)}};
}

}  // namespace

json offline_report_json(const OfflineResult& r) {
    int greedy_total = 0;
    for (int n : r.report.greedy_sizes) greedy_total += n;
    int final_total = 0;
    for (int n : r.report.final_sizes) final_total += n;
    return {
        {"snapshot_count", r.report.snapshot_count},
        {"coarse_cells", r.report.final_sizes.size()},
        {"basis_sizes_greedy", r.report.greedy_sizes},
        {"basis_sizes_final", r.report.final_sizes},
        {"total_size_greedy", greedy_total},
        {"total_size_final", final_total},
        {"selected", r.greedy.selected},
        {"profiles_rank_deficient", r.model.mobility.rank_deficient()},
        {"error_history", r.report.error_history},
        {"stop", to_string(r.report.stop)},
        {"seconds",
         {{"profiles", r.report.tof_seconds},
          {"truth_solves", r.report.truth_seconds},
          {"greedy", r.report.greedy_seconds},
          {"pca", r.report.pca_seconds},
          {"precompute", r.report.precompute_seconds}}},
    };
}

json run_summary_json(const Trajectory& run) {
    double zeta_max = 0.0;
    double cfl_max = 0.0;
    double balance_max = 0.0;
    for (double z : run.mass_loss_max) zeta_max = std::max(zeta_max, z);
    for (double c : run.cfl) cfl_max = std::max(cfl_max, c);
    for (double d : run.mass_balance_defect) balance_max = std::max(balance_max, d);
    json j = {
        {"steps", run.cfl.size()},
        {"zeta_max_end", run.mass_loss_max.empty() ? 0.0 : run.mass_loss_max.back()},
        {"zeta_mean_end", run.mass_loss_mean.empty() ? 0.0 : run.mass_loss_mean.back()},
        {"zeta_max", zeta_max},
        {"cfl_max", cfl_max},
        {"mass_balance_defect_max", balance_max},
        {"saturation_min", run.min_saturation},
        {"saturation_max", run.max_saturation},
        {"limiter_mean_change_max", run.max_limiter_mean_change},
        {"seconds", timings_json(run.timings)},
    };
    if (!run.coarse_balance_max.empty()) {
        double c = 0.0;
        for (double b : run.coarse_balance_max) c = std::max(c, b);
        j["coarse_balance_max"] = c;
    }
    return j;
}

json metrics_summary_json(const RunMetrics& m) {
    return {{"mean_l2_s", m.mean_l2_s}, {"mean_h1_s", m.mean_h1_s}, {"mean_l2_p", m.mean_l2_p},
            {"mean_h1_p", m.mean_h1_p}, {"end_l2_s", m.end_l2_s},   {"end_h1_s", m.end_h1_s},
            {"end_l2_p", m.end_l2_p},   {"end_h1_p", m.end_h1_p}};
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
    CLI::App cli{"Two-phase flow with a localized reduced basis pressure solver"};
    cli.require_subcommand(1);
    int threads = default_threads();
    cli.add_option("--threads", threads, "worker threads (default: LRBMS_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    std::string scenario_path;
    std::string out_dir = ".";
    std::string model_path;
    std::string report_path;
    std::string trajectory_path;
    std::string run_a;
    std::string run_b;
    std::string out_file;

    auto* hd = cli.add_subcommand("run-hd", "high-dimensional IMPES run");
    hd->add_option("scenario", scenario_path)->required();
    hd->add_option("-o,--out", out_dir, "output directory");

    auto* off = cli.add_subcommand("offline", "build the reduced model");
    off->add_option("scenario", scenario_path)->required();
    off->add_option("-o,--out", model_path, "model file")->required();
    off->add_option("--report", report_path, "offline report JSON (default: <model>.json)");
    off->add_option("--trajectory", trajectory_path, "run for snapshot profiles");

    auto* rb = cli.add_subcommand("run-rb", "reduced IMPES run");
    rb->add_option("scenario", scenario_path)->required();
    rb->add_option("-m,--model", model_path, "model file")->required();
    rb->add_option("-o,--out", out_dir, "output directory");

    auto* cmp = cli.add_subcommand("compare", "discrepancies of run B against run A");
    cmp->add_option("run_a", run_a)->required();
    cmp->add_option("run_b", run_b)->required();
    cmp->add_option("-o,--out", out_file, "metrics CSV");

    auto* tof = cli.add_subcommand("tof", "time-of-flight field of the initial state");
    tof->add_option("scenario", scenario_path)->required();
    tof->add_option("-o,--out", out_file, "VTK file")->default_str("tof.vtk");

    auto* bench = cli.add_subcommand("bench", "high-dimensional, offline and reduced runs");
    bench->add_option("scenario", scenario_path)->required();
    bench->add_option("-o,--out", out_dir, "output directory");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kOk : kConfigFailure;
    }

    try {
        if (*hd) {
            const Scenario sc = parse_scenario(scenario_path);
            const FlowProblem pb = build_problem(sc);
            ensure_dir(out_dir);
            const Trajectory run = run_high_dim(pb, build_stepping(sc));
            write_run(out_dir, "hd", pb, sc, run);
            write_json(in_dir(out_dir, "hd_summary.json"), run_summary_json(run));
        } else if (*off) {
            const Scenario sc = parse_scenario(scenario_path);
            const FlowProblem pb = build_problem(sc);
            Trajectory source;
            if (!trajectory_path.empty()) source = load_matching(trajectory_path, pb.grid);
            const OfflineResult r =
                offline(sc, pb, threads, trajectory_path.empty() ? nullptr : &source);
            save_model(r.model, model_path);
            write_json(report_path.empty() ? model_path + ".json" : report_path,
                       offline_report_json(r));
            std::printf("snapshots %d, reduced size %d, stop: %s\n", r.report.snapshot_count,
                        r.model.size(), to_string(r.report.stop));
        } else if (*rb) {
            const Scenario sc = parse_scenario(scenario_path);
            const FlowProblem pb = build_problem(sc);
            const ReducedModel model = load_model(model_path, pb.grid);
            ensure_dir(out_dir);
            const Trajectory run = rb_run(sc, pb, model);
            write_run(out_dir, "rb", pb, sc, run);
            write_json(in_dir(out_dir, "rb_summary.json"), run_summary_json(run));
        } else if (*cmp) {
            int nx = 0;
            int ny = 0;
            double lx = 0.0;
            double ly = 0.0;
            const Trajectory a = load_trajectory(run_a, &nx, &ny, &lx, &ly);
            int bnx = 0;
            int bny = 0;
            const Trajectory b = load_trajectory(run_b, &bnx, &bny);
            if (nx != bnx || ny != bny) throw ConfigError("compare: runs live on different grids");
            const FineGrid grid(lx, ly, nx, ny, BoundarySpec{});
            const RunMetrics m = compare_runs(grid, a, b);
            if (!out_file.empty()) write_metrics_csv(out_file, m);
            std::printf("%s\n", metrics_summary_json(m).dump(2).c_str());
        } else if (*tof) {
            const Scenario sc = parse_scenario(scenario_path);
            const FlowProblem pb = build_problem(sc);
            const DgField s0 = l2_project(
                pb.grid, [v = sc.initial_saturation](Point) { return v; }, pb.order);
            const Mobilities mob = linear_mobilities(s0, pb.fluids.mu_w, pb.fluids.mu_n);
            const DgField p = solve_pressure(pb, PressureAssembler(pb).system(mob.w, mob.n));
            const FaceFluxField u = reconstruct_velocity(pb, p, mob.w, mob.n);
            const TofSolution t = solve_tof_detailed(pb.grid, u, pb.porosity, pb.order);
            write_vtk(out_file, pb.grid, {{"tof", cell_means(t.tau)}});
            std::printf("components %zu, largest %d\n", t.components.size(), t.largest_component);
        } else if (*bench) {
            const Scenario sc = parse_scenario(scenario_path);
            const FlowProblem pb = build_problem(sc);
            ensure_dir(out_dir);
            const Trajectory hd_run = run_high_dim(pb, build_stepping(sc));
            write_run(out_dir, "hd", pb, sc, hd_run);
            const OfflineResult r = offline(sc, pb, threads, &hd_run);
            save_model(r.model, in_dir(out_dir, "model.bin"));
            const Trajectory rb_traj = rb_run(sc, pb, r.model);
            write_run(out_dir, "rb", pb, sc, rb_traj);
            const RunMetrics m = compare_runs(pb.grid, hd_run, rb_traj);
            write_metrics_csv(in_dir(out_dir, "bench_metrics.csv"), m);
            const double hd_solve = hd_run.timings.assembly + hd_run.timings.pressure;
            const double rb_solve = rb_traj.timings.pressure;
            const json report = {
                {"scenario", scenario_to_json(sc)},
                {"offline", offline_report_json(r)},
                {"high_dimensional", run_summary_json(hd_run)},
                {"reduced", run_summary_json(rb_traj)},
                {"discrepancy", metrics_summary_json(m)},
                {"pressure_speedup", rb_solve > 0.0 ? hd_solve / rb_solve : 0.0},
            };
            write_json(in_dir(out_dir, "bench_report.json"), report);
            std::printf("%s\n", metrics_summary_json(m).dump(2).c_str());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigFailure;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kNumericalFailure;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kIoFailure;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigFailure;
    }
    return kOk;
}

}  // namespace lrbms::app
