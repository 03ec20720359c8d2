#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "app/fields.hpp"
#include "lrbms/problem.hpp"
#include "lrbms/scheme.hpp"

namespace lrbms::app {

struct SideConfig {
    PressureBc pressure = PressureBc::kNoFlow;
    double value = 0.0;  ///< p_D or outward u_N
    bool saturation_dirichlet = false;
    double saturation = 0.0;

    bool operator==(const SideConfig&) const = default;
};

struct RomConfig {
    int profiles = 8;
    double eps_tol = 1e-4;
    double eps_pca = 1e-6;
    int training_count = 300;
    std::uint64_t seed = 1;
    int max_basis_size = 500;
    bool use_pca = false;
    bool unit_basis = false;
    ProfileMode profile_mode = ProfileMode::kTof;
    ReconstructionMobility reconstruction = ReconstructionMobility::kSaturation;

    bool operator==(const RomConfig&) const = default;
};

/// Everything a run needs. Defaults describe the 400x160 benchmark layout with
/// constant rock fields.
struct Scenario {
    double lx = 300.0;
    double ly = 60.0;
    int nx = 400;
    int ny = 160;
    int coarse_nx = 16;
    int coarse_ny = 2;

    double end_time = 3e5;
    int num_steps = 6000;
    int output_every = 0;  ///< VTK cadence in steps; 0 writes the final state only
    bool limiter = true;

    Fluids fluids;
    Point gravity{0.0, 0.0};
    FieldGenerator permeability = constant_field(1e-9);
    FieldGenerator porosity = constant_field(0.2);
    std::array<SideConfig, 4> sides{
        SideConfig{PressureBc::kDirichlet, 10.0, true, 1.0},
        SideConfig{PressureBc::kNeumann, 3e-4, false, 0.0},
        SideConfig{},
        SideConfig{},
    };
    double q1 = 0.0;
    double q2 = 0.0;
    double initial_saturation = 0.0;

    int order = 1;
    double penalty_base = 30.0;
    MeanWeighting weighting = MeanWeighting::kSwip;
    double cg_tolerance = 1e-10;
    int cg_max_iterations = 20000;

    RomConfig rom;

    bool operator==(const Scenario&) const = default;
};

/// Parses a scenario object; missing keys keep their defaults, unknown keys and
/// invalid values throw ConfigError naming the offending path.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario parse_scenario(const std::string& path);

/// Relative paths of file rasters are resolved against `base_dir`.
void resolve_paths(Scenario& s, const std::string& base_dir);

FlowProblem build_problem(const Scenario& s);
CoarseGrid build_coarse(const Scenario& s, const FineGrid& grid);
TimeStepping build_stepping(const Scenario& s);
OfflineConfig build_offline_config(const Scenario& s, int threads);

}  // namespace lrbms::app
