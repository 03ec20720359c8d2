#pragma once

#include <cstdint>
#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/mobility.hpp"
#include "lrbms/problem.hpp"
#include "lrbms/rom.hpp"
#include "lrbms/transport.hpp"
#include "lrbms/velocity.hpp"

namespace lrbms {

/// Mobility used to reconstruct the velocity from a reduced pressure.
enum class ReconstructionMobility {
    kSaturation,    ///< linear mobilities of the current saturation
    kParametrized,  ///< the fitted mobilities the reduced pressure was solved with
};

struct TimeStepping {
    double end_time = 3e5;
    int num_steps = 600;
    bool limiter = true;
    ScalarFunction initial_saturation;  ///< empty means s0 = 0
    /// Keep the face fluxes of every step (needed for per-step mass loss fields).
    bool keep_velocity = false;

    double dt() const { return end_time / num_steps; }
};

struct PhaseTimings {
    double assembly = 0.0;
    double pressure = 0.0;
    double fit = 0.0;
    double velocity = 0.0;
    double transport = 0.0;
    double limiter = 0.0;
};

struct Trajectory {
    std::vector<DgField> saturation;  ///< s^0 .. s^N
    std::vector<DgField> pressure;    ///< p^1 .. p^N (pressure of step n-1 -> n)
    std::vector<FaceFluxField> velocity;  ///< only with keep_velocity
    FaceFluxField last_velocity;

    // per step n = 1..N (index n-1)
    std::vector<double> mass_loss_max;
    std::vector<double> mass_loss_mean;
    std::vector<double> cfl;
    std::vector<int> limited_cells;
    std::vector<double> fit_residual;         ///< reduced runs only
    std::vector<double> coarse_balance_max;   ///< reduced runs only, relative to flux scale
    std::vector<double> mass_balance_defect;  ///< |mass change - dt * boundary terms| / scale

    double min_saturation = 0.0;  ///< over all corners of all limited states
    double max_saturation = 0.0;
    double max_limiter_mean_change = 0.0;
    PhaseTimings timings;
};

/// High-dimensional IMPES loop: pressure, velocity, saturation step, limiter.
Trajectory run_high_dim(const FlowProblem& problem, const TimeStepping& stepping);

/// Reduced loop: theta fit, reduced pressure, reconstruction, velocity, fine transport.
Trajectory run_lrbms(const FlowProblem& problem, const TimeStepping& stepping,
                     const ReducedModel& model,
                     ReconstructionMobility mobility = ReconstructionMobility::kSaturation,
                     const CoarseGrid* coarse_for_balance = nullptr);

struct RunMetrics {
    std::vector<double> e_l2_s;  ///< per step n = 1..N
    std::vector<double> e_h1_s;
    std::vector<double> e_l2_p;
    std::vector<double> e_h1_p;
    double mean_l2_s = 0.0;
    double mean_h1_s = 0.0;
    double mean_l2_p = 0.0;
    double mean_h1_p = 0.0;
    double end_l2_s = 0.0;
    double end_h1_s = 0.0;
    double end_l2_p = 0.0;
    double end_h1_p = 0.0;
};

/// Relative discrepancies ||a - b|| / ||a|| per step, with `reference` = a.
RunMetrics compare_runs(const FineGrid& grid, const Trajectory& reference, const Trajectory& other);

/// Saturations s^{n_q}, n_q = round((q-1) N / (M-1)), q = 1..M.
std::vector<DgField> snapshot_saturations(const Trajectory& run, int m);

enum class ProfileMode { kTof, kSnapshots };

struct OfflineConfig {
    int profiles = 8;
    double end_time = 3e5;
    ProfileMode mode = ProfileMode::kTof;
    /// Saturations feeding the snapshot profiles (M fields, only for kSnapshots).
    std::vector<DgField> snapshot_saturations;
    /// Saturation the time-of-flight velocity is computed with; empty means s0 = 0.
    ScalarFunction initial_saturation;
    int training_count = 300;
    std::uint64_t seed = 1;
    GreedyOptions greedy;
    bool use_pca = false;
    double eps_pca = 1e-6;
    /// Fine solutions of the training set from an earlier run with the same
    /// profiles, training set and problem; empty means they are computed.
    const std::vector<Vector>* truth = nullptr;
};

struct OfflineReport {
    int snapshot_count = 0;
    std::vector<int> greedy_sizes;  ///< per coarse cell after the greedy
    std::vector<int> final_sizes;   ///< per coarse cell in the model
    std::vector<double> error_history;
    GreedyStop stop = GreedyStop::kTolerance;
    double tof_seconds = 0.0;
    double truth_seconds = 0.0;
    double greedy_seconds = 0.0;
    double pca_seconds = 0.0;
    double precompute_seconds = 0.0;
};

struct OfflineResult {
    ReducedModel model;
    OfflineReport report;
    GreedyResult greedy;
    DgField tof;  ///< empty for snapshot profiles
};

/// Profiles, training set, greedy, optional PCA and unit functions, operator
/// projection.
OfflineResult run_offline(const FlowProblem& problem, const CoarseGrid& coarse,
                          const OfflineConfig& config);

/// Position of the s = 0.5 contour along the grid row `j` (first cell from the
/// left whose mean drops below 0.5; Lx if none).
double front_position(const FineGrid& grid, const DgField& s, int row);

}  // namespace lrbms
