#include "lrbms/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "lrbms/error.hpp"
#include "lrbms/log.hpp"
#include "lrbms/pressure.hpp"
#include "lrbms/tof.hpp"

namespace lrbms {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point& t) {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - t).count();
    t = now;
    return s;
}

DgField initial_state(const FlowProblem& problem, const TimeStepping& stepping) {
    if (!stepping.initial_saturation) {
        return DgField::constant(problem.grid.num_cells(), problem.order, 0.0);
    }
    return l2_project(problem.grid, stepping.initial_saturation, problem.order);
}

double total_mass(const FlowProblem& problem, const DgField& s) {
    double m = 0.0;
    for (int c = 0; c < problem.grid.num_cells(); ++c) {
        m += problem.porosity[c] * problem.grid.cell_area() * s.mean(c);
    }
    return m;
}

// Shared transport part of both loops. Records per-step diagnostics.
class TransportDriver {
public:
    TransportDriver(const FlowProblem& problem, const TimeStepping& stepping, Trajectory& out)
        : problem_(problem), stepping_(stepping), out_(out), stepper_(problem) {
        const auto [lo, hi] = corner_range(out.saturation.front());
        out_.min_saturation = lo;
        out_.max_saturation = hi;
    }

    void advance(int step, const FaceFluxField& u) {
        auto t = Clock::now();
        const FineGrid& grid = problem_.grid;
        const double dt = stepping_.dt();
        const DgField& s = out_.saturation.back();

        const double cfl = cfl_number(grid, u, problem_.porosity, dt);
        out_.cfl.push_back(cfl);
        if (cfl > 1.0 && !cfl_warned_) {
            warn("step " + std::to_string(step) + ": CFL number " + std::to_string(cfl) +
                 " exceeds 1; the explicit saturation update may be unstable");
            cfl_warned_ = true;
        }
        const std::vector<double> zeta = mass_loss(grid, u);
        out_.mass_loss_max.push_back(*std::max_element(zeta.begin(), zeta.end()));
        out_.mass_loss_mean.push_back(std::accumulate(zeta.begin(), zeta.end(), 0.0) /
                                      static_cast<double>(zeta.size()));
        out_.timings.velocity += elapsed(t);

        const double change = dt * stepper_.mass_change(s, u);
        DgField next = stepper_.step(s, u, dt);
        const double before = total_mass(problem_, s);
        const double after = total_mass(problem_, next);
        const double scale = std::max({std::abs(before), std::abs(after), std::abs(change), 1e-300});
        out_.mass_balance_defect.push_back(std::abs(after - before - change) / scale);
        out_.timings.transport += elapsed(t);

        if (stepping_.limiter) {
            LimiterStats stats;
            DgField limited = limit(problem_, next, u, &stats);
            for (int c = 0; c < grid.num_cells(); ++c) {
                out_.max_limiter_mean_change = std::max(out_.max_limiter_mean_change,
                                                        std::abs(limited.mean(c) - next.mean(c)));
            }
            out_.limited_cells.push_back(stats.limited);
            next = std::move(limited);
        } else {
            out_.limited_cells.push_back(0);
        }
        for (double v : next.coefficients()) {
            if (!std::isfinite(v)) {
                throw NumericalError("saturation became non-finite");
            }
        }
        const auto [lo, hi] = corner_range(next);
        out_.min_saturation = std::min(out_.min_saturation, lo);
        out_.max_saturation = std::max(out_.max_saturation, hi);
        out_.timings.limiter += elapsed(t);

        if (stepping_.keep_velocity) out_.velocity.push_back(u);
        out_.last_velocity = u;
        out_.saturation.push_back(std::move(next));
    }

private:
    const FlowProblem& problem_;
    const TimeStepping& stepping_;
    Trajectory& out_;
    SaturationStepper stepper_;
    bool cfl_warned_ = false;
};

void check_stepping(const TimeStepping& stepping) {
    if (!(stepping.end_time > 0.0)) throw ConfigError("end time T must be positive");
    if (stepping.num_steps < 1) throw ConfigError("number of time steps N_T must be at least 1");
}

}  // namespace

Trajectory run_high_dim(const FlowProblem& problem, const TimeStepping& stepping) {
    problem.validate();
    check_stepping(stepping);
    Trajectory out;
    out.saturation.push_back(initial_state(problem, stepping));
    TransportDriver transport(problem, stepping, out);
    const PressureAssembler assembler(problem);

    for (int n = 0; n < stepping.num_steps; ++n) {
        try {
            auto t = Clock::now();
            const DgField& s = out.saturation.back();
            const Mobilities mob = linear_mobilities(s, problem.fluids.mu_w, problem.fluids.mu_n);
            const PressureSystem sys = assembler.system(mob.w, mob.n);
            out.timings.assembly += elapsed(t);
            const DgField* guess = out.pressure.empty() ? nullptr : &out.pressure.back();
            DgField p = solve_pressure(problem, sys, guess);
            out.timings.pressure += elapsed(t);
            const FaceFluxField u = reconstruct_velocity(problem, p, mob.w, mob.n);
            out.timings.velocity += elapsed(t);
            out.pressure.push_back(std::move(p));
            transport.advance(n + 1, u);
        } catch (const NumericalError& e) {
            throw NumericalError("high-dimensional run, step " + std::to_string(n + 1) + ": " +
                                 e.what());
        }
    }
    return out;
}

Trajectory run_lrbms(const FlowProblem& problem, const TimeStepping& stepping,
                     const ReducedModel& model, ReconstructionMobility mobility,
                     const CoarseGrid* coarse_for_balance) {
    problem.validate();
    check_stepping(stepping);
    const OnlineSolver online(model, problem);
    Trajectory out;
    out.saturation.push_back(initial_state(problem, stepping));
    TransportDriver transport(problem, stepping, out);

    for (int n = 0; n < stepping.num_steps; ++n) {
        try {
            auto t = Clock::now();
            const DgField& s = out.saturation.back();
            OnlineSolver::Result r = online.solve(s);
            out.timings.pressure += elapsed(t);
            out.fit_residual.push_back(r.fit.residual);
            const Mobilities mob =
                mobility == ReconstructionMobility::kSaturation
                    ? linear_mobilities(s, problem.fluids.mu_w, problem.fluids.mu_n)
                    : parametrized_mobilities(r.fit.theta, model.mobility);
            out.timings.fit += elapsed(t);
            const FaceFluxField u = reconstruct_velocity(problem, r.pressure, mob.w, mob.n);
            if (coarse_for_balance != nullptr) {
                const std::vector<double> bal =
                    coarse_flux_balance(problem.grid, *coarse_for_balance, u, problem.pressure_source);
                double worst = 0.0;
                for (double b : bal) worst = std::max(worst, std::abs(b));
                const double scale = std::max(u.max_abs() * std::max(problem.grid.lx(), problem.grid.ly()),
                                              1e-300);
                out.coarse_balance_max.push_back(worst / scale);
            }
            out.timings.velocity += elapsed(t);
            out.pressure.push_back(std::move(r.pressure));
            transport.advance(n + 1, u);
        } catch (const NumericalError& e) {
            throw NumericalError("reduced run, step " + std::to_string(n + 1) + ": " + e.what());
        }
    }
    return out;
}

namespace {

double relative(double diff, double ref) { return ref > 0.0 ? diff / ref : diff; }

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunMetrics compare_runs(const FineGrid& grid, const Trajectory& reference, const Trajectory& other) {
    if (reference.saturation.size() != other.saturation.size() ||
        reference.pressure.size() != other.pressure.size()) {
        throw ConfigError("compare_runs: trajectories have different numbers of steps");
    }
    RunMetrics m;
    for (std::size_t n = 1; n < reference.saturation.size(); ++n) {
        const DgField& a = reference.saturation[n];
        DgField d = a;
        d.coefficients() -= other.saturation[n].coefficients();
        const BrokenNorms na = broken_norms(grid, a);
        const BrokenNorms nd = broken_norms(grid, d);
        m.e_l2_s.push_back(relative(nd.l2, na.l2));
        m.e_h1_s.push_back(relative(nd.h1, na.h1));
    }
    for (std::size_t n = 0; n < reference.pressure.size(); ++n) {
        const DgField& a = reference.pressure[n];
        DgField d = a;
        d.coefficients() -= other.pressure[n].coefficients();
        const BrokenNorms na = broken_norms(grid, a);
        const BrokenNorms nd = broken_norms(grid, d);
        m.e_l2_p.push_back(relative(nd.l2, na.l2));
        m.e_h1_p.push_back(relative(nd.h1, na.h1));
    }
    m.mean_l2_s = mean_of(m.e_l2_s);
    m.mean_h1_s = mean_of(m.e_h1_s);
    m.mean_l2_p = mean_of(m.e_l2_p);
    m.mean_h1_p = mean_of(m.e_h1_p);
    if (!m.e_l2_s.empty()) {
        m.end_l2_s = m.e_l2_s.back();
        m.end_h1_s = m.e_h1_s.back();
    }
    if (!m.e_l2_p.empty()) {
        m.end_l2_p = m.e_l2_p.back();
        m.end_h1_p = m.e_h1_p.back();
    }
    return m;
}

std::vector<DgField> snapshot_saturations(const Trajectory& run, int m) {
    if (m < 2) throw ConfigError("snapshot profiles need M >= 2");
    const int steps = static_cast<int>(run.saturation.size()) - 1;
    std::vector<DgField> out;
    for (int q = 1; q <= m; ++q) {
        const int n = static_cast<int>(std::lround(static_cast<double>((q - 1) * steps) / (m - 1)));
        out.push_back(run.saturation[n]);
    }
    return out;
}

double front_position(const FineGrid& grid, const DgField& s, int row) {
    for (int i = 0; i < grid.nx(); ++i) {
        const int c = grid.cell_index(i, row);
        if (s.mean(c) < 0.5) return grid.barycenter(c).x - 0.5 * grid.hx();
    }
    return grid.lx();
}

OfflineResult run_offline(const FlowProblem& problem, const CoarseGrid& coarse,
                          const OfflineConfig& config) {
    problem.validate();
    if (config.profiles < 2) throw ConfigError("number of mobility profiles M must be at least 2");
    if (config.training_count < 1) throw ConfigError("training set size must be at least 1");
    OfflineResult out;
    const FineGrid& grid = problem.grid;
    const double mu_w = problem.fluids.mu_w;
    const double mu_n = problem.fluids.mu_n;

    auto t = Clock::now();
    MobilityBasis basis;
    if (config.mode == ProfileMode::kTof) {
        const DgField s0 =
            config.initial_saturation
                ? l2_project(grid, config.initial_saturation, problem.order)
                : DgField::constant(grid.num_cells(), problem.order, 0.0);
        const Mobilities mob = linear_mobilities(s0, mu_w, mu_n);
        const DgField p = solve_pressure(problem, PressureAssembler(problem).system(mob.w, mob.n));
        const FaceFluxField u = reconstruct_velocity(problem, p, mob.w, mob.n);
        out.tof = solve_tof(grid, u, problem.porosity, problem.order);
        basis = profiles_from_tof(grid, out.tof, config.profiles, config.end_time, mu_w, mu_n,
                                  problem.order);
    } else {
        if (static_cast<int>(config.snapshot_saturations.size()) != config.profiles) {
            throw ConfigError("snapshot profiles need exactly M = " +
                              std::to_string(config.profiles) + " saturations, got " +
                              std::to_string(config.snapshot_saturations.size()));
        }
        basis = profiles_from_snapshots(grid, config.snapshot_saturations, mu_w, mu_n);
    }
    out.report.tof_seconds = elapsed(t);

    const std::vector<Parameter> training =
        sample_training_set(config.profiles, config.training_count, config.seed);
    out.greedy = greedy_build(problem, basis, coarse, training, config.greedy, config.truth);
    out.report.truth_seconds = out.greedy.truth_seconds;
    out.report.greedy_seconds = out.greedy.greedy_seconds;
    out.report.snapshot_count = static_cast<int>(out.greedy.selected.size());
    out.report.greedy_sizes = out.greedy.bases.sizes();
    out.report.error_history = out.greedy.error_history;
    out.report.stop = out.greedy.stop;
    t = Clock::now();

    LocalBases bases = out.greedy.bases;
    if (config.use_pca && !out.greedy.snapshots.empty()) {
        bases = pca_compress(grid, coarse, out.greedy.snapshots, problem.order, config.eps_pca);
        if (config.greedy.unit_basis) {
            bases = add_unit_functions(grid, coarse, bases, problem.order, config.greedy.reject_tol);
        }
    }
    out.report.pca_seconds = elapsed(t);
    out.model = precompute_offline(problem, coarse, bases, basis);
    out.model.selected = out.greedy.selected;
    out.model.error_history = out.greedy.error_history;
    out.report.final_sizes = bases.sizes();
    out.report.precompute_seconds = elapsed(t);
    return out;
}

}  // namespace lrbms
