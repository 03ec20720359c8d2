#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/mesh.hpp"
#include "lrbms/scheme.hpp"

namespace lrbms::app {

struct NamedValues {
    std::string name;
    std::vector<double> values;
};

/// Legacy ASCII VTK rectilinear grid with CELL_DATA (one value per cell) and
/// optional POINT_DATA (one value per grid node, row-major). Refuses non-finite
/// values with a NumericalError naming field and index.
void write_vtk(const std::string& path, const FineGrid& grid, const std::vector<NamedValues>& cells,
               const std::vector<NamedValues>& points = {});
std::string vtk_string(const FineGrid& grid, const std::vector<NamedValues>& cells,
                       const std::vector<NamedValues>& points = {});

std::vector<double> cell_means(const DgField& f);

/// Binary trajectory: saturations and pressures of every step plus the grid shape.
void save_trajectory(const std::string& path, const FineGrid& grid, const Trajectory& run);
Trajectory load_trajectory(const std::string& path, int* nx = nullptr, int* ny = nullptr,
                           double* lx = nullptr, double* ly = nullptr);

/// Columns step,e_L2_s,e_H1_s,e_L2_p,e_H1_p.
void write_metrics_csv(const std::string& path, const RunMetrics& m);
/// Per-step diagnostics of one run (time, CFL, mass loss, limiter, fit residual).
void write_steps_csv(const std::string& path, const Trajectory& run, double dt);

}  // namespace lrbms::app
