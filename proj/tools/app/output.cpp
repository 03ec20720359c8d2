#include "app/output.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lrbms/error.hpp"

namespace lrbms::app {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_finite(const NamedValues& f, std::size_t expected, const char* kind) {
    if (f.values.size() != expected) {
        throw ConfigError(std::string(kind) + " field '" + f.name + "' has " +
                          std::to_string(f.values.size()) + " values, grid needs " +
                          std::to_string(expected));
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!std::isfinite(f.values[i])) {
            throw NumericalError("refusing to write VTK: " + std::string(kind) + " field '" +
                                 f.name + "' is not finite at index " + std::to_string(i));
        }
    }
}

void coordinates(std::ostringstream& os, const char* axis, int n, double h) {
    os << axis << "_COORDINATES " << n + 1 << " double\n";
    for (int i = 0; i <= n; ++i) os << (i ? " " : "") << fmt(i * h);
    os << '\n';
}

void block(std::ostringstream& os, const NamedValues& f) {
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) os << fmt(v) << '\n';
}

}  // namespace

std::string vtk_string(const FineGrid& grid, const std::vector<NamedValues>& cells,
                       const std::vector<NamedValues>& points) {
    const auto nc = static_cast<std::size_t>(grid.num_cells());
    const auto np = static_cast<std::size_t>(grid.nx() + 1) * (grid.ny() + 1);
    for (const auto& f : cells) check_finite(f, nc, "cell");
    for (const auto& f : points) check_finite(f, np, "point");
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\nlrbms\nASCII\nDATASET RECTILINEAR_GRID\n";
    os << "DIMENSIONS " << grid.nx() + 1 << ' ' << grid.ny() + 1 << " 1\n";
    coordinates(os, "X", grid.nx(), grid.hx());
    coordinates(os, "Y", grid.ny(), grid.hy());
    os << "Z_COORDINATES 1 double\n0\n";
    if (!cells.empty()) {
        os << "CELL_DATA " << nc << '\n';
        for (const auto& f : cells) block(os, f);
    }
    if (!points.empty()) {
        os << "POINT_DATA " << np << '\n';
        for (const auto& f : points) block(os, f);
    }
    return os.str();
}

void write_vtk(const std::string& path, const FineGrid& grid, const std::vector<NamedValues>& cells,
               const std::vector<NamedValues>& points) {
    const std::string text = vtk_string(grid, cells, points);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open VTK file for writing: " + path);
    out << text;
    if (!out) throw IoError("failed writing VTK file: " + path);
}

std::vector<double> cell_means(const DgField& f) {
    std::vector<double> v(f.num_cells());
    for (int c = 0; c < f.num_cells(); ++c) v[c] = f.mean(c);
    return v;
}

namespace {

constexpr char kTrajMagic[8] = {'L', 'R', 'B', 'M', 'S', 'T', 'R', 'J'};
constexpr std::uint32_t kTrajVersion = 1;

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw IoError("trajectory " + path + " is truncated");
    }
    return v;
}

void put_fields(std::ofstream& out, const std::vector<DgField>& fields) {
    put<std::uint64_t>(out, fields.size());
    for (const DgField& f : fields) {
        out.write(reinterpret_cast<const char*>(f.coefficients().data()),
                  static_cast<std::streamsize>(f.coefficients().size() * sizeof(double)));
    }
}

std::vector<DgField> get_fields(std::ifstream& in, const std::string& path, int cells, int order) {
    const auto n = get<std::uint64_t>(in, path);
    if (n > 1000000) throw IoError("trajectory " + path + " has an implausible step count");
    std::vector<DgField> out;
    for (std::uint64_t k = 0; k < n; ++k) {
        DgField f(cells, order);
        if (!in.read(reinterpret_cast<char*>(f.coefficients().data()),
                     static_cast<std::streamsize>(f.coefficients().size() * sizeof(double)))) {
            throw IoError("trajectory " + path + " is truncated");
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

void save_trajectory(const std::string& path, const FineGrid& grid, const Trajectory& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open trajectory for writing: " + path);
    out.write(kTrajMagic, sizeof kTrajMagic);
    put(out, kTrajVersion);
    put<std::int32_t>(out, grid.nx());
    put<std::int32_t>(out, grid.ny());
    put(out, grid.lx());
    put(out, grid.ly());
    put<std::int32_t>(out, run.saturation.empty() ? 1 : run.saturation.front().order());
    put_fields(out, run.saturation);
    put_fields(out, run.pressure);
    if (!out) throw IoError("failed writing trajectory: " + path);
}

Trajectory load_trajectory(const std::string& path, int* nx, int* ny, double* lx, double* ly) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trajectory: " + path);
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kTrajMagic, sizeof magic) != 0) {
        throw IoError(path + " is not a trajectory file");
    }
    if (get<std::uint32_t>(in, path) != kTrajVersion) {
        throw IoError("trajectory " + path + " has an unsupported version");
    }
    const int fnx = get<std::int32_t>(in, path);
    const int fny = get<std::int32_t>(in, path);
    const double flx = get<double>(in, path);
    const double fly = get<double>(in, path);
    const int order = get<std::int32_t>(in, path);
    if (fnx < 1 || fny < 1 || (order != 0 && order != 1)) {
        throw IoError("trajectory " + path + " has a corrupt header");
    }
    Trajectory run;
    run.saturation = get_fields(in, path, fnx * fny, order);
    run.pressure = get_fields(in, path, fnx * fny, order);
    if (nx) *nx = fnx;
    if (ny) *ny = fny;
    if (lx) *lx = flx;
    if (ly) *ly = fly;
    return run;
}

void write_metrics_csv(const std::string& path, const RunMetrics& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    out << "step,e_L2_s,e_H1_s,e_L2_p,e_H1_p\n";
    for (std::size_t n = 0; n < m.e_l2_s.size(); ++n) {
        out << n + 1 << ',' << fmt(m.e_l2_s[n]) << ',' << fmt(m.e_h1_s[n]) << ','
            << fmt(n < m.e_l2_p.size() ? m.e_l2_p[n] : 0.0) << ','
            << fmt(n < m.e_h1_p.size() ? m.e_h1_p[n] : 0.0) << '\n';
    }
    if (!out) throw IoError("failed writing CSV: " + path);
}

void write_steps_csv(const std::string& path, const Trajectory& run, double dt) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    out << "step,time,cfl,zeta_max,zeta_mean,limited_cells,fit_residual,coarse_balance\n";
    for (std::size_t n = 0; n < run.cfl.size(); ++n) {
        out << n + 1 << ',' << fmt(dt * static_cast<double>(n + 1)) << ',' << fmt(run.cfl[n])
            << ',' << fmt(run.mass_loss_max[n]) << ',' << fmt(run.mass_loss_mean[n]) << ','
            << run.limited_cells[n] << ','
            << fmt(n < run.fit_residual.size() ? run.fit_residual[n] : 0.0) << ','
            << fmt(n < run.coarse_balance_max.size() ? run.coarse_balance_max[n] : 0.0) << '\n';
    }
    if (!out) throw IoError("failed writing CSV: " + path);
}

}  // namespace lrbms::app
