#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrbms/field.hpp"
#include "lrbms/mesh.hpp"

namespace lrbms::app {

/// Axis-aligned box (physical coordinates) whose cells get multiplied by `factor`.
struct Lens {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;
    double factor = 1.0;

    bool operator==(const Lens&) const = default;
};

struct FieldGenerator {
    enum class Kind { kConstant, kLayered, kLens, kFile };

    Kind kind = Kind::kConstant;
    double value = 1.0;
    /// Layered and lens kinds: rows [boundaries[k-1], boundaries[k]) get values[k].
    std::vector<double> values;
    std::vector<int> boundaries;
    std::vector<Lens> lenses;
    /// Multiplicative log-uniform noise 10^(noise (2U - 1)) per cell.
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string path;

    bool operator==(const FieldGenerator&) const = default;
};

const char* to_string(FieldGenerator::Kind kind);

inline FieldGenerator constant_field(double value) {
    FieldGenerator g;
    g.value = value;
    return g;
}

/// Cell values on the grid; deterministic for a given generator. Throws
/// ConfigError naming `what` on invalid parameters.
CellScalarField generate_field(const FieldGenerator& gen, const FineGrid& grid,
                               const std::string& what);

/// Text raster: "nx ny" header, then ny rows of nx values (row 0 = bottom),
/// written with 17 significant digits.
void write_raster(const std::string& path, int nx, int ny, const std::vector<double>& values);
std::vector<double> read_raster(const std::string& path, int nx, int ny);

}  // namespace lrbms::app
