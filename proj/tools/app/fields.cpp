#include "app/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "lrbms/error.hpp"

namespace lrbms::app {

const char* to_string(FieldGenerator::Kind kind) {
    switch (kind) {
        case FieldGenerator::Kind::kConstant: return "constant";
        case FieldGenerator::Kind::kLayered: return "layered";
        case FieldGenerator::Kind::kLens: return "lens";
        case FieldGenerator::Kind::kFile: return "file";
    }
    return "unknown";
}

namespace {

double layer_value(const FieldGenerator& gen, int row, const std::string& what) {
    if (gen.values.size() != gen.boundaries.size() + 1) {
        throw ConfigError(what + ".values: expected " + std::to_string(gen.boundaries.size() + 1) +
                          " layer values for " + std::to_string(gen.boundaries.size()) +
                          " boundaries, got " + std::to_string(gen.values.size()));
    }
    std::size_t k = 0;
    while (k < gen.boundaries.size() && row >= gen.boundaries[k]) ++k;
    return gen.values[k];
}

}  // namespace

CellScalarField generate_field(const FieldGenerator& gen, const FineGrid& grid,
                               const std::string& what) {
    const int n = grid.num_cells();
    std::vector<double> v(n, gen.value);
    switch (gen.kind) {
        case FieldGenerator::Kind::kConstant:
            break;
        case FieldGenerator::Kind::kLayered:
        case FieldGenerator::Kind::kLens:
            for (std::size_t k = 1; k < gen.boundaries.size(); ++k) {
                if (gen.boundaries[k] <= gen.boundaries[k - 1]) {
                    throw ConfigError(what + ".boundaries: rows must be strictly increasing");
                }
            }
            for (int j = 0; j < grid.ny(); ++j) {
                const double value = layer_value(gen, j, what);
                for (int i = 0; i < grid.nx(); ++i) v[grid.cell_index(i, j)] = value;
            }
            break;
        case FieldGenerator::Kind::kFile:
            v = read_raster(gen.path, grid.nx(), grid.ny());
            break;
    }
    if (gen.kind == FieldGenerator::Kind::kLens) {
        for (std::size_t l = 0; l < gen.lenses.size(); ++l) {
            const Lens& lens = gen.lenses[l];
            if (!(lens.x1 > lens.x0 && lens.y1 > lens.y0) || !(lens.factor > 0.0)) {
                throw ConfigError(what + ".lenses[" + std::to_string(l) +
                                  "]: need x0 < x1, y0 < y1 and a positive factor");
            }
            for (int c = 0; c < n; ++c) {
                const Point b = grid.barycenter(c);
                if (b.x >= lens.x0 && b.x < lens.x1 && b.y >= lens.y0 && b.y < lens.y1) {
                    v[c] *= lens.factor;
                }
            }
        }
    }
    if (gen.noise != 0.0) {
        std::mt19937_64 rng(gen.seed);
        for (int c = 0; c < n; ++c) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            v[c] *= std::pow(10.0, gen.noise * (2.0 * u - 1.0));
        }
    }
    return CellScalarField(std::move(v));
}

void write_raster(const std::string& path, int nx, int ny, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != nx * ny) {
        throw ConfigError("raster has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(nx * ny));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open raster for writing: " + path);
    out << nx << ' ' << ny << '\n';
    char buf[32];
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[static_cast<std::size_t>(j) * nx + i]);
            out << (i ? " " : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing raster: " + path);
}

std::vector<double> read_raster(const std::string& path, int nx, int ny) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open raster: " + path);
    int fnx = 0;
    int fny = 0;
    if (!(in >> fnx >> fny)) throw IoError("raster " + path + ": missing 'nx ny' header");
    if (fnx != nx || fny != ny) {
        throw ConfigError("raster " + path + " is " + std::to_string(fnx) + "x" +
                          std::to_string(fny) + ", grid is " + std::to_string(nx) + "x" +
                          std::to_string(ny));
    }
    std::vector<double> v(static_cast<std::size_t>(nx) * ny);
    for (double& x : v) {
        std::string token;
        if (!(in >> token)) throw IoError("raster " + path + ": too few values");
        std::istringstream ts(token);
        if (!(ts >> x)) throw IoError("raster " + path + ": bad value '" + token + "'");
    }
    std::string extra;
    if (in >> extra) throw IoError("raster " + path + ": trailing data");
    return v;
}

}  // namespace lrbms::app
