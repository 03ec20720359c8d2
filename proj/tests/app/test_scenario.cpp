#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "app/fields.hpp"
#include "app/scenario.hpp"
#include "lrbms/error.hpp"

using namespace lrbms;
using namespace lrbms::app;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string error_of(const json& j) {
    try {
        scenario_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(Scenario, EmptyObjectGivesBenchmarkDefaults) {
    const Scenario s = scenario_from_json(json::object());
    EXPECT_EQ(s.nx, 400);
    EXPECT_EQ(s.ny, 160);
    EXPECT_EQ(s.num_steps, 6000);
    EXPECT_DOUBLE_EQ(s.end_time, 3e5);
    EXPECT_EQ(s.sides[0].pressure, PressureBc::kDirichlet);
    EXPECT_DOUBLE_EQ(s.sides[0].value, 10.0);
    EXPECT_DOUBLE_EQ(s.sides[1].value, 3e-4);
    EXPECT_DOUBLE_EQ(s.fluids.mu_n, 0.008);
    EXPECT_EQ(s.rom.profiles, 8);
}

TEST(Scenario, JsonRoundTrip) {
    Scenario s;
    s.nx = 32;
    s.ny = 8;
    s.coarse_nx = 4;
    s.permeability.kind = FieldGenerator::Kind::kLens;
    s.permeability.values = {1.0, 2.0};
    s.permeability.boundaries = {3};
    s.permeability.lenses = {Lens{1.0, 2.0, 0.0, 5.0, 0.1}};
    s.permeability.noise = 0.3;
    s.permeability.seed = 5;
    s.sides[3] = SideConfig{PressureBc::kDirichlet, 2.5, true, 0.25};
    s.rom.profile_mode = ProfileMode::kSnapshots;
    s.rom.reconstruction = ReconstructionMobility::kParametrized;
    s.rom.unit_basis = true;
    s.gravity = {0.0, -9.81};
    EXPECT_EQ(scenario_from_json(scenario_to_json(s)), s);
}

TEST(Scenario, UnknownKeyIsNamed) {
    EXPECT_NE(error_of({{"geometry", {{"nz", 3}}}}).find("geometry.nz"), std::string::npos);
    EXPECT_NE(error_of({{"colour", 1}}).find("colour"), std::string::npos);
}

TEST(Scenario, WrongTypeIsNamed) {
    EXPECT_NE(error_of({{"time", {{"num_steps", "many"}}}}).find("time.num_steps"), std::string::npos);
}

TEST(Scenario, CoarseDivisorErrorNamesNx) {
    const std::string msg = error_of({{"geometry", {{"nx", 100}, {"coarse_nx", 16}}}});
    EXPECT_NE(msg.find("Nx"), std::string::npos);
    EXPECT_NE(msg.find("100"), std::string::npos);
}

TEST(Scenario, InvalidValuesAreRejected) {
    EXPECT_FALSE(error_of({{"time", {{"end_time", -1.0}}}}).empty());
    EXPECT_FALSE(error_of({{"boundary", {{"left", {{"pressure", "sideways"}}}}}}).empty());
    EXPECT_FALSE(error_of({{"rom", {{"profiles", 1}}}}).empty());
}

TEST(Scenario, MissingFileIsIoError) {
    EXPECT_THROW(parse_scenario(temp_path("lrbms_does_not_exist.json")), IoError);
}

TEST(Scenario, MalformedFileIsConfigError) {
    const std::string path = temp_path("lrbms_bad.json");
    std::ofstream(path) << "{ \"geometry\": ";
    EXPECT_THROW(parse_scenario(path), ConfigError);
    std::filesystem::remove(path);
}

TEST(Scenario, BuildProblemUsesBoundaryConfig) {
    Scenario s;
    s.nx = 16;
    s.ny = 4;
    s.coarse_nx = 4;
    const FlowProblem pb = build_problem(s);
    EXPECT_EQ(pb.grid.num_cells(), 64);
    EXPECT_TRUE(pb.grid.tag(Side::kLeft).saturation_dirichlet);
    EXPECT_EQ(pb.grid.tag(Side::kRight).pressure, PressureBc::kNeumann);
    EXPECT_DOUBLE_EQ(pb.boundary.pressure_at(Side::kLeft, {0.0, 1.0}), 10.0);
    EXPECT_DOUBLE_EQ(pb.boundary.saturation_at(Side::kLeft), 1.0);
    EXPECT_DOUBLE_EQ(pb.permeability[10], 1e-9);
    EXPECT_EQ(build_coarse(s, pb.grid).num_cells(), 8);
    EXPECT_DOUBLE_EQ(build_stepping(s).dt(), 50.0);
}

TEST(FieldGenerator, LayeredRows) {
    const FineGrid g(4.0, 4.0, 2, 4, BoundarySpec::benchmark());
    FieldGenerator gen;
    gen.kind = FieldGenerator::Kind::kLayered;
    gen.values = {1.0, 2.0, 3.0};
    gen.boundaries = {1, 3};
    const CellScalarField f = generate_field(gen, g, "k");
    EXPECT_EQ(f[g.cell_index(1, 0)], 1.0);
    EXPECT_EQ(f[g.cell_index(0, 1)], 2.0);
    EXPECT_EQ(f[g.cell_index(0, 2)], 2.0);
    EXPECT_EQ(f[g.cell_index(1, 3)], 3.0);
}

TEST(FieldGenerator, LensMultipliesCoveredCells) {
    const FineGrid g(4.0, 2.0, 4, 2, BoundarySpec::benchmark());
    FieldGenerator gen;
    gen.kind = FieldGenerator::Kind::kLens;
    gen.values = {2.0};
    gen.lenses = {Lens{1.0, 3.0, 0.0, 1.0, 0.5}};
    const CellScalarField f = generate_field(gen, g, "k");
    EXPECT_EQ(f[g.cell_index(0, 0)], 2.0);
    EXPECT_EQ(f[g.cell_index(1, 0)], 1.0);
    EXPECT_EQ(f[g.cell_index(2, 0)], 1.0);
    EXPECT_EQ(f[g.cell_index(1, 1)], 2.0);
}

TEST(FieldGenerator, NoiseIsBoundedAndSeeded) {
    const FineGrid g(4.0, 4.0, 8, 8, BoundarySpec::benchmark());
    FieldGenerator gen = constant_field(1.0);
    gen.noise = 0.5;
    gen.seed = 3;
    const CellScalarField a = generate_field(gen, g, "k");
    EXPECT_EQ(a.values(), generate_field(gen, g, "k").values());
    for (double v : a.values()) {
        EXPECT_GE(v, std::pow(10.0, -0.5));
        EXPECT_LE(v, std::pow(10.0, 0.5));
    }
    gen.seed = 4;
    EXPECT_NE(a.values(), generate_field(gen, g, "k").values());
}

TEST(Raster, RoundTripIsExact) {
    const std::string path = temp_path("lrbms_raster.txt");
    const std::vector<double> v{0.1, 1.0 / 3.0, 2e-9, 7.0, 1e300, 5.5};
    write_raster(path, 3, 2, v);
    EXPECT_EQ(read_raster(path, 3, 2), v);
    EXPECT_THROW(read_raster(path, 2, 3), ConfigError);
    std::filesystem::remove(path);
}

TEST(Raster, TruncatedFileIsRejected) {
    const std::string path = temp_path("lrbms_raster_short.txt");
    std::ofstream(path) << "2 2\n1 2 3\n";
    EXPECT_THROW(read_raster(path, 2, 2), IoError);
    std::filesystem::remove(path);
}

TEST(Raster, FileFieldFeedsGenerator) {
    const std::string path = temp_path("lrbms_raster_field.txt");
    write_raster(path, 2, 1, {3.0, 4.0});
    FieldGenerator gen;
    gen.kind = FieldGenerator::Kind::kFile;
    gen.path = path;
    const FineGrid g(2.0, 1.0, 2, 1, BoundarySpec::benchmark());
    EXPECT_EQ(generate_field(gen, g, "k").values(), (std::vector<double>{3.0, 4.0}));
    std::filesystem::remove(path);
}

}  // namespace
