#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "app/output.hpp"
#include "lrbms/error.hpp"

using namespace lrbms;
using namespace lrbms::app;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const FineGrid kGrid(2.0, 1.0, 2, 1, BoundarySpec::benchmark());

TEST(Vtk, MatchesGoldenFile) {
    const std::string expected = read_file(std::string(LRBMS_TEST_DATA) + "/golden_2x1.vtk");
    ASSERT_FALSE(expected.empty());
    EXPECT_EQ(vtk_string(kGrid, {{"s", {0.25, 1.0}}}, {{"tau", {0, 1, 2, 3, 4, 5}}}), expected);
}

TEST(Vtk, RefusesNonFiniteValues) {
    try {
        vtk_string(kGrid, {{"s", {0.25, std::nan("")}}});
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("s"), std::string::npos);
        EXPECT_NE(msg.find("1"), std::string::npos);
    }
}

TEST(Vtk, RejectsWrongLength) {
    EXPECT_ANY_THROW(vtk_string(kGrid, {{"s", {0.25}}}));
}

TEST(Vtk, FullPrecision) {
    const std::string out = vtk_string(kGrid, {{"s", {1.0 / 3.0, 0.1}}});
    EXPECT_NE(out.find("0.33333333333333331"), std::string::npos);
}

TEST(Trajectory, SaveLoadRoundTrip) {
    Trajectory run;
    DgField s(2, 1);
    s.coefficients() << 0.1, 0.2, 0.3, 0.4, 0.5, 1.0 / 3.0;
    run.saturation = {DgField::constant(2, 1, 0.0), s};
    run.pressure = {s};
    const std::string path = (std::filesystem::temp_directory_path() / "lrbms_traj.bin").string();
    save_trajectory(path, kGrid, run);
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    const Trajectory back = load_trajectory(path, &nx, &ny, &lx);
    std::filesystem::remove(path);
    EXPECT_EQ(nx, 2);
    EXPECT_EQ(ny, 1);
    EXPECT_EQ(lx, 2.0);
    ASSERT_EQ(back.saturation.size(), 2u);
    EXPECT_EQ(back.saturation[1].coefficients(), s.coefficients());
    EXPECT_EQ(back.pressure[0].coefficients(), s.coefficients());
}

TEST(Trajectory, GarbageFileIsIoError) {
    const std::string path = (std::filesystem::temp_directory_path() / "lrbms_garbage.bin").string();
    std::ofstream(path) << "not a trajectory";
    EXPECT_THROW(load_trajectory(path), IoError);
    std::filesystem::remove(path);
}

TEST(MetricsCsv, HeaderAndRows) {
    RunMetrics m;
    m.e_l2_s = {0.5, 0.25};
    m.e_h1_s = {1.0, 1.0};
    m.e_l2_p = {0.0, 0.125};
    m.e_h1_p = {0.0, 0.0};
    const std::string path = (std::filesystem::temp_directory_path() / "lrbms_metrics.csv").string();
    write_metrics_csv(path, m);
    const std::string text = read_file(path);
    std::filesystem::remove(path);
    EXPECT_EQ(text.rfind("step,e_L2_s,e_H1_s,e_L2_p,e_H1_p\n", 0), 0u);
    EXPECT_NE(text.find("\n2,0.25,1,0.125,0\n"), std::string::npos);
}

TEST(CellMeans, TakesConstantCoefficients) {
    DgField f(2, 1);
    f.coefficients() << 1.0, 5.0, 5.0, 2.0, 5.0, 5.0;
    EXPECT_EQ(cell_means(f), (std::vector<double>{1.0, 2.0}));
}

}  // namespace
