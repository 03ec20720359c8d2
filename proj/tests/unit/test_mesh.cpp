#include <gtest/gtest.h>

#include <set>

#include "lrbms/error.hpp"
#include "lrbms/mesh.hpp"

namespace lrbms {
namespace {

TEST(FineGrid, BenchmarkSizeHas64000Cells) {
    const FineGrid g(300.0, 60.0, 400, 160, BoundarySpec::benchmark());
    EXPECT_EQ(g.num_cells(), 64000);
    EXPECT_EQ(g.num_faces(), 400 * 161 + 160 * 401);
}

TEST(FineGrid, SingleCellHasFourBoundaryFaces) {
    const FineGrid g(1.0, 1.0, 1, 1, BoundarySpec::uniform({PressureBc::kDirichlet, false}));
    ASSERT_EQ(g.num_faces(), 4);
    for (const Face& f : g.faces()) {
        EXPECT_TRUE(f.boundary);
        EXPECT_EQ(f.cells[0], 0);
        EXPECT_EQ(f.cells[1], -1);
    }
}

TEST(FineGrid, TwoCellsShareOneFaceWithPositiveXNormal) {
    const FineGrid g(1.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    int interior = 0;
    for (const Face& f : g.faces()) {
        if (f.boundary) continue;
        ++interior;
        EXPECT_EQ(f.cells[0], 0);
        EXPECT_EQ(f.cells[1], 1);
        EXPECT_DOUBLE_EQ(f.normal.x, 1.0);
        EXPECT_DOUBLE_EQ(f.normal.y, 0.0);
        EXPECT_DOUBLE_EQ(f.center.x, 0.5);
    }
    EXPECT_EQ(interior, 1);
}

TEST(FineGrid, BoundaryNormalsPointOutward) {
    const FineGrid g(3.0, 2.0, 3, 2, BoundarySpec::uniform({}));
    for (const Face& f : g.faces()) {
        if (!f.boundary) continue;
        const Point b = g.barycenter(f.cells[0]);
        EXPECT_GT(dot(f.normal, f.center - b), 0.0);
        switch (f.side) {
            case Side::kLeft: EXPECT_DOUBLE_EQ(f.center.x, 0.0); break;
            case Side::kRight: EXPECT_DOUBLE_EQ(f.center.x, 3.0); break;
            case Side::kBottom: EXPECT_DOUBLE_EQ(f.center.y, 0.0); break;
            case Side::kTop: EXPECT_DOUBLE_EQ(f.center.y, 2.0); break;
        }
    }
}

TEST(FineGrid, FaceOrderingIsXFacesFirst) {
    const FineGrid g(4.0, 3.0, 4, 3, BoundarySpec::uniform({}));
    for (int f = 0; f < g.num_faces(); ++f) {
        EXPECT_EQ(g.face(f).axis, f < g.num_x_faces() ? Axis::kX : Axis::kY);
    }
    EXPECT_EQ(g.x_face(2, 1), 1 * 5 + 2);
    EXPECT_EQ(g.y_face(2, 1), g.num_x_faces() + 4 + 2);
}

TEST(FineGrid, AreasSumToDomain) {
    const FineGrid g(300.0, 60.0, 37, 11, BoundarySpec::uniform({}));
    double area = 0.0;
    for (int c = 0; c < g.num_cells(); ++c) area += g.cell_area();
    EXPECT_NEAR(area, 300.0 * 60.0, 1e-12 * 18000.0);
    EXPECT_DOUBLE_EQ(g.h(), std::max(300.0 / 37, 60.0 / 11));
}

TEST(FineGrid, InteriorFacesHaveTwoCellsBoundaryOne) {
    const FineGrid g(2.0, 1.0, 5, 4, BoundarySpec::uniform({}));
    std::vector<int> count(g.num_cells(), 0);
    for (const Face& f : g.faces()) {
        EXPECT_GE(f.cells[0], 0);
        if (f.boundary) {
            EXPECT_EQ(f.cells[1], -1);
        } else {
            ASSERT_GE(f.cells[1], 0);
            // the second cell lies in the normal direction
            EXPECT_GT(dot(f.normal, g.barycenter(f.cells[1]) - g.barycenter(f.cells[0])), 0.0);
        }
        for (int c : f.cells) {
            if (c >= 0) ++count[c];
        }
    }
    for (int c : count) EXPECT_EQ(c, 4);
}

TEST(FineGrid, CellFacesMatchFaceCells) {
    const FineGrid g(2.0, 1.0, 4, 3, BoundarySpec::uniform({}));
    for (int c = 0; c < g.num_cells(); ++c) {
        const auto faces = g.cell_faces(c);
        for (int f : faces) {
            const Face& face = g.face(f);
            EXPECT_TRUE(face.cells[0] == c || face.cells[1] == c);
        }
        EXPECT_EQ(g.face(faces[0]).axis, Axis::kX);
        EXPECT_LT(g.face(faces[0]).center.x, g.face(faces[1]).center.x);
        EXPECT_LT(g.face(faces[2]).center.y, g.face(faces[3]).center.y);
    }
}

TEST(FineGrid, NeighboursAreSymmetric) {
    const FineGrid g(1.0, 1.0, 3, 3, BoundarySpec::uniform({}));
    EXPECT_EQ(g.neighbors(4).size(), 4u);
    EXPECT_EQ(g.neighbors(0).size(), 2u);
    for (int c = 0; c < g.num_cells(); ++c) {
        for (int n : g.neighbors(c)) {
            const auto back = g.neighbors(n);
            EXPECT_NE(std::find(back.begin(), back.end(), c), back.end());
        }
    }
}

TEST(FineGrid, ContainsUsesClosure) {
    const FineGrid g(2.0, 1.0, 2, 1, BoundarySpec::uniform({}));
    EXPECT_TRUE(g.contains(0, {1.0, 0.5}));
    EXPECT_TRUE(g.contains(1, {1.0, 0.5}));
    EXPECT_FALSE(g.contains(0, {1.5, 0.5}));
}

TEST(FineGrid, RejectsBadDimensions) {
    EXPECT_THROW(FineGrid(0.0, 1.0, 1, 1, {}), ConfigError);
    EXPECT_THROW(FineGrid(1.0, -1.0, 1, 1, {}), ConfigError);
    EXPECT_THROW(FineGrid(1.0, 1.0, 0, 1, {}), ConfigError);
    EXPECT_THROW(FineGrid(1.0, 1.0, 1, -2, {}), ConfigError);
}

TEST(FineGrid, BenchmarkTags) {
    const BoundarySpec b = BoundarySpec::benchmark();
    EXPECT_EQ(b[Side::kLeft].pressure, PressureBc::kDirichlet);
    EXPECT_TRUE(b[Side::kLeft].saturation_dirichlet);
    EXPECT_EQ(b[Side::kRight].pressure, PressureBc::kNeumann);
    EXPECT_EQ(b[Side::kBottom].pressure, PressureBc::kNoFlow);
    EXPECT_EQ(b[Side::kTop].pressure, PressureBc::kNoFlow);
}

TEST(CoarseGrid, BenchmarkPartitionHas32Cells) {
    const FineGrid g(300.0, 60.0, 400, 160, BoundarySpec::benchmark());
    const CoarseGrid c(g, 16, 2);
    EXPECT_EQ(c.num_cells(), 32);
    EXPECT_EQ(c.fine_per_x(), 25);
    EXPECT_EQ(c.fine_per_y(), 80);
}

TEST(CoarseGrid, SingleCoarseCellOwnsEverything) {
    const FineGrid g(1.0, 1.0, 4, 2, BoundarySpec::uniform({}));
    const CoarseGrid c(g, 1, 1);
    for (int f = 0; f < g.num_cells(); ++f) EXPECT_EQ(c.coarse_of(f), 0);
    EXPECT_EQ(c.num_interior_faces(), 0);
    EXPECT_EQ(c.cells_of(0).size(), 8u);
}

TEST(CoarseGrid, TwoByOneHasOneInteriorFaceOfTwoFineFaces) {
    const FineGrid g(1.0, 1.0, 4, 2, BoundarySpec::uniform({}));
    const CoarseGrid c(g, 2, 1);
    ASSERT_EQ(c.num_interior_faces(), 1);
    // fine faces on x = 1/2: x-faces with i = 2 in both rows
    const std::set<int> expected{g.x_face(2, 0), g.x_face(2, 1)};
    for (const CoarseFace& cf : c.faces()) {
        if (cf.boundary) continue;
        EXPECT_EQ(std::set<int>(cf.fine_faces.begin(), cf.fine_faces.end()), expected);
        EXPECT_EQ(cf.cells[0], 0);
        EXPECT_EQ(cf.cells[1], 1);
    }
}

TEST(CoarseGrid, FineFacesOnCoarseSkeletonArePartitioned) {
    const FineGrid g(3.0, 2.0, 6, 4, BoundarySpec::uniform({}));
    const CoarseGrid c(g, 3, 2);
    std::vector<int> hits(g.num_faces(), 0);
    for (std::size_t k = 0; k < c.faces().size(); ++k) {
        const CoarseFace& cf = c.faces()[k];
        EXPECT_EQ(static_cast<int>(cf.fine_faces.size()), 2);
        for (int f : cf.fine_faces) {
            ++hits[f];
            EXPECT_EQ(c.coarse_face_of(f), static_cast<int>(k));
        }
    }
    for (int f = 0; f < g.num_faces(); ++f) {
        const Face& face = g.face(f);
        const bool on_skeleton =
            face.boundary || c.coarse_of(face.cells[0]) != c.coarse_of(face.cells[1]);
        EXPECT_EQ(hits[f], on_skeleton ? 1 : 0) << "face " << f;
        if (!on_skeleton) EXPECT_EQ(c.coarse_face_of(f), -1);
    }
}

TEST(CoarseGrid, LocalIndexRoundTrips) {
    const FineGrid g(3.0, 2.0, 6, 4, BoundarySpec::uniform({}));
    const CoarseGrid c(g, 3, 2);
    for (int e = 0; e < c.num_cells(); ++e) {
        const auto& cells = c.cells_of(e);
        EXPECT_TRUE(std::is_sorted(cells.begin(), cells.end()));
        for (std::size_t k = 0; k < cells.size(); ++k) {
            EXPECT_EQ(c.coarse_of(cells[k]), e);
            EXPECT_EQ(c.local_index(cells[k]), static_cast<int>(k));
        }
    }
    EXPECT_EQ(c.neighbors(0).size(), 2u);
}

TEST(CoarseGrid, RejectsNonDividingCounts) {
    const FineGrid g(1.0, 1.0, 6, 4, BoundarySpec::uniform({}));
    EXPECT_THROW(CoarseGrid(g, 4, 2), ConfigError);
    EXPECT_THROW(CoarseGrid(g, 3, 3), ConfigError);
    EXPECT_THROW(CoarseGrid(g, 0, 1), ConfigError);
}

}  // namespace
}  // namespace lrbms
