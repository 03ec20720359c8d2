#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace lrbms {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

enum class Side : std::uint8_t { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };
inline constexpr std::array<Side, 4> kAllSides = {Side::kLeft, Side::kRight, Side::kBottom,
                                                  Side::kTop};
const char* to_string(Side side);

enum class PressureBc : std::uint8_t {
    kDirichlet,  ///< prescribed pressure p_D
    kNeumann,    ///< prescribed outward normal velocity u_N
    kNoFlow,     ///< u_N = 0
};

struct SideTag {
    PressureBc pressure = PressureBc::kNoFlow;
    bool saturation_dirichlet = false;
};

/// One tag per side of the rectangle, indexed by Side.
struct BoundarySpec {
    std::array<SideTag, 4> sides{};

    SideTag& operator[](Side s) { return sides[static_cast<int>(s)]; }
    const SideTag& operator[](Side s) const { return sides[static_cast<int>(s)]; }

    static BoundarySpec uniform(SideTag tag);
    /// Dirichlet pressure and saturation on the left, Neumann outflow on the right,
    /// no-flow on bottom and top.
    static BoundarySpec benchmark();
};

enum class Axis : std::uint8_t { kX, kY };

struct Face {
    /// cells[0] is the first cell; cells[1] is -1 on the boundary.
    std::array<int, 2> cells{-1, -1};
    /// Unit normal pointing from cells[0] to cells[1], or outward on the boundary.
    Point normal;
    Point center;
    double length = 0.0;
    /// Axis of the normal: kX for faces on vertical lines.
    Axis axis = Axis::kX;
    bool boundary = false;
    Side side = Side::kLeft;  ///< only meaningful on boundary faces

    bool interior() const { return !boundary; }
    Point tangent() const { return {-normal.y, normal.x}; }
};

/// Local faces of a cell in the order left, right, bottom, top.
enum class LocalFace : std::uint8_t { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

/// Axis-aligned structured rectangular grid.
///
/// Cells are numbered row-major (`c = j * nx + i`). Faces on vertical lines come
/// first (`j * (nx + 1) + i`), followed by faces on horizontal lines
/// (`nx_faces + j * nx + i`).
class FineGrid {
public:
    FineGrid() = default;
    FineGrid(double lx, double ly, int nx, int ny, BoundarySpec boundary);

    double lx() const { return lx_; }
    double ly() const { return ly_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    /// Grid size, max(hx, hy).
    double h() const { return hx_ > hy_ ? hx_ : hy_; }
    double cell_diameter() const;
    double cell_area() const { return hx_ * hy_; }

    int num_cells() const { return nx_ * ny_; }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_x_faces() const { return (nx_ + 1) * ny_; }

    int cell_index(int i, int j) const { return j * nx_ + i; }
    std::array<int, 2> cell_ij(int cell) const { return {cell % nx_, cell / nx_}; }
    Point barycenter(int cell) const;
    /// Closure test with a relative tolerance of 1e-12 of the cell size.
    bool contains(int cell, Point p) const;

    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }
    int x_face(int i, int j) const { return j * (nx_ + 1) + i; }
    int y_face(int i, int j) const { return num_x_faces() + j * nx_ + i; }
    /// Face ids of a cell in LocalFace order.
    std::array<int, 4> cell_faces(int cell) const;
    /// Face-sharing neighbours (2 to 4 entries).
    std::vector<int> neighbors(int cell) const;

    const BoundarySpec& boundary() const { return boundary_; }
    const SideTag& tag(Side s) const { return boundary_[s]; }

private:
    double lx_ = 0.0;
    double ly_ = 0.0;
    int nx_ = 0;
    int ny_ = 0;
    double hx_ = 0.0;
    double hy_ = 0.0;
    BoundarySpec boundary_;
    std::vector<Face> faces_;
};

struct CoarseFace {
    std::array<int, 2> cells{-1, -1};
    bool boundary = false;
    std::vector<int> fine_faces;
};

/// Coarse partition matching a FineGrid: every coarse cell is a block of
/// (nx/Nx) x (ny/Ny) fine cells.
class CoarseGrid {
public:
    CoarseGrid() = default;
    CoarseGrid(const FineGrid& fine, int nx, int ny);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int num_cells() const { return nx_ * ny_; }
    int fine_per_x() const { return fx_; }
    int fine_per_y() const { return fy_; }

    int coarse_of(int fine_cell) const { return coarse_of_[fine_cell]; }
    /// Fine cells of a coarse cell in ascending (row-major) order.
    const std::vector<int>& cells_of(int coarse_cell) const { return cells_of_[coarse_cell]; }
    /// Position of a fine cell inside its coarse cell's cell list.
    int local_index(int fine_cell) const { return local_index_[fine_cell]; }

    const std::vector<CoarseFace>& faces() const { return faces_; }
    int num_interior_faces() const;
    /// Coarse face containing a fine face, or -1 if the fine face is inside a coarse cell.
    int coarse_face_of(int fine_face) const { return coarse_face_of_[fine_face]; }
    /// Coarse cells sharing a face with `coarse_cell`.
    std::vector<int> neighbors(int coarse_cell) const;

private:
    int nx_ = 0;
    int ny_ = 0;
    int fx_ = 0;
    int fy_ = 0;
    std::vector<int> coarse_of_;
    std::vector<int> local_index_;
    std::vector<std::vector<int>> cells_of_;
    std::vector<CoarseFace> faces_;
    std::vector<int> coarse_face_of_;
};

FineGrid build_fine_grid(double lx, double ly, int nx, int ny, const BoundarySpec& boundary);
CoarseGrid build_coarse_grid(const FineGrid& fine, int nx, int ny);

}  // namespace lrbms
