#include "lrbms/mesh.hpp"

#include <cmath>
#include <string>

#include "lrbms/error.hpp"

namespace lrbms {

const char* to_string(Side side) {
    switch (side) {
        case Side::kLeft: return "left";
        case Side::kRight: return "right";
        case Side::kBottom: return "bottom";
        case Side::kTop: return "top";
    }
    return "?";
}

BoundarySpec BoundarySpec::uniform(SideTag tag) {
    BoundarySpec spec;
    spec.sides.fill(tag);
    return spec;
}

BoundarySpec BoundarySpec::benchmark() {
    BoundarySpec spec;
    spec[Side::kLeft] = {PressureBc::kDirichlet, true};
    spec[Side::kRight] = {PressureBc::kNeumann, false};
    spec[Side::kBottom] = {PressureBc::kNoFlow, false};
    spec[Side::kTop] = {PressureBc::kNoFlow, false};
    return spec;
}

FineGrid::FineGrid(double lx, double ly, int nx, int ny, BoundarySpec boundary)
    : lx_(lx), ly_(ly), nx_(nx), ny_(ny), boundary_(boundary) {
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw ConfigError("fine grid: domain extents must be positive");
    }
    if (nx < 1 || ny < 1) {
        throw ConfigError("fine grid: cell counts must be at least 1");
    }
    hx_ = lx / nx;
    hy_ = ly / ny;

    faces_.reserve(static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(ny + 1) * nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            Face f;
            f.axis = Axis::kX;
            f.center = {i * hx_, (j + 0.5) * hy_};
            f.length = hy_;
            if (i == 0) {
                f.cells = {cell_index(0, j), -1};
                f.normal = {-1.0, 0.0};
                f.boundary = true;
                f.side = Side::kLeft;
            } else if (i == nx) {
                f.cells = {cell_index(nx - 1, j), -1};
                f.normal = {1.0, 0.0};
                f.boundary = true;
                f.side = Side::kRight;
            } else {
                f.cells = {cell_index(i - 1, j), cell_index(i, j)};
                f.normal = {1.0, 0.0};
            }
            faces_.push_back(f);
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Face f;
            f.axis = Axis::kY;
            f.center = {(i + 0.5) * hx_, j * hy_};
            f.length = hx_;
            if (j == 0) {
                f.cells = {cell_index(i, 0), -1};
                f.normal = {0.0, -1.0};
                f.boundary = true;
                f.side = Side::kBottom;
            } else if (j == ny) {
                f.cells = {cell_index(i, ny - 1), -1};
                f.normal = {0.0, 1.0};
                f.boundary = true;
                f.side = Side::kTop;
            } else {
                f.cells = {cell_index(i, j - 1), cell_index(i, j)};
                f.normal = {0.0, 1.0};
            }
            faces_.push_back(f);
        }
    }
}

double FineGrid::cell_diameter() const { return std::sqrt(hx_ * hx_ + hy_ * hy_); }

Point FineGrid::barycenter(int cell) const {
    const auto [i, j] = cell_ij(cell);
    return {(i + 0.5) * hx_, (j + 0.5) * hy_};
}

bool FineGrid::contains(int cell, Point p) const {
    const Point b = barycenter(cell);
    const double tol = 1e-12;
    return std::abs(p.x - b.x) <= 0.5 * hx_ * (1.0 + tol) &&
           std::abs(p.y - b.y) <= 0.5 * hy_ * (1.0 + tol);
}

std::array<int, 4> FineGrid::cell_faces(int cell) const {
    const auto [i, j] = cell_ij(cell);
    return {x_face(i, j), x_face(i + 1, j), y_face(i, j), y_face(i, j + 1)};
}

std::vector<int> FineGrid::neighbors(int cell) const {
    std::vector<int> out;
    out.reserve(4);
    for (int f : cell_faces(cell)) {
        const Face& face = faces_[f];
        if (face.boundary) continue;
        out.push_back(face.cells[0] == cell ? face.cells[1] : face.cells[0]);
    }
    return out;
}

CoarseGrid::CoarseGrid(const FineGrid& fine, int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) {
        throw ConfigError("coarse grid: cell counts must be at least 1");
    }
    if (fine.nx() % nx != 0) {
        throw ConfigError("coarse grid: Nx = " + std::to_string(nx) + " does not divide nx = " +
                          std::to_string(fine.nx()));
    }
    if (fine.ny() % ny != 0) {
        throw ConfigError("coarse grid: Ny = " + std::to_string(ny) + " does not divide ny = " +
                          std::to_string(fine.ny()));
    }
    fx_ = fine.nx() / nx;
    fy_ = fine.ny() / ny;

    coarse_of_.resize(fine.num_cells());
    local_index_.resize(fine.num_cells());
    cells_of_.assign(num_cells(), {});
    for (int c = 0; c < fine.num_cells(); ++c) {
        const auto [i, j] = fine.cell_ij(c);
        const int e = (j / fy_) * nx_ + (i / fx_);
        coarse_of_[c] = e;
        local_index_[c] = static_cast<int>(cells_of_[e].size());
        cells_of_[e].push_back(c);
    }

    // Coarse faces on vertical lines, then horizontal lines, as on the fine grid.
    coarse_face_of_.assign(fine.num_faces(), -1);
    for (int J = 0; J < ny_; ++J) {
        for (int I = 0; I <= nx_; ++I) {
            CoarseFace cf;
            cf.boundary = (I == 0 || I == nx_);
            if (I == 0) {
                cf.cells = {J * nx_, -1};
            } else if (I == nx_) {
                cf.cells = {J * nx_ + nx_ - 1, -1};
            } else {
                cf.cells = {J * nx_ + I - 1, J * nx_ + I};
            }
            for (int j = J * fy_; j < (J + 1) * fy_; ++j) {
                const int f = fine.x_face(I * fx_, j);
                cf.fine_faces.push_back(f);
                coarse_face_of_[f] = static_cast<int>(faces_.size());
            }
            faces_.push_back(std::move(cf));
        }
    }
    for (int J = 0; J <= ny_; ++J) {
        for (int I = 0; I < nx_; ++I) {
            CoarseFace cf;
            cf.boundary = (J == 0 || J == ny_);
            if (J == 0) {
                cf.cells = {I, -1};
            } else if (J == ny_) {
                cf.cells = {(ny_ - 1) * nx_ + I, -1};
            } else {
                cf.cells = {(J - 1) * nx_ + I, J * nx_ + I};
            }
            for (int i = I * fx_; i < (I + 1) * fx_; ++i) {
                const int f = fine.y_face(i, J * fy_);
                cf.fine_faces.push_back(f);
                coarse_face_of_[f] = static_cast<int>(faces_.size());
            }
            faces_.push_back(std::move(cf));
        }
    }
}

int CoarseGrid::num_interior_faces() const {
    int n = 0;
    for (const auto& f : faces_) n += f.boundary ? 0 : 1;
    return n;
}

std::vector<int> CoarseGrid::neighbors(int coarse_cell) const {
    const int I = coarse_cell % nx_;
    const int J = coarse_cell / nx_;
    std::vector<int> out;
    if (I > 0) out.push_back(coarse_cell - 1);
    if (I + 1 < nx_) out.push_back(coarse_cell + 1);
    if (J > 0) out.push_back(coarse_cell - nx_);
    if (J + 1 < ny_) out.push_back(coarse_cell + nx_);
    return out;
}

FineGrid build_fine_grid(double lx, double ly, int nx, int ny, const BoundarySpec& boundary) {
    return FineGrid(lx, ly, nx, ny, boundary);
}

CoarseGrid build_coarse_grid(const FineGrid& fine, int nx, int ny) {
    return CoarseGrid(fine, nx, ny);
}

}  // namespace lrbms
