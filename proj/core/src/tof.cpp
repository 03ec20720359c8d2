#include "lrbms/tof.hpp"

#include <algorithm>
#include <string>

#include "lrbms/error.hpp"

namespace lrbms {

TofSystem assemble_tof(const FineGrid& grid, const FaceFluxField& u,
                       const CellScalarField& porosity, int order) {
    const int bs = block_size_for(order);
    const int cells = grid.num_cells();
    TofSystem sys;
    sys.block_size = bs;
    sys.diagonal.assign(cells, DenseMatrix::Zero(bs, bs));
    sys.upwind.assign(cells, {});
    sys.rhs = Vector::Zero(static_cast<Eigen::Index>(cells) * bs);
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const GaussRule& rule = GaussRule::get(2);

    for (int c = 0; c < cells; ++c) {
        DenseMatrix& a = sys.diagonal[c];
        const Point b = grid.barycenter(c);
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            for (std::size_t j = 0; j < rule.points.size(); ++j) {
                const double xi = rule.points[i];
                const double eta = rule.points[j];
                const double w = grid.cell_area() * rule.weights[i] * rule.weights[j];
                const Point v = velocity_at(grid, u, c, {b.x + xi * grid.hx(), b.y + eta * grid.hy()});
                const auto phi = basis_values(xi, eta);
                for (int r = 0; r < bs; ++r) {
                    for (int s = 0; s < bs; ++s) a(r, s) -= w * phi[s] * dot(v, grads[r]);
                }
            }
        }
        sys.rhs[c * bs] = porosity[c] * grid.cell_area();

        for (int f : grid.cell_faces(c)) {
            const double un = u.outward(grid, f, c);
            if (un == 0.0) continue;
            const Face& face = grid.face(f);
            const int other = face.cells[0] == c ? face.cells[1] : face.cells[0];
            if (un < 0.0 && other < 0) continue;
            DenseMatrix local = DenseMatrix::Zero(bs, bs);
            const int source = un > 0.0 ? c : other;
            const FaceQuadrature q = face_quadrature(grid, f);
            for (std::size_t i = 0; i < q.points.size(); ++i) {
                const auto [xt, et] = local_coordinates(grid, c, q.points[i]);
                const auto [xs, es] = local_coordinates(grid, source, q.points[i]);
                const auto test = basis_values(xt, et);
                const auto trial = basis_values(xs, es);
                for (int r = 0; r < bs; ++r) {
                    for (int s = 0; s < bs; ++s) local(r, s) += q.weights[i] * un * trial[s] * test[r];
                }
            }
            if (source == c) {
                a += local;
            } else {
                sys.upwind[c].emplace_back(source, std::move(local));
            }
        }
    }
    return sys;
}

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& successors) {
    const int n = static_cast<int>(successors.size());
    std::vector<int> index(n, -1);
    std::vector<int> low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> components;
    int counter = 0;

    struct Frame {
        int node;
        std::size_t next;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            const int v = fr.node;
            if (fr.next < successors[v].size()) {
                const int w = successors[v][fr.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    // Tarjan emits sinks first.
    std::reverse(components.begin(), components.end());
    return components;
}

TofSolution solve_tof_detailed(const FineGrid& grid, const FaceFluxField& u,
                               const CellScalarField& porosity, int order) {
    if (u.max_abs() == 0.0) {
        throw DegenerateFlowError("time-of-flight: the velocity field vanishes everywhere");
    }
    const TofSystem sys = assemble_tof(grid, u, porosity, order);
    const int cells = grid.num_cells();
    const int bs = sys.block_size;

    std::vector<std::vector<int>> downstream(cells);
    for (int c = 0; c < cells; ++c) {
        for (const auto& [src, blk] : sys.upwind[c]) downstream[src].push_back(c);
    }
    for (auto& d : downstream) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }

    TofSolution out;
    out.components = strongly_connected_components(downstream);
    out.tau = DgField(cells, order);
    Vector& tau = out.tau.coefficients();
    std::vector<int> position(cells, -1);

    for (const auto& comp : out.components) {
        out.largest_component = std::max(out.largest_component, static_cast<int>(comp.size()));
        const int n = static_cast<int>(comp.size());
        for (int i = 0; i < n; ++i) position[comp[i]] = i;
        DenseMatrix a = DenseMatrix::Zero(n * bs, n * bs);
        Vector b(n * bs);
        for (int i = 0; i < n; ++i) {
            const int c = comp[i];
            a.block(i * bs, i * bs, bs, bs) = sys.diagonal[c];
            b.segment(i * bs, bs) = sys.rhs.segment(c * bs, bs);
            for (const auto& [src, blk] : sys.upwind[c]) {
                if (position[src] >= 0) {
                    a.block(i * bs, position[src] * bs, bs, bs) += blk;
                } else {
                    b.segment(i * bs, bs) -= blk * tau.segment(src * bs, bs);
                }
            }
        }
        Vector x;
        try {
            x = dense_solve(a, b);
        } catch (const SingularityError&) {
            throw DegenerateFlowError("time-of-flight: singular transport block at cell " +
                                      std::to_string(comp.front()) +
                                      " (stagnant cell or closed flow loop)");
        }
        for (int i = 0; i < n; ++i) tau.segment(comp[i] * bs, bs) = x.segment(i * bs, bs);
        for (int c : comp) position[c] = -1;
    }
    return out;
}

DgField solve_tof(const FineGrid& grid, const FaceFluxField& u, const CellScalarField& porosity,
                  int order) {
    return solve_tof_detailed(grid, u, porosity, order).tau;
}

}  // namespace lrbms
