#include "lrbms/velocity.hpp"

#include <algorithm>
#include <cmath>

#include "lrbms/mobility.hpp"
#include "lrbms/pressure.hpp"

namespace lrbms {

double FaceFluxField::max_abs() const {
    double m = 0.0;
    for (double v : flux_) m = std::max(m, std::abs(v));
    return m;
}

FaceFluxField reconstruct_velocity(const FlowProblem& problem, const DgField& p,
                                   const DgField& lambda_w, const DgField& lambda_n) {
    const FineGrid& grid = problem.grid;
    const CellScalarField& k = problem.permeability;
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const double rho_w = problem.fluids.rho_w;
    const double rho_n = problem.fluids.rho_n;
    FaceFluxField u(grid.num_faces());

    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        const FaceWeights w = face_weights(grid, k, f, problem.mean_weighting);
        if (face.boundary) {
            const PressureBc bc = grid.tag(face.side).pressure;
            if (bc == PressureBc::kNoFlow) continue;
            if (bc == PressureBc::kNeumann) {
                const FaceQuadrature q = face_quadrature(grid, f);
                double integral = 0.0;
                for (std::size_t i = 0; i < q.points.size(); ++i) {
                    integral += q.weights[i] * problem.boundary.pressure_at(face.side, q.points[i]);
                }
                u[f] = integral / face.length;
                continue;
            }
        }
        const double sigma = penalty(grid, k, f, problem.penalty_base, problem.fluids.mu_w,
                                     problem.fluids.mu_n);
        const FaceQuadrature q = face_quadrature(grid, f);
        const int sides = face.boundary ? 1 : 2;
        double integral = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            double mean_flux = 0.0;
            double traces[2] = {0.0, 0.0};
            for (int s = 0; s < sides; ++s) {
                const int c = face.cells[s];
                const auto [xi, eta] = local_coordinates(grid, c, q.points[i]);
                const double lw = lambda_w.local_value(c, xi, eta);
                const double ln = lambda_n.local_value(c, xi, eta);
                const Point grad_p = p.slope_x(c) * grads[1] + p.slope_y(c) * grads[2];
                const double tau = s == 0 ? w.tau1 : w.tau2;
                const double kc = s == 0 ? w.a1 : w.a2;
                const double g_rho = lw * rho_w + ln * rho_n;
                mean_flux += tau * kc * ((lw + ln) * dot(grad_p, face.normal) -
                                         g_rho * dot(problem.gravity, face.normal));
                traces[s] = p.local_value(c, xi, eta);
            }
            const double jump = face.boundary
                                    ? traces[0] - problem.boundary.pressure_at(face.side, q.points[i])
                                    : traces[0] - traces[1];
            integral += q.weights[i] * (-mean_flux + sigma / face.length * jump);
        }
        u[f] = integral / face.length;
    }
    return u;
}

FaceFluxField reconstruct_velocity(const FlowProblem& problem, const DgField& p,
                                   const DgField& s) {
    const Mobilities mob = linear_mobilities(s, problem.fluids.mu_w, problem.fluids.mu_n);
    return reconstruct_velocity(problem, p, mob.w, mob.n);
}

std::vector<double> cell_integrals(const FineGrid& grid, const ScalarFunction& q) {
    std::vector<double> out(grid.num_cells(), 0.0);
    if (!q) return out;
    const GaussRule& rule = GaussRule::get(2);
    for (int c = 0; c < grid.num_cells(); ++c) {
        const Point b = grid.barycenter(c);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            for (std::size_t j = 0; j < rule.points.size(); ++j) {
                sum += rule.weights[i] * rule.weights[j] *
                       q({b.x + rule.points[i] * grid.hx(), b.y + rule.points[j] * grid.hy()});
            }
        }
        out[c] = sum * grid.cell_area();
    }
    return out;
}

std::vector<double> divergence_defect(const FineGrid& grid, const FaceFluxField& u,
                                      const ScalarFunction& q1) {
    std::vector<double> defect = cell_integrals(grid, q1);
    for (double& d : defect) d = -d;
    for (int c = 0; c < grid.num_cells(); ++c) {
        for (int f : grid.cell_faces(c)) defect[c] += grid.face(f).length * u.outward(grid, f, c);
    }
    return defect;
}

std::vector<double> coarse_flux_balance(const FineGrid& grid, const CoarseGrid& coarse,
                                        const FaceFluxField& u, const ScalarFunction& q1) {
    const std::vector<double> fine = divergence_defect(grid, u, q1);
    std::vector<double> out(coarse.num_cells(), 0.0);
    for (int e = 0; e < coarse.num_cells(); ++e) {
        for (int c : coarse.cells_of(e)) out[e] += fine[c];
    }
    return out;
}

Point velocity_at(const FineGrid& grid, const FaceFluxField& u, int cell, Point p) {
    const auto f = grid.cell_faces(cell);
    const auto [xi, eta] = local_coordinates(grid, cell, p);
    const double ux_left = u[f[0]] * grid.face(f[0]).normal.x;
    const double ux_right = u[f[1]] * grid.face(f[1]).normal.x;
    const double uy_bottom = u[f[2]] * grid.face(f[2]).normal.y;
    const double uy_top = u[f[3]] * grid.face(f[3]).normal.y;
    return {ux_left * (0.5 - xi) + ux_right * (0.5 + xi),
            uy_bottom * (0.5 - eta) + uy_top * (0.5 + eta)};
}

double max_corner_speed(const FineGrid& grid, const FaceFluxField& u, int cell) {
    const Point b = grid.barycenter(cell);
    double m = 0.0;
    for (double sx : {-0.5, 0.5}) {
        for (double sy : {-0.5, 0.5}) {
            const Point v = velocity_at(grid, u, cell, {b.x + sx * grid.hx(), b.y + sy * grid.hy()});
            m = std::max(m, std::sqrt(dot(v, v)));
        }
    }
    return m;
}

std::vector<double> mass_loss(const FineGrid& grid, const FaceFluxField& u) {
    const std::vector<double> div = divergence_defect(grid, u);
    std::vector<double> zeta(grid.num_cells(), 0.0);
    for (int c = 0; c < grid.num_cells(); ++c) {
        const double speed = max_corner_speed(grid, u, c);
        if (speed >= 1e-14) zeta[c] = std::abs(div[c]) / speed;
    }
    return zeta;
}

double cfl_number(const FineGrid& grid, const FaceFluxField& u, const CellScalarField& porosity,
                  double dt) {
    double cfl = 0.0;
    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        const double h = face.axis == Axis::kX ? grid.hx() : grid.hy();
        for (int c : face.cells) {
            if (c < 0) continue;
            cfl = std::max(cfl, std::abs(u[f]) * dt / (porosity[c] * h));
        }
    }
    return cfl;
}

}  // namespace lrbms
