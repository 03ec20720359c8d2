#include "lrbms/transport.hpp"

#include <algorithm>
#include <cmath>

#include "lrbms/pressure.hpp"

namespace lrbms {

double fractional_flow(double s, double mu_w, double mu_n) {
    const double c = std::clamp(s, 0.0, 1.0);
    const double lw = c / mu_w;
    const double ln = (1.0 - c) / mu_n;
    return lw / (lw + ln);
}

namespace {

bool saturation_face(const FineGrid& grid, const Face& f) {
    return f.interior() || grid.tag(f.side).saturation_dirichlet;
}

}  // namespace

SaturationStepper::SaturationStepper(const FlowProblem& problem) : problem_(&problem) {
    const FineGrid& grid = problem.grid;
    sigma_.resize(grid.num_faces());
    for (int f = 0; f < grid.num_faces(); ++f) {
        sigma_[f] = penalty(grid, problem.permeability, f, problem.penalty_base,
                            problem.fluids.mu_w, problem.fluids.mu_n);
    }
    const int bs = block_size_for(problem.order);
    source_moments_.assign(static_cast<std::size_t>(grid.num_cells()) * bs, 0.0);
    if (problem.saturation_source) {
        const GaussRule& rule = GaussRule::get(2);
        for (int c = 0; c < grid.num_cells(); ++c) {
            const Point b = grid.barycenter(c);
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                for (std::size_t j = 0; j < rule.points.size(); ++j) {
                    const double xi = rule.points[i];
                    const double eta = rule.points[j];
                    const double w = grid.cell_area() * rule.weights[i] * rule.weights[j] *
                                     problem.saturation_source({b.x + xi * grid.hx(),
                                                                b.y + eta * grid.hy()});
                    const auto phi = basis_values(xi, eta);
                    for (int r = 0; r < bs; ++r) source_moments_[c * bs + r] += w * phi[r];
                }
            }
        }
    }
}

// int_F n.{u + lambda_n(s)(rho_w - rho_n) K G} f(chi) [phi_i] for the basis
// function phi_i of `side`, including the side's jump sign.
double SaturationStepper::face_upwind_integral(const DgField& s, const FaceFluxField& u, int face,
                                               int side, int basis_index) const {
    const FlowProblem& pb = *problem_;
    const FineGrid& grid = pb.grid;
    const Face& f = grid.face(face);
    const double un = u[face];
    const FaceQuadrature q = face_quadrature(grid, face);
    const bool gravity = pb.has_gravity() && f.interior();
    FaceWeights w;
    if (gravity) w = face_weights(grid, pb.permeability, face, pb.mean_weighting);
    const double drho = pb.fluids.rho_w - pb.fluids.rho_n;
    const double sign = side == 0 ? 1.0 : -1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) {
        double chi;
        if (f.boundary) {
            const bool inflow = un < 0.0;
            chi = inflow && grid.tag(f.side).saturation_dirichlet
                      ? pb.boundary.saturation_at(f.side)
                      : trace(grid, s, face, 0, q.points[i]);
        } else {
            chi = trace(grid, s, face, un >= 0.0 ? 0 : 1, q.points[i]);
        }
        double advective = un;
        if (gravity) {
            for (int k = 0; k < 2; ++k) {
                const double sk = std::clamp(trace(grid, s, face, k, q.points[i]), 0.0, 1.0);
                const double ln = (1.0 - sk) / pb.fluids.mu_n;
                const double tau = k == 0 ? w.tau1 : w.tau2;
                const double kk = k == 0 ? w.a1 : w.a2;
                advective += tau * ln * drho * kk * dot(pb.gravity, f.normal);
            }
        }
        const auto [xi, eta] = local_coordinates(grid, f.cells[side], q.points[i]);
        const double phi = basis_values(xi, eta)[basis_index];
        sum += q.weights[i] * advective * fractional_flow(chi, pb.fluids.mu_w, pb.fluids.mu_n) *
               sign * phi;
    }
    return sum;
}

DgField SaturationStepper::step(const DgField& s, const FaceFluxField& u, double dt) const {
    const FlowProblem& pb = *problem_;
    const FineGrid& grid = pb.grid;
    const int bs = s.block_size();
    const double area = grid.cell_area();
    const Eigen::VectorXd mass = mass_diagonal(grid, s.order());
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const GaussRule& rule = GaussRule::get(2);
    const double drho = pb.fluids.rho_w - pb.fluids.rho_n;
    const double mu_w = pb.fluids.mu_w;
    const double mu_n = pb.fluids.mu_n;

    Eigen::VectorXd rhs(s.num_dofs());
    for (int c = 0; c < grid.num_cells(); ++c) {
        for (int r = 0; r < bs; ++r) {
            rhs[c * bs + r] = pb.porosity[c] / dt * mass[c * bs + r] * s.coefficients()[c * bs + r] +
                              source_moments_[c * bs + r];
        }
    }

    if (bs > 1) {
        for (int c = 0; c < grid.num_cells(); ++c) {
            const Point b = grid.barycenter(c);
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                for (std::size_t j = 0; j < rule.points.size(); ++j) {
                    const double xi = rule.points[i];
                    const double eta = rule.points[j];
                    const double sv = std::clamp(s.local_value(c, xi, eta), 0.0, 1.0);
                    Point a = velocity_at(grid, u, c, {b.x + xi * grid.hx(), b.y + eta * grid.hy()});
                    if (pb.has_gravity()) {
                        a = a + ((1.0 - sv) / mu_n * drho * pb.permeability[c]) * pb.gravity;
                    }
                    const double w =
                        area * rule.weights[i] * rule.weights[j] * fractional_flow(sv, mu_w, mu_n);
                    for (int r = 1; r < bs; ++r) rhs[c * bs + r] += w * dot(a, grads[r]);
                }
            }
        }
    }

    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        const int sides = face.boundary ? 1 : 2;
        for (int side = 0; side < sides; ++side) {
            const int c = face.cells[side];
            for (int r = 0; r < bs; ++r) {
                rhs[c * bs + r] -= face_upwind_integral(s, u, f, side, r);
            }
        }
        if (!saturation_face(grid, face)) continue;
        const double coef = sigma_[f] / face.length;
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            const double jump = face.boundary
                                    ? trace(grid, s, f, 0, q.points[i]) -
                                          pb.boundary.saturation_at(face.side)
                                    : trace(grid, s, f, 0, q.points[i]) -
                                          trace(grid, s, f, 1, q.points[i]);
            for (int side = 0; side < sides; ++side) {
                const int c = face.cells[side];
                const auto [xi, eta] = local_coordinates(grid, c, q.points[i]);
                const auto phi = basis_values(xi, eta);
                const double sign = side == 0 ? 1.0 : -1.0;
                for (int r = 0; r < bs; ++r) {
                    rhs[c * bs + r] -= coef * q.weights[i] * jump * sign * phi[r];
                }
            }
        }
    }

    DgField out(grid.num_cells(), s.order());
    for (int c = 0; c < grid.num_cells(); ++c) {
        for (int r = 0; r < bs; ++r) {
            out.coefficients()[c * bs + r] =
                rhs[c * bs + r] / (pb.porosity[c] / dt * mass[c * bs + r]);
        }
    }
    return out;
}

double SaturationStepper::mass_change(const DgField& s, const FaceFluxField& u) const {
    const FlowProblem& pb = *problem_;
    const FineGrid& grid = pb.grid;
    const int bs = s.block_size();
    double total = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c) total += source_moments_[c * bs];
    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        if (!face.boundary) continue;
        total -= face_upwind_integral(s, u, f, 0, 0);
        if (!saturation_face(grid, face)) continue;
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            total -= sigma_[f] / face.length * q.weights[i] *
                     (trace(grid, s, f, 0, q.points[i]) - pb.boundary.saturation_at(face.side));
        }
    }
    return total;
}

DgField saturation_step(const FlowProblem& problem, const DgField& s, const FaceFluxField& u,
                        double dt) {
    return SaturationStepper(problem).step(s, u, dt);
}

std::vector<double> shock_detector(const FlowProblem& problem, const DgField& s,
                                   const FaceFluxField& u) {
    const FineGrid& grid = problem.grid;
    const double scale = 0.08 * 2.0 * std::sqrt(grid.cell_diameter()) * grid.cell_area();
    std::vector<double> d(grid.num_cells(), 0.0);
    for (int c = 0; c < grid.num_cells(); ++c) {
        for (int f : grid.cell_faces(c)) {
            if (!(u.outward(grid, f, c) < 0.0)) continue;
            const Face& face = grid.face(f);
            if (face.boundary && !grid.tag(face.side).saturation_dirichlet) continue;
            const FaceQuadrature q = face_quadrature(grid, f);
            double integral = 0.0;
            for (std::size_t i = 0; i < q.points.size(); ++i) {
                const double inner = trace(grid, s, f, 0, q.points[i]);
                const double outer = face.boundary ? problem.boundary.saturation_at(face.side)
                                                   : trace(grid, s, f, 1, q.points[i]);
                integral += q.weights[i] * (inner - outer);
            }
            d[c] += std::abs(integral) / scale;
        }
    }
    return d;
}

std::pair<double, double> corner_range(const DgField& s) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int c = 0; c < s.num_cells(); ++c) {
        for (double xi : {-0.5, 0.5}) {
            for (double eta : {-0.5, 0.5}) {
                const double v = s.local_value(c, xi, eta);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    return {lo, hi};
}

namespace {

double gradient_scale(double g, double d) {
    const bool significant = std::abs(g) > 1e-8 && std::abs(d) > 1e-8;
    if (significant && g * d < 0.0) return 0.0;
    if (significant && g * d > 0.0 && std::abs(g) > std::abs(d)) return d / g;
    return 1.0;
}

}  // namespace

DgField limit(const FlowProblem& problem, const DgField& s, const FaceFluxField& u,
              LimiterStats* stats) {
    LimiterStats st;
    if (s.order() == 0) {
        if (stats != nullptr) *stats = st;
        return s;
    }
    const FineGrid& grid = problem.grid;
    const std::vector<double> detector = shock_detector(problem, s, u);
    DgField out = s;
    for (int c = 0; c < grid.num_cells(); ++c) {
        bool flagged = detector[c] > 1.0;
        for (double xi : {-0.5, 0.5}) {
            for (double eta : {-0.5, 0.5}) {
                const double v = s.local_value(c, xi, eta);
                if (v < 0.0 || v > 1.0) flagged = true;
            }
        }
        if (!flagged) continue;
        ++st.flagged;
        const Point b = grid.barycenter(c);
        double m = 1.0;
        for (int nb : grid.neighbors(c)) {
            const Point bn = grid.barycenter(nb);
            const double g = s.slope_x(c) * (bn.x - b.x) / grid.hx() +
                             s.slope_y(c) * (bn.y - b.y) / grid.hy();
            const double d = s.mean(nb) - s.mean(c);
            m = std::min(m, gradient_scale(g, d));
        }
        if (m < 1.0) {
            ++st.limited;
            out.coefficients()[c * 3 + 1] = m * s.slope_x(c);
            out.coefficients()[c * 3 + 2] = m * s.slope_y(c);
        }
        st.min_scale = std::min(st.min_scale, m);
    }
    if (stats != nullptr) *stats = st;
    return out;
}

}  // namespace lrbms
