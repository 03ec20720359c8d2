#include "lrbms/pressure.hpp"

#include <cmath>
#include <string>

#include "lrbms/error.hpp"

namespace lrbms {

void FlowProblem::validate() const {
    validate_permeability(permeability, grid.num_cells());
    validate_porosity(porosity, grid.num_cells());
    if (order != 0 && order != 1) throw ConfigError("DG order must be 0 or 1");
    if (!(penalty_base > 0.0)) throw ConfigError("penalty base constant must be positive");
    if (!(fluids.mu_w > 0.0) || !(fluids.mu_n > 0.0)) {
        throw ConfigError("viscosities must be positive");
    }
}

double penalty(const FineGrid& grid, const CellScalarField& k, int face, double c_base,
               double mu_w, double mu_n) {
    const FaceWeights w = face_weights(grid, k, face);
    return c_base / std::max(mu_w, mu_n) * w.harmonic();
}

namespace {

bool carries_penalty(const FineGrid& grid, const Face& f) {
    return f.interior() || grid.tag(f.side).pressure == PressureBc::kDirichlet;
}

// Traces of the local basis of one side of a face at a physical point.
struct SideTrace {
    int cell = -1;
    double sign = 1.0;  // [phi] = sign * phi for a basis function of this side
    double tau = 1.0;
    double k = 0.0;
    std::array<double, 3> phi{};
    std::array<double, 3> grad_n{};  // grad(phi) . n
};

int face_sides(const FlowProblem& pb, int face, Point p, std::array<SideTrace, 2>& out) {
    const FineGrid& grid = pb.grid;
    const Face& f = grid.face(face);
    const FaceWeights w = face_weights(grid, pb.permeability, face, pb.mean_weighting);
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const int sides = f.boundary ? 1 : 2;
    for (int s = 0; s < sides; ++s) {
        SideTrace& t = out[s];
        t.cell = f.cells[s];
        t.sign = s == 0 ? 1.0 : -1.0;
        t.tau = s == 0 ? w.tau1 : w.tau2;
        t.k = s == 0 ? w.a1 : w.a2;
        const auto [xi, eta] = local_coordinates(grid, t.cell, p);
        t.phi = basis_values(xi, eta);
        for (int a = 0; a < 3; ++a) t.grad_n[a] = dot(grads[a], f.normal);
    }
    return sides;
}

}  // namespace

PressureAssembler::PressureAssembler(const FlowProblem& problem) : problem_(&problem) {
    const FineGrid& grid = problem.grid;
    sigma_.resize(grid.num_faces());
    for (int f = 0; f < grid.num_faces(); ++f) {
        sigma_[f] = penalty(grid, problem.permeability, f, problem.penalty_base,
                            problem.fluids.mu_w, problem.fluids.mu_n);
    }
}

BlockSparseMatrix PressureAssembler::pattern() const {
    const FineGrid& grid = problem_->grid;
    std::vector<std::vector<int>> cols(grid.num_cells());
    for (int c = 0; c < grid.num_cells(); ++c) {
        cols[c] = grid.neighbors(c);
        cols[c].push_back(c);
    }
    return BlockSparseMatrix(block_size(), std::move(cols));
}

void PressureAssembler::add_mobility_part(const DgField& lambda_t, BlockSparseMatrix& a,
                                          double scale) const {
    const FineGrid& grid = problem_->grid;
    const CellScalarField& k = problem_->permeability;
    const int bs = block_size();
    const GaussRule& rule = GaussRule::get(2);
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const double area = grid.cell_area();

    // Volume diffusion: sum_T int lambda K grad v . grad w.
    for (int c = 0; c < grid.num_cells(); ++c) {
        double lambda_integral = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            for (std::size_t j = 0; j < rule.points.size(); ++j) {
                lambda_integral += area * rule.weights[i] * rule.weights[j] *
                                   lambda_t.local_value(c, rule.points[i], rule.points[j]);
            }
        }
        double* blk = a.block_data(a.find_block(c, c));
        for (int r = 0; r < bs; ++r) {
            for (int s = 0; s < bs; ++s) {
                blk[r * bs + s] += scale * lambda_integral * k[c] * dot(grads[r], grads[s]);
            }
        }
    }

    // Consistency terms: -int {lambda K grad v . n}[w] + {lambda K grad w . n}[v].
    std::array<SideTrace, 2> sides;
    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        if (!carries_penalty(grid, face)) continue;
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t qp = 0; qp < q.points.size(); ++qp) {
            const int ns = face_sides(*problem_, f, q.points[qp], sides);
            std::array<std::array<double, 3>, 2> flux{};
            for (int s = 0; s < ns; ++s) {
                const auto [xi, eta] = local_coordinates(grid, sides[s].cell, q.points[qp]);
                const double lam = lambda_t.local_value(sides[s].cell, xi, eta);
                for (int r = 0; r < bs; ++r) {
                    flux[s][r] = sides[s].tau * lam * sides[s].k * sides[s].grad_n[r];
                }
            }
            const double w = scale * q.weights[qp];
            for (int tr = 0; tr < ns; ++tr) {      // side of the trial function v
                for (int te = 0; te < ns; ++te) {  // side of the test function w
                    double* blk = a.block_data(a.find_block(sides[te].cell, sides[tr].cell));
                    for (int i = 0; i < bs; ++i) {      // test index
                        for (int j = 0; j < bs; ++j) {  // trial index
                            const double jump_w = sides[te].sign * sides[te].phi[i];
                            const double jump_v = sides[tr].sign * sides[tr].phi[j];
                            blk[i * bs + j] -= w * (flux[tr][j] * jump_w + flux[te][i] * jump_v);
                        }
                    }
                }
            }
        }
    }
}

void PressureAssembler::add_penalty_part(BlockSparseMatrix& a, double scale) const {
    const FineGrid& grid = problem_->grid;
    const int bs = block_size();
    std::array<SideTrace, 2> sides;
    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        if (!carries_penalty(grid, face)) continue;
        const double coef = scale * sigma_[f] / face.length;
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t qp = 0; qp < q.points.size(); ++qp) {
            const int ns = face_sides(*problem_, f, q.points[qp], sides);
            for (int tr = 0; tr < ns; ++tr) {
                for (int te = 0; te < ns; ++te) {
                    double* blk = a.block_data(a.find_block(sides[te].cell, sides[tr].cell));
                    for (int i = 0; i < bs; ++i) {
                        for (int j = 0; j < bs; ++j) {
                            blk[i * bs + j] += coef * q.weights[qp] * sides[te].sign *
                                               sides[te].phi[i] * sides[tr].sign *
                                               sides[tr].phi[j];
                        }
                    }
                }
            }
        }
    }
}

BlockSparseMatrix PressureAssembler::mobility_part(const DgField& lambda_t) const {
    BlockSparseMatrix a = pattern();
    add_mobility_part(lambda_t, a);
    return a;
}

BlockSparseMatrix PressureAssembler::penalty_part() const {
    BlockSparseMatrix a = pattern();
    add_penalty_part(a);
    return a;
}

BlockSparseMatrix PressureAssembler::bilinear(const DgField& lambda_t) const {
    BlockSparseMatrix a = pattern();
    add_mobility_part(lambda_t, a);
    add_penalty_part(a);
    return a;
}

Vector PressureAssembler::rhs_fixed_part() const {
    const FineGrid& grid = problem_->grid;
    const int bs = block_size();
    Vector b = Vector::Zero(num_dofs());
    const double area = grid.cell_area();

    if (problem_->pressure_source) {
        const GaussRule& rule = GaussRule::get(2);
        for (int c = 0; c < grid.num_cells(); ++c) {
            const Point bc = grid.barycenter(c);
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                for (std::size_t j = 0; j < rule.points.size(); ++j) {
                    const double xi = rule.points[i];
                    const double eta = rule.points[j];
                    const double q1 =
                        problem_->pressure_source({bc.x + xi * grid.hx(), bc.y + eta * grid.hy()});
                    const double w = area * rule.weights[i] * rule.weights[j] * q1;
                    const auto phi = basis_values(xi, eta);
                    for (int r = 0; r < bs; ++r) b[c * bs + r] += w * phi[r];
                }
            }
        }
    }

    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        if (!face.boundary) continue;
        const PressureBc bc = grid.tag(face.side).pressure;
        if (bc == PressureBc::kNoFlow) continue;
        const int c = face.cells[0];
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t qp = 0; qp < q.points.size(); ++qp) {
            const double value = problem_->boundary.pressure_at(face.side, q.points[qp]);
            const auto [xi, eta] = local_coordinates(grid, c, q.points[qp]);
            const auto phi = basis_values(xi, eta);
            // Dirichlet: + sigma/h p_D w.  Neumann (outward velocity u_N): - u_N w.
            const double coef = bc == PressureBc::kDirichlet ? sigma_[f] / face.length * value
                                                             : -value;
            for (int r = 0; r < bs; ++r) b[c * bs + r] += q.weights[qp] * coef * phi[r];
        }
    }
    return b;
}

Vector PressureAssembler::rhs_mobility_part(const DgField& lambda_w, const DgField& lambda_n) const {
    const FlowProblem& pb = *problem_;
    const FineGrid& grid = pb.grid;
    const CellScalarField& k = pb.permeability;
    const int bs = block_size();
    Vector b = Vector::Zero(num_dofs());
    const auto grads = basis_gradients(grid.hx(), grid.hy());
    const double rho_w = pb.fluids.rho_w;
    const double rho_n = pb.fluids.rho_n;
    auto gravity_weight = [&](int cell, double xi, double eta) {
        return lambda_n.local_value(cell, xi, eta) * rho_n +
               lambda_w.local_value(cell, xi, eta) * rho_w;
    };

    if (pb.has_gravity()) {
        const GaussRule& rule = GaussRule::get(2);
        const double area = grid.cell_area();
        for (int c = 0; c < grid.num_cells(); ++c) {
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                for (std::size_t j = 0; j < rule.points.size(); ++j) {
                    const double w = area * rule.weights[i] * rule.weights[j];
                    const double g = gravity_weight(c, rule.points[i], rule.points[j]) * k[c];
                    for (int r = 0; r < bs; ++r) {
                        b[c * bs + r] += w * g * dot(pb.gravity, grads[r]);
                    }
                }
            }
        }
    }

    std::array<SideTrace, 2> sides;
    for (int f = 0; f < grid.num_faces(); ++f) {
        const Face& face = grid.face(f);
        if (!carries_penalty(grid, face)) continue;
        const FaceQuadrature q = face_quadrature(grid, f);
        for (std::size_t qp = 0; qp < q.points.size(); ++qp) {
            const int ns = face_sides(*problem_, f, q.points[qp], sides);
            if (pb.has_gravity()) {
                double mean = 0.0;
                for (int s = 0; s < ns; ++s) {
                    const auto [xi, eta] = local_coordinates(grid, sides[s].cell, q.points[qp]);
                    mean += sides[s].tau * gravity_weight(sides[s].cell, xi, eta) * sides[s].k *
                            dot(pb.gravity, face.normal);
                }
                for (int s = 0; s < ns; ++s) {
                    for (int r = 0; r < bs; ++r) {
                        b[sides[s].cell * bs + r] -=
                            q.weights[qp] * mean * sides[s].sign * sides[s].phi[r];
                    }
                }
            }
            if (face.boundary) {
                // Dirichlet consistency: - int lambda_t K grad w . n p_D.
                const int c = sides[0].cell;
                const auto [xi, eta] = local_coordinates(grid, c, q.points[qp]);
                const double lam =
                    lambda_w.local_value(c, xi, eta) + lambda_n.local_value(c, xi, eta);
                const double p_d = pb.boundary.pressure_at(face.side, q.points[qp]);
                for (int r = 0; r < bs; ++r) {
                    b[c * bs + r] -= q.weights[qp] * lam * k[c] * sides[0].grad_n[r] * p_d;
                }
            }
        }
    }
    return b;
}

Vector PressureAssembler::rhs(const DgField& lambda_w, const DgField& lambda_n) const {
    return rhs_fixed_part() + rhs_mobility_part(lambda_w, lambda_n);
}

PressureSystem PressureAssembler::system(const DgField& lambda_w, const DgField& lambda_n) const {
    DgField lambda_t = lambda_w;
    lambda_t.coefficients() += lambda_n.coefficients();
    return {bilinear(lambda_t), rhs(lambda_w, lambda_n)};
}

BlockSparseMatrix assemble_bilinear(const FlowProblem& problem, const DgField& lambda_t) {
    return PressureAssembler(problem).bilinear(lambda_t);
}

Vector assemble_rhs(const FlowProblem& problem, const DgField& lambda_w, const DgField& lambda_n) {
    return PressureAssembler(problem).rhs(lambda_w, lambda_n);
}

DgField solve_pressure(const FlowProblem& problem, const PressureSystem& system,
                       const DgField* initial_guess) {
    const Vector* guess = nullptr;
    if (initial_guess != nullptr && initial_guess->num_dofs() == system.rhs.size()) {
        guess = &initial_guess->coefficients();
    }
    CgResult result = cg_solve(system.matrix, system.rhs, problem.cg, guess);
    DgField p(problem.grid.num_cells(), problem.order);
    p.coefficients() = std::move(result.x);
    return p;
}

double energy_norm(const BlockSparseMatrix& a, const Vector& e) {
    const double value = e.dot(a * e);
    const double scale = a.max_abs() * e.squaredNorm();
    if (value < -1e-12 * scale) {
        throw NumericalError("energy_norm: a(e, e) = " + std::to_string(value) +
                             " is negative; the operator is not positive semi-definite");
    }
    return std::sqrt(std::max(value, 0.0));
}

double energy_norm(const FlowProblem& problem, const DgField& e, const DgField& lambda_bar) {
    return energy_norm(assemble_bilinear(problem, lambda_bar), e.coefficients());
}

}  // namespace lrbms
