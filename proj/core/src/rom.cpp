#include "lrbms/rom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include "lrbms/error.hpp"
#include "lrbms/parallel.hpp"

namespace lrbms {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format_theta(const Vector& theta) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (Eigen::Index i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
    os << ')';
    return os.str();
}

}  // namespace

std::vector<Parameter> sample_training_set(int m, int count, std::uint64_t seed) {
    if (m < 1) throw ConfigError("parameter dimension M must be at least 1");
    if (count < 1) throw ConfigError("training set size must be at least 1");
    constexpr double kFloor = 1e-4;
    if (m * kFloor >= 1.0) throw ConfigError("parameter dimension M too large for the 1e-4 floor");
    std::mt19937_64 rng(seed);
    std::vector<Parameter> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Parameter e(m);
        for (int q = 0; q < m; ++q) e[q] = -std::log1p(-uniform01(rng));
        e /= e.sum();
        // affine map of the simplex onto {x >= 1e-4, sum x = 1}
        out.push_back(Parameter::Constant(m, kFloor) + (1.0 - m * kFloor) * e);
    }
    return out;
}

int LocalBases::total_size() const {
    int n = 0;
    for (const auto& b : cells) n += static_cast<int>(b.cols());
    return n;
}

std::vector<int> LocalBases::sizes() const {
    std::vector<int> s;
    for (const auto& b : cells) s.push_back(static_cast<int>(b.cols()));
    return s;
}

LocalBases empty_local_bases(const CoarseGrid& coarse, int block_size) {
    LocalBases b;
    for (int e = 0; e < coarse.num_cells(); ++e) {
        const int rows = static_cast<int>(coarse.cells_of(e).size()) * block_size;
        b.cells.push_back(DenseMatrix(rows, 0));
    }
    return b;
}

Vector local_mass_weights(const FineGrid& grid, const CoarseGrid& coarse, int coarse_cell,
                          int order) {
    const int bs = block_size_for(order);
    const auto& cells = coarse.cells_of(coarse_cell);
    Vector w(static_cast<Eigen::Index>(cells.size()) * bs);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        w[i * bs] = grid.cell_area();
        for (int r = 1; r < bs; ++r) w[i * bs + r] = grid.cell_area() / 12.0;
    }
    return w;
}

Vector restrict_to(const CoarseGrid& coarse, const Vector& fine, int coarse_cell, int block_size) {
    const auto& cells = coarse.cells_of(coarse_cell);
    Vector v(static_cast<Eigen::Index>(cells.size()) * block_size);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        v.segment(i * block_size, block_size) = fine.segment(cells[i] * block_size, block_size);
    }
    return v;
}

Eigen::SparseMatrix<double> global_basis(const FineGrid& grid, const CoarseGrid& coarse,
                                         const LocalBases& bases, int block_size) {
    std::vector<Eigen::Triplet<double>> triplets;
    int offset = 0;
    for (int e = 0; e < coarse.num_cells(); ++e) {
        const DenseMatrix& b = bases.cells[e];
        const auto& cells = coarse.cells_of(e);
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            for (Eigen::Index l = 0; l < b.rows(); ++l) {
                const double v = b(l, j);
                if (v == 0.0) continue;
                const int dof = cells[l / block_size] * block_size + static_cast<int>(l % block_size);
                triplets.emplace_back(dof, offset + static_cast<int>(j), v);
            }
        }
        offset += static_cast<int>(b.cols());
    }
    Eigen::SparseMatrix<double> phi(grid.num_cells() * block_size, offset);
    phi.setFromTriplets(triplets.begin(), triplets.end());
    return phi;
}

namespace {

std::vector<Vector> columns(const DenseMatrix& m) {
    std::vector<Vector> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
    return out;
}

DenseMatrix from_columns(const std::vector<Vector>& cols, Eigen::Index rows) {
    DenseMatrix m(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.col(j) = cols[j];
    return m;
}

}  // namespace

LocalBases add_unit_functions(const FineGrid& grid, const CoarseGrid& coarse,
                              const LocalBases& bases, int order, double reject_tol) {
    const int bs = block_size_for(order);
    LocalBases out;
    for (int e = 0; e < coarse.num_cells(); ++e) {
        const Vector w = local_mass_weights(grid, coarse, e, order);
        const InnerProduct inner = weighted_inner_product(w);
        Vector unit = Vector::Zero(w.size());
        for (Eigen::Index i = 0; i < w.size(); i += bs) unit[i] = 1.0;
        unit /= std::sqrt(inner(unit, unit));
        std::vector<Vector> cols{unit};
        for (const Vector& v : columns(bases.cells[e])) {
            if (auto next = gram_schmidt_step(v, cols, inner, reject_tol)) cols.push_back(*next);
        }
        out.cells.push_back(from_columns(cols, w.size()));
    }
    return out;
}

LocalBases pca_compress(const FineGrid& grid, const CoarseGrid& coarse,
                        const std::vector<Vector>& snapshots, int order, double eps) {
    const int bs = block_size_for(order);
    LocalBases out;
    for (int e = 0; e < coarse.num_cells(); ++e) {
        const Vector w = local_mass_weights(grid, coarse, e, order);
        const Vector sqrt_w = w.cwiseSqrt();
        DenseMatrix y(w.size(), static_cast<Eigen::Index>(snapshots.size()));
        for (std::size_t k = 0; k < snapshots.size(); ++k) {
            y.col(k) = restrict_to(coarse, snapshots[k], e, bs).cwiseProduct(sqrt_w);
        }
        int keep = 0;
        DenseMatrix modes(w.size(), 0);
        if (y.cols() > 0) {
            const SvdResult svd = thin_svd(y);
            const Vector energy = svd.sigma.array().square();
            const double total = energy.sum();
            if (total > 0.0) {
                const double sigma0 = svd.sigma[0];
                int rank = 0;
                while (rank < svd.sigma.size() && svd.sigma[rank] > 1e-10 * sigma0) ++rank;
                double tail = total;
                while (keep < rank && tail > eps * eps * total) tail -= energy[keep++];
                modes = svd.u.leftCols(keep);
                for (Eigen::Index i = 0; i < modes.rows(); ++i) modes.row(i) /= sqrt_w[i];
            }
        }
        out.cells.push_back(modes);
    }
    return out;
}

DenseMatrix ReducedOperators::matrix(const Vector& theta) const {
    DenseMatrix a = c;
    for (std::size_t q = 0; q < b.size(); ++q) a += theta[q] * b[q];
    return a;
}

Vector ReducedOperators::rhs(const Vector& theta) const {
    Vector l = e;
    for (std::size_t q = 0; q < d.size(); ++q) l += theta[q] * d[q];
    return l;
}

AffineFineOperator::AffineFineOperator(const FlowProblem& problem, const MobilityBasis& basis)
    : problem_(&problem) {
    const PressureAssembler assembler(problem);
    for (int q = 0; q < basis.size(); ++q) {
        b_.push_back(assembler.mobility_part(basis.total(q)));
        d_.push_back(assembler.rhs_mobility_part(basis.wetting(q), basis.nonwetting(q)));
    }
    c_ = assembler.penalty_part();
    e_ = assembler.rhs_fixed_part();
}

BlockSparseMatrix AffineFineOperator::matrix(const Vector& mu) const {
    BlockSparseMatrix a = c_;
    for (int q = 0; q < num_terms(); ++q) a.axpy(mu[q], b_[q]);
    return a;
}

Vector AffineFineOperator::rhs(const Vector& mu) const {
    Vector l = e_;
    for (int q = 0; q < num_terms(); ++q) l += mu[q] * d_[q];
    return l;
}

Vector AffineFineOperator::solve(const Vector& mu, const CgOptions& cg) const {
    return cg_solve(matrix(mu), rhs(mu), cg).x;
}

ReducedOperators AffineFineOperator::project(const Eigen::SparseMatrix<double>& phi) const {
    ReducedOperators ops;
    const Eigen::SparseMatrix<double> phi_t = phi.transpose();
    auto galerkin = [&](const BlockSparseMatrix& a) {
        const Eigen::SparseMatrix<double> ap = a.to_eigen() * phi;
        return DenseMatrix(phi_t * ap);
    };
    for (const auto& bq : b_) ops.b.push_back(galerkin(bq));
    ops.c = galerkin(c_);
    for (const auto& dq : d_) ops.d.push_back(phi_t * dq);
    ops.e = phi_t * e_;
    return ops;
}

Vector reduced_solve(const ReducedOperators& ops, const Vector& theta) {
    if (ops.size() == 0) return Vector();
    const DenseMatrix a = ops.matrix(theta);
    const Eigen::LLT<DenseMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("reduced system is singular or indefinite for theta = " +
                             format_theta(theta));
    }
    return llt.solve(ops.rhs(theta));
}

const char* to_string(GreedyStop stop) {
    switch (stop) {
        case GreedyStop::kTolerance: return "tolerance";
        case GreedyStop::kReselected: return "reselected";
        case GreedyStop::kMaxSize: return "max_size";
        case GreedyStop::kNoExtension: return "no_extension";
    }
    return "unknown";
}

std::vector<double> training_errors(const AffineFineOperator& fine, const FineGrid& grid,
                                    const CoarseGrid& coarse, const LocalBases& bases,
                                    const std::vector<Parameter>& training,
                                    const std::vector<Vector>& truth, int threads) {
    const int m = fine.num_terms();
    const BlockSparseMatrix energy = fine.matrix(Vector::Constant(m, 1.0 / m));
    const int bs = energy.block_size();
    const Eigen::SparseMatrix<double> phi = global_basis(grid, coarse, bases, bs);
    const ReducedOperators ops = fine.project(phi);
    std::vector<double> errors(training.size(), 0.0);
    parallel_for(static_cast<int>(training.size()), threads, [&](int i) {
        Vector diff = truth[i];
        if (ops.size() > 0) {
            try {
                diff -= phi * reduced_solve(ops, training[i]);
            } catch (const NumericalError&) {
                errors[i] = std::numeric_limits<double>::infinity();
                return;
            }
        }
        errors[i] = energy_norm(energy, diff);
    });
    return errors;
}

GreedyResult greedy_build(const FlowProblem& problem, const MobilityBasis& basis,
                          const CoarseGrid& coarse, const std::vector<Parameter>& training,
                          const GreedyOptions& options, const std::vector<Vector>* truth_in) {
    if (training.empty()) throw ConfigError("greedy: empty training set");
    const FineGrid& grid = problem.grid;
    const int bs = block_size_for(problem.order);
    GreedyResult out;

    auto start = std::chrono::steady_clock::now();
    const AffineFineOperator fine(problem, basis);
    std::vector<Vector>& truth = out.truth;
    if (truth_in != nullptr) {
        if (truth_in->size() != training.size()) {
            throw ConfigError("greedy: " + std::to_string(truth_in->size()) +
                              " cached solutions for " + std::to_string(training.size()) +
                              " training parameters");
        }
        truth = *truth_in;
    } else {
        truth.resize(training.size());
        parallel_for(static_cast<int>(training.size()), options.threads,
                     [&](int i) { truth[i] = fine.solve(training[i], options.truth_cg); });
    }
    out.truth_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    out.bases = empty_local_bases(coarse, bs);
    if (options.unit_basis) out.bases = add_unit_functions(grid, coarse, out.bases, problem.order);
    std::vector<Vector> weights;
    for (int e = 0; e < coarse.num_cells(); ++e) {
        weights.push_back(local_mass_weights(grid, coarse, e, problem.order));
    }

    while (true) {
        const std::vector<double> errors =
            training_errors(fine, grid, coarse, out.bases, training, truth, options.threads);
        const auto worst = std::max_element(errors.begin(), errors.end());
        const int imax = static_cast<int>(worst - errors.begin());
        out.error_history.push_back(*worst);
        out.final_errors = errors;
        if (!out.selected.empty()) out.reproduction_errors.push_back(errors[out.selected.back()]);
        if (*worst <= options.tolerance) {
            out.stop = GreedyStop::kTolerance;
            break;
        }
        if (std::find(out.selected.begin(), out.selected.end(), imax) != out.selected.end()) {
            out.stop = GreedyStop::kReselected;
            break;
        }
        if (out.bases.total_size() >= options.max_basis_size) {
            out.stop = GreedyStop::kMaxSize;
            break;
        }
        bool extended = false;
        for (int e = 0; e < coarse.num_cells(); ++e) {
            const Vector v = restrict_to(coarse, truth[imax], e, bs);
            std::vector<Vector> cols = columns(out.bases.cells[e]);
            const auto next =
                gram_schmidt_step(v, cols, weighted_inner_product(weights[e]), options.reject_tol);
            if (!next) continue;
            cols.push_back(*next);
            out.bases.cells[e] = from_columns(cols, v.size());
            extended = true;
        }
        if (!extended) {
            out.stop = GreedyStop::kNoExtension;
            break;
        }
        out.selected.push_back(imax);
        out.snapshots.push_back(truth[imax]);
    }
    out.greedy_seconds = seconds_since(start);
    return out;
}

std::uint64_t problem_checksum(const FlowProblem& problem) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    auto mix_double = [&](double v) { mix(&v, sizeof v); };
    auto mix_int = [&](std::int64_t v) { mix(&v, sizeof v); };
    const FineGrid& g = problem.grid;
    mix_double(g.lx());
    mix_double(g.ly());
    mix_int(g.nx());
    mix_int(g.ny());
    mix_int(problem.order);
    mix_double(problem.penalty_base);
    mix_int(static_cast<int>(problem.mean_weighting));
    mix_double(problem.fluids.rho_w);
    mix_double(problem.fluids.rho_n);
    mix_double(problem.fluids.mu_w);
    mix_double(problem.fluids.mu_n);
    mix_double(problem.gravity.x);
    mix_double(problem.gravity.y);
    for (Side s : kAllSides) {
        mix_int(static_cast<int>(g.tag(s).pressure));
        mix_int(g.tag(s).saturation_dirichlet ? 1 : 0);
    }
    for (int c = 0; c < g.num_cells(); ++c) mix_double(problem.permeability[c]);
    for (const Face& f : g.faces()) {
        if (f.boundary) mix_double(problem.boundary.pressure_at(f.side, f.center));
    }
    if (problem.pressure_source) {
        for (int c = 0; c < g.num_cells(); ++c) mix_double(problem.pressure_source(g.barycenter(c)));
    }
    return h;
}

ReducedModel precompute_offline(const FlowProblem& problem, const CoarseGrid& coarse,
                                const LocalBases& bases, const MobilityBasis& basis) {
    const FineGrid& g = problem.grid;
    ReducedModel model;
    model.lx = g.lx();
    model.ly = g.ly();
    model.nx = g.nx();
    model.ny = g.ny();
    model.coarse_nx = coarse.nx();
    model.coarse_ny = coarse.ny();
    model.order = problem.order;
    model.grid_checksum = problem_checksum(problem);
    model.mobility = basis;
    model.bases = bases;
    const AffineFineOperator fine(problem, basis);
    model.operators = fine.project(global_basis(g, coarse, bases, block_size_for(problem.order)));
    return model;
}

void check_compatible(const ReducedModel& model, const FlowProblem& problem) {
    const FineGrid& g = problem.grid;
    if (model.nx != g.nx() || model.ny != g.ny() || model.order != problem.order) {
        throw ConfigError("reduced model was built for a " + std::to_string(model.nx) + "x" +
                          std::to_string(model.ny) + " grid of degree " +
                          std::to_string(model.order) + ", scenario has " +
                          std::to_string(g.nx()) + "x" + std::to_string(g.ny()) +
                          " and degree " + std::to_string(problem.order));
    }
    if (model.grid_checksum != problem_checksum(problem)) {
        throw ConfigError("reduced model checksum does not match the scenario (different rock, "
                          "fluids or boundary data)");
    }
}

DgField reconstruct(const ReducedModel& model, const Vector& p_n) {
    if (p_n.size() != model.size()) {
        throw ConfigError("reduced coefficient vector has length " + std::to_string(p_n.size()) +
                          ", model has " + std::to_string(model.size()));
    }
    const FineGrid grid(model.lx, model.ly, model.nx, model.ny, BoundarySpec{});
    const CoarseGrid coarse(grid, model.coarse_nx, model.coarse_ny);
    const auto phi = global_basis(grid, coarse, model.bases, block_size_for(model.order));
    DgField p(grid.num_cells(), model.order);
    p.coefficients() = phi * p_n;
    return p;
}

OnlineSolver::OnlineSolver(const ReducedModel& model, const FlowProblem& problem)
    : model_(&model), problem_(&problem) {
    check_compatible(model, problem);
    const CoarseGrid coarse(problem.grid, model.coarse_nx, model.coarse_ny);
    phi_ = global_basis(problem.grid, coarse, model.bases, block_size_for(model.order));
}

OnlineSolver::Result OnlineSolver::solve(const DgField& saturation) const {
    Result r;
    r.fit = fit_theta(saturation, model_->mobility, problem_->fluids.mu_w, problem_->fluids.mu_n);
    r.coefficients = reduced_solve(model_->operators, r.fit.theta);
    r.pressure = DgField(problem_->grid.num_cells(), model_->order);
    r.pressure.coefficients() = phi_ * r.coefficients;
    return r;
}

}  // namespace lrbms
