#pragma once

#include "lrbms/field.hpp"
#include "lrbms/linalg.hpp"
#include "lrbms/problem.hpp"

namespace lrbms {

/// sigma_F = (c_base / max(mu_w, mu_n)) * 2 a1 a2 / (a1 + a2).
double penalty(const FineGrid& grid, const CellScalarField& k, int face, double c_base,
               double mu_w, double mu_n);

struct PressureSystem {
    BlockSparseMatrix matrix;
    Vector rhs;
};

/// SWIP discretization of the pressure equation, split into the parts the
/// offline/online decomposition needs:
///   a(v, w; lambda)      = mobility part (volume + consistency, linear in lambda)
///                        + penalty part (mobility independent)
///   l(w; lambda_w, lambda_n) = fixed part (q1, Dirichlet penalty, Neumann)
///                        + mobility part (gravity, Dirichlet consistency).
class PressureAssembler {
public:
    explicit PressureAssembler(const FlowProblem& problem);

    const FlowProblem& problem() const { return *problem_; }
    int block_size() const { return block_size_for(problem_->order); }
    int num_dofs() const { return problem_->grid.num_cells() * block_size(); }

    /// Empty matrix with the cell/face coupling pattern.
    BlockSparseMatrix pattern() const;
    double sigma(int face) const { return sigma_[face]; }

    void add_mobility_part(const DgField& lambda_t, BlockSparseMatrix& a, double scale = 1.0) const;
    void add_penalty_part(BlockSparseMatrix& a, double scale = 1.0) const;
    BlockSparseMatrix mobility_part(const DgField& lambda_t) const;
    BlockSparseMatrix penalty_part() const;
    BlockSparseMatrix bilinear(const DgField& lambda_t) const;

    Vector rhs_fixed_part() const;
    Vector rhs_mobility_part(const DgField& lambda_w, const DgField& lambda_n) const;
    Vector rhs(const DgField& lambda_w, const DgField& lambda_n) const;

    PressureSystem system(const DgField& lambda_w, const DgField& lambda_n) const;

private:
    const FlowProblem* problem_;
    std::vector<double> sigma_;
};

/// Matrix of a(., .; lambda_t) for the given problem.
BlockSparseMatrix assemble_bilinear(const FlowProblem& problem, const DgField& lambda_t);

/// Vector of l(.; lambda_n, lambda_w).
Vector assemble_rhs(const FlowProblem& problem, const DgField& lambda_w, const DgField& lambda_n);

/// CG solve of the assembled system; the result has the problem's degree.
DgField solve_pressure(const FlowProblem& problem, const PressureSystem& system,
                       const DgField* initial_guess = nullptr);

/// sqrt(a(e, e; lambda_bar)). Throws NumericalError if a(e, e) < -1e-12 * scale.
double energy_norm(const FlowProblem& problem, const DgField& e, const DgField& lambda_bar);

/// sqrt(e^T A e) for an assembled operator.
double energy_norm(const BlockSparseMatrix& a, const Vector& e);

}  // namespace lrbms
