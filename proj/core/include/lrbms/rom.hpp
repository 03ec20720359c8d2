#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "lrbms/linalg.hpp"
#include "lrbms/mesh.hpp"
#include "lrbms/mobility.hpp"
#include "lrbms/pressure.hpp"

namespace lrbms {

using Parameter = Vector;

/// `count` points uniformly distributed on the simplex of dimension M (normalized
/// exponentials), entries raised to at least 1e-4 and renormalized.
std::vector<Parameter> sample_training_set(int m, int count, std::uint64_t seed);

/// One orthonormal basis per coarse cell. Column j of `cells[E]` holds the
/// coefficients of basis function j on the fine cells of E (in CoarseGrid::cells_of
/// order, one DG block per fine cell).
struct LocalBases {
    std::vector<DenseMatrix> cells;

    int total_size() const;
    std::vector<int> sizes() const;
};

/// Empty bases (zero columns) for every coarse cell.
LocalBases empty_local_bases(const CoarseGrid& coarse, int block_size);

/// Mass weights of the local dofs of coarse cell E (the L2(E) inner product).
Vector local_mass_weights(const FineGrid& grid, const CoarseGrid& coarse, int coarse_cell,
                          int order);

/// Restriction of a fine dof vector to coarse cell E.
Vector restrict_to(const CoarseGrid& coarse, const Vector& fine, int coarse_cell, int block_size);

/// Fine dof-by-N matrix whose columns are the local basis functions, ordered by
/// coarse cell.
Eigen::SparseMatrix<double> global_basis(const FineGrid& grid, const CoarseGrid& coarse,
                                         const LocalBases& bases, int block_size);

/// Prepends the normalized indicator of every coarse cell to its basis and
/// re-orthonormalizes the remaining functions (dependent ones are dropped).
LocalBases add_unit_functions(const FineGrid& grid, const CoarseGrid& coarse,
                              const LocalBases& bases, int order, double reject_tol = 1e-10);

/// Per coarse cell: SVD of the raw snapshot restrictions in the L2(E) inner
/// product, keeping the smallest r with tail energy <= eps^2 * total energy.
LocalBases pca_compress(const FineGrid& grid, const CoarseGrid& coarse,
                        const std::vector<Vector>& snapshots, int order, double eps);

/// Reduced operators: A_N(theta) = c + sum theta_q b_q, l_N(theta) = e + sum theta_q d_q.
struct ReducedOperators {
    std::vector<DenseMatrix> b;
    DenseMatrix c;
    std::vector<Vector> d;
    Vector e;

    int size() const { return static_cast<int>(c.rows()); }
    DenseMatrix matrix(const Vector& theta) const;
    Vector rhs(const Vector& theta) const;
};

/// Fine parameter-independent pieces: B_q (mobility part at profile q), C
/// (penalty part), the mobility right-hand sides and the fixed right-hand side.
class AffineFineOperator {
public:
    AffineFineOperator(const FlowProblem& problem, const MobilityBasis& basis);

    const FlowProblem& problem() const { return *problem_; }
    int num_terms() const { return static_cast<int>(b_.size()); }
    const BlockSparseMatrix& b(int q) const { return b_[q]; }
    const BlockSparseMatrix& c() const { return c_; }
    const Vector& d(int q) const { return d_[q]; }
    const Vector& e() const { return e_; }

    /// C + sum mu_q B_q and the matching right-hand side.
    BlockSparseMatrix matrix(const Vector& mu) const;
    Vector rhs(const Vector& mu) const;
    /// Fine solve at mu with the given CG options.
    Vector solve(const Vector& mu, const CgOptions& cg) const;

    ReducedOperators project(const Eigen::SparseMatrix<double>& phi) const;

private:
    const FlowProblem* problem_;
    std::vector<BlockSparseMatrix> b_;
    BlockSparseMatrix c_;
    std::vector<Vector> d_;
    Vector e_;
};

/// Solution of the reduced system. Throws NumericalError naming theta when the
/// reduced matrix is singular or indefinite.
Vector reduced_solve(const ReducedOperators& ops, const Vector& theta);

struct GreedyOptions {
    double tolerance = 1e-4;
    int max_basis_size = 500;
    double reject_tol = 1e-10;
    bool unit_basis = false;
    /// CG options of the cached truth solves.
    CgOptions truth_cg{1e-10, 20000};
    int threads = 1;
};

enum class GreedyStop { kTolerance, kReselected, kMaxSize, kNoExtension };
const char* to_string(GreedyStop stop);

struct GreedyResult {
    LocalBases bases;
    std::vector<Vector> snapshots;         ///< raw fine snapshots, selection order
    std::vector<int> selected;             ///< training indices, selection order
    std::vector<double> error_history;     ///< max training error at every iteration
    std::vector<double> final_errors;      ///< training errors in the final space
    /// Error of each selected parameter right after its snapshot entered the basis.
    std::vector<double> reproduction_errors;
    std::vector<Vector> truth;             ///< fine solutions of the whole training set
    GreedyStop stop = GreedyStop::kTolerance;
    double truth_seconds = 0.0;
    double greedy_seconds = 0.0;
};

/// Greedy construction in the energy norm of lambda_bar = mean of the total
/// mobility profiles. Truth solutions for the whole training set are computed
/// first unless `truth` supplies them.
GreedyResult greedy_build(const FlowProblem& problem, const MobilityBasis& basis,
                          const CoarseGrid& coarse, const std::vector<Parameter>& training,
                          const GreedyOptions& options,
                          const std::vector<Vector>* truth = nullptr);

/// Energy-norm errors of the reduced solutions in `bases` against fine solutions.
std::vector<double> training_errors(const AffineFineOperator& fine, const FineGrid& grid,
                                    const CoarseGrid& coarse, const LocalBases& bases,
                                    const std::vector<Parameter>& training,
                                    const std::vector<Vector>& truth, int threads = 1);

/// Offline product: everything the online phase needs.
struct ReducedModel {
    // grid identification
    double lx = 0.0;
    double ly = 0.0;
    int nx = 0;
    int ny = 0;
    int coarse_nx = 0;
    int coarse_ny = 0;
    int order = 1;
    std::uint64_t grid_checksum = 0;

    MobilityBasis mobility;
    LocalBases bases;
    ReducedOperators operators;

    std::vector<int> selected;
    std::vector<double> error_history;

    int size() const { return operators.size(); }
};

/// FNV-1a checksum of the fine grid geometry, boundary tags and rock data.
std::uint64_t problem_checksum(const FlowProblem& problem);

ReducedModel precompute_offline(const FlowProblem& problem, const CoarseGrid& coarse,
                                const LocalBases& bases, const MobilityBasis& basis);

/// Throws ConfigError when the model was built for a different grid or rock.
void check_compatible(const ReducedModel& model, const FlowProblem& problem);

/// p_h^r = sum (p_N)_i phi_i.
DgField reconstruct(const ReducedModel& model, const Vector& p_n);

/// Online phase of one pressure solve.
class OnlineSolver {
public:
    OnlineSolver(const ReducedModel& model, const FlowProblem& problem);

    struct Result {
        FitResult fit;
        Vector coefficients;
        DgField pressure;
    };

    Result solve(const DgField& saturation) const;
    const Eigen::SparseMatrix<double>& basis_matrix() const { return phi_; }

private:
    const ReducedModel* model_;
    const FlowProblem* problem_;
    Eigen::SparseMatrix<double> phi_;
};

void save_model(const ReducedModel& model, const std::string& path);
ReducedModel load_model(const std::string& path, const FineGrid& grid);

}  // namespace lrbms
