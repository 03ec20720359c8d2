#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lrbms {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Square sparse matrix made of dense square blocks, stored by block rows
/// (block CSR). Block entries are row-major.
class BlockSparseMatrix {
public:
    BlockSparseMatrix() = default;
    /// `block_columns[r]` lists the block columns of block row r (order irrelevant).
    BlockSparseMatrix(int block_size, std::vector<std::vector<int>> block_columns);

    int block_size() const { return block_size_; }
    int block_rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
    int rows() const { return block_rows() * block_size_; }
    int num_blocks() const { return static_cast<int>(col_idx_.size()); }

    /// Storage slot of block (r, c), or -1 if it is not in the pattern.
    int find_block(int r, int c) const;
    double* block_data(int slot) { return values_.data() + static_cast<std::size_t>(slot) * bs2(); }
    const double* block_data(int slot) const {
        return values_.data() + static_cast<std::size_t>(slot) * bs2();
    }
    /// Adds `value` to scalar entry (a, b) of block (r, c); the block must exist.
    void add(int r, int c, int a, int b, double value);

    double coeff(int row, int col) const;

    void set_zero();
    /// this += alpha * other; both must share the pattern.
    void axpy(double alpha, const BlockSparseMatrix& other);
    bool same_pattern(const BlockSparseMatrix& other) const;

    void multiply(const Vector& x, Vector& y) const;
    Vector operator*(const Vector& x) const;

    double max_abs() const;
    /// max |A_ij - A_ji|.
    double symmetry_defect() const;

    /// Inverses of the diagonal blocks (block Jacobi preconditioner).
    std::vector<DenseMatrix> inverted_diagonal_blocks() const;

    Eigen::SparseMatrix<double> to_eigen() const;
    DenseMatrix to_dense() const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t bs2() const { return static_cast<std::size_t>(block_size_) * block_size_; }

    int block_size_ = 1;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

struct CgOptions {
    double tolerance = 1e-10;
    int max_iterations = 20000;
};

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    /// Preconditioned residual norms sqrt(r^T M^-1 r), one per iteration.
    std::vector<double> history;
};

/// Block-Jacobi preconditioned conjugate gradients. Throws ConvergenceError when
/// ||Ax - b|| / ||b|| > tolerance after max_iterations.
CgResult cg_solve(const BlockSparseMatrix& a, const Vector& b, const CgOptions& options = {},
                  const Vector* initial_guess = nullptr);

/// LU with partial pivoting. Throws SingularityError for numerically singular A.
Vector dense_solve(const DenseMatrix& a, const Vector& b);

struct SvdResult {
    DenseMatrix u;
    Vector sigma;
    DenseMatrix v;
};

/// Thin SVD with non-increasing singular values.
SvdResult thin_svd(const DenseMatrix& a);

struct LeastSquaresResult {
    Vector x;
    /// True when the Gram matrix was rank deficient and the minimal-norm
    /// solution was taken from its pseudo-inverse.
    bool rank_deficient = false;
};

/// Solves the normal equations G x = rhs for a symmetric positive semi-definite
/// Gram matrix: Cholesky when well conditioned, SVD pseudo-inverse otherwise.
LeastSquaresResult solve_normal_equations(const DenseMatrix& gram, const Vector& rhs);

/// argmin ||y - B x||_2 via the normal equations.
LeastSquaresResult least_squares(const DenseMatrix& b, const Vector& y);

using InnerProduct = std::function<double(const Vector&, const Vector&)>;

/// (x, y) = sum_i w_i x_i y_i.
InnerProduct weighted_inner_product(Vector weights);

/// Orthonormalizes `v` against an orthonormal `basis` with two projection passes.
/// Returns nullopt (rejected) when the remainder is below reject_tol * ||v||.
std::optional<Vector> gram_schmidt_step(const Vector& v, const std::vector<Vector>& basis,
                                        const InnerProduct& inner, double reject_tol = 1e-10);

}  // namespace lrbms
