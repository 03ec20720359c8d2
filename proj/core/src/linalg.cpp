#include "lrbms/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "lrbms/error.hpp"

namespace lrbms {

BlockSparseMatrix::BlockSparseMatrix(int block_size, std::vector<std::vector<int>> block_columns)
    : block_size_(block_size) {
    row_ptr_.assign(1, 0);
    for (auto& cols : block_columns) {
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        col_idx_.insert(col_idx_.end(), cols.begin(), cols.end());
        row_ptr_.push_back(static_cast<int>(col_idx_.size()));
    }
    values_.assign(col_idx_.size() * bs2(), 0.0);
}

int BlockSparseMatrix::find_block(int r, int c) const {
    const auto first = col_idx_.begin() + row_ptr_[r];
    const auto last = col_idx_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return -1;
    return static_cast<int>(it - col_idx_.begin());
}

void BlockSparseMatrix::add(int r, int c, int a, int b, double value) {
    const int slot = find_block(r, c);
    if (slot < 0) {
        throw DomainError("block (" + std::to_string(r) + ", " + std::to_string(c) +
                          ") is not in the sparsity pattern");
    }
    block_data(slot)[a * block_size_ + b] += value;
}

double BlockSparseMatrix::coeff(int row, int col) const {
    const int slot = find_block(row / block_size_, col / block_size_);
    if (slot < 0) return 0.0;
    return block_data(slot)[(row % block_size_) * block_size_ + (col % block_size_)];
}

void BlockSparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool BlockSparseMatrix::same_pattern(const BlockSparseMatrix& other) const {
    return block_size_ == other.block_size_ && row_ptr_ == other.row_ptr_ &&
           col_idx_ == other.col_idx_;
}

void BlockSparseMatrix::axpy(double alpha, const BlockSparseMatrix& other) {
    if (!same_pattern(other)) {
        throw ConfigError("BlockSparseMatrix::axpy: sparsity patterns differ");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
}

void BlockSparseMatrix::multiply(const Vector& x, Vector& y) const {
    const int bs = block_size_;
    y.setZero(rows());
    for (int r = 0; r < block_rows(); ++r) {
        for (int slot = row_ptr_[r]; slot < row_ptr_[r + 1]; ++slot) {
            const double* blk = block_data(slot);
            const int c = col_idx_[slot];
            for (int a = 0; a < bs; ++a) {
                double sum = 0.0;
                for (int b = 0; b < bs; ++b) sum += blk[a * bs + b] * x[c * bs + b];
                y[r * bs + a] += sum;
            }
        }
    }
}

Vector BlockSparseMatrix::operator*(const Vector& x) const {
    Vector y;
    multiply(x, y);
    return y;
}

double BlockSparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double BlockSparseMatrix::symmetry_defect() const {
    const int bs = block_size_;
    double defect = 0.0;
    for (int r = 0; r < block_rows(); ++r) {
        for (int slot = row_ptr_[r]; slot < row_ptr_[r + 1]; ++slot) {
            const int c = col_idx_[slot];
            const int mirror = find_block(c, r);
            const double* blk = block_data(slot);
            for (int a = 0; a < bs; ++a) {
                for (int b = 0; b < bs; ++b) {
                    const double other = mirror < 0 ? 0.0 : block_data(mirror)[b * bs + a];
                    defect = std::max(defect, std::abs(blk[a * bs + b] - other));
                }
            }
        }
    }
    return defect;
}

std::vector<DenseMatrix> BlockSparseMatrix::inverted_diagonal_blocks() const {
    const int bs = block_size_;
    std::vector<DenseMatrix> inv(block_rows());
    for (int r = 0; r < block_rows(); ++r) {
        const int slot = find_block(r, r);
        if (slot < 0) throw SingularityError("missing diagonal block " + std::to_string(r));
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>
            blk(block_data(slot), bs, bs);
        Eigen::FullPivLU<DenseMatrix> lu{DenseMatrix(blk)};
        if (!lu.isInvertible()) {
            throw SingularityError("diagonal block " + std::to_string(r) + " is singular");
        }
        inv[r] = lu.inverse();
    }
    return inv;
}

Eigen::SparseMatrix<double> BlockSparseMatrix::to_eigen() const {
    const int bs = block_size_;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(values_.size());
    for (int r = 0; r < block_rows(); ++r) {
        for (int slot = row_ptr_[r]; slot < row_ptr_[r + 1]; ++slot) {
            const int c = col_idx_[slot];
            const double* blk = block_data(slot);
            for (int a = 0; a < bs; ++a) {
                for (int b = 0; b < bs; ++b) {
                    triplets.emplace_back(r * bs + a, c * bs + b, blk[a * bs + b]);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> m(rows(), rows());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

DenseMatrix BlockSparseMatrix::to_dense() const { return DenseMatrix(to_eigen()); }

CgResult cg_solve(const BlockSparseMatrix& a, const Vector& b, const CgOptions& options,
                  const Vector* initial_guess) {
    const int n = a.rows();
    const int bs = a.block_size();
    if (b.size() != n) throw ConfigError("cg_solve: right-hand side has the wrong length");

    CgResult result;
    result.x = initial_guess != nullptr ? *initial_guess : Vector::Zero(n);
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        result.x.setZero(n);
        return result;
    }

    const std::vector<DenseMatrix> precond = a.inverted_diagonal_blocks();
    auto apply_precond = [&](const Vector& r, Vector& z) {
        z.resize(n);
        for (int blk = 0; blk < a.block_rows(); ++blk) {
            z.segment(blk * bs, bs) = precond[blk] * r.segment(blk * bs, bs);
        }
    };

    Vector r(n), z(n), p(n), ap(n);
    int iterations = 0;
    // Restarts recompute the true residual if the recursive one drifted.
    for (int restart = 0; restart < 5; ++restart) {
        a.multiply(result.x, ap);
        r = b - ap;
        if (r.norm() <= options.tolerance * b_norm) break;
        apply_precond(r, z);
        p = z;
        double rz = r.dot(z);
        while (iterations < options.max_iterations) {
            a.multiply(p, ap);
            const double pap = p.dot(ap);
            if (!(pap > 0.0)) {
                throw ConvergenceError("cg_solve: matrix is not positive definite (p^T A p = " +
                                           std::to_string(pap) + ")",
                                       r.norm() / b_norm, iterations);
            }
            const double alpha = rz / pap;
            result.x += alpha * p;
            r -= alpha * ap;
            ++iterations;
            if (r.norm() <= options.tolerance * b_norm) break;
            apply_precond(r, z);
            const double rz_new = r.dot(z);
            result.history.push_back(std::sqrt(std::max(rz_new, 0.0)));
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        if (iterations >= options.max_iterations) break;
    }
    a.multiply(result.x, ap);
    result.relative_residual = (b - ap).norm() / b_norm;
    result.iterations = iterations;
    if (result.relative_residual > options.tolerance) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "cg_solve: no convergence after %d iterations, relative residual %.3e",
                      iterations, result.relative_residual);
        throw ConvergenceError(msg, result.relative_residual, iterations);
    }
    return result;
}

Vector dense_solve(const DenseMatrix& a, const Vector& b) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw ConfigError("dense_solve: dimension mismatch");
    }
    if (a.rows() == 0) return Vector();
    Eigen::PartialPivLU<DenseMatrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        throw SingularityError("dense_solve: matrix is singular to machine precision (rcond = " +
                               std::to_string(rcond) + ")");
    }
    return lu.solve(b);
}

SvdResult thin_svd(const DenseMatrix& a) {
    Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

LeastSquaresResult solve_normal_equations(const DenseMatrix& gram, const Vector& rhs) {
    LeastSquaresResult result;
    Eigen::LLT<DenseMatrix> llt(gram);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) {
        result.x = llt.solve(rhs);
        return result;
    }
    // Minimal-norm solution from the pseudo-inverse of the symmetric Gram matrix.
    result.rank_deficient = true;
    const SvdResult svd = thin_svd(gram);
    const double cutoff = svd.sigma.size() > 0 ? svd.sigma[0] * 1e-12 : 0.0;
    Vector coeffs = svd.u.transpose() * rhs;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = svd.sigma[i] > cutoff ? coeffs[i] / svd.sigma[i] : 0.0;
    }
    result.x = svd.v * coeffs;
    return result;
}

LeastSquaresResult least_squares(const DenseMatrix& b, const Vector& y) {
    if (b.rows() < b.cols()) throw ConfigError("least_squares: needs at least as many rows as columns");
    const DenseMatrix gram = b.transpose() * b;
    return solve_normal_equations(gram, b.transpose() * y);
}

InnerProduct weighted_inner_product(Vector weights) {
    return [w = std::move(weights)](const Vector& x, const Vector& y) {
        return (w.array() * x.array() * y.array()).sum();
    };
}

std::optional<Vector> gram_schmidt_step(const Vector& v, const std::vector<Vector>& basis,
                                        const InnerProduct& inner, double reject_tol) {
    const double v_norm = std::sqrt(std::max(inner(v, v), 0.0));
    if (v_norm == 0.0) return std::nullopt;
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& phi : basis) w -= inner(w, phi) * phi;
    }
    const double w_norm = std::sqrt(std::max(inner(w, w), 0.0));
    if (w_norm < reject_tol * v_norm) return std::nullopt;
    return w / w_norm;
}

}  // namespace lrbms
