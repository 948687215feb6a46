#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace ranslab {

using DenseVector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
class CSRMatrix {
 public:
  CSRMatrix() = default;
  CSRMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}
  /// Duplicate entries are summed; explicit zeros are kept in the pattern.
  static CSRMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static CSRMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Pointer to entry (i,j) or nullptr when outside the pattern.
  double* find(int i, int j);
  double get(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  DenseVector operator*(std::span<const double> x) const;
  std::vector<Triplet> to_triplets() const;
  std::vector<std::vector<double>> to_dense() const;
  double norm_inf() const;
  bool operator==(const CSRMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> values_;
};

/// Sparse direct LU (approximate minimum degree ordering on A + A^T).
class SparseLU {
 public:
  SparseLU();
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  void factorize(const CSRMatrix& A);
  DenseVector solve(std::span<const double> b) const;
  bool factorized() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DenseVector sparse_lu_solve(const CSRMatrix& A, std::span<const double> b);

enum class Preconditioner { None, ILU0 };

struct GmresResult {
  DenseVector x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// Restarted GMRES(restart) with right preconditioning.
GmresResult gmres(const CSRMatrix& A, DenseVector x0, std::span<const double> b,
                  Preconditioner prec = Preconditioner::ILU0, double rtol = 1e-10, int maxit = 1000,
                  int restart = 50);

/// y <- y + a*x in place.
void axpy(std::span<double> y, double a, std::span<const double> x);
double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// Euclidean norm of b - A x.
double residual(const CSRMatrix& A, std::span<const double> x, std::span<const double> b);
bool all_finite(std::span<const double> x);

void write_matrix_market(const CSRMatrix& A, std::ostream& out);

}  // namespace ranslab
