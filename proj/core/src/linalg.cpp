#include "ranslab/linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "ranslab/error.hpp"

namespace ranslab {

CSRMatrix CSRMatrix::from_triplets(int rows, int cols, std::vector<Triplet> t) {
  CSRMatrix A(rows, cols);
  for (const auto& e : t)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw InvalidArgument("triplet index out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  A.col_.reserve(t.size());
  A.values_.reserve(t.size());
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    while (k < t.size() && t[k].row == i) {
      const int j = t[k].col;
      double s = 0.0;
      while (k < t.size() && t[k].row == i && t[k].col == j) s += t[k++].value;
      A.col_.push_back(j);
      A.values_.push_back(s);
    }
    A.row_ptr_[i + 1] = static_cast<int>(A.col_.size());
  }
  return A;
}

CSRMatrix CSRMatrix::identity(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double* CSRMatrix::find(int i, int j) {
  auto b = col_.begin() + row_ptr_[i], e = col_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return nullptr;
  return &values_[it - col_.begin()];
}

double CSRMatrix::get(int i, int j) const {
  auto b = col_.begin() + row_ptr_[i], e = col_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(b, e, j);
  return (it == e || *it != j) ? 0.0 : values_[it - col_.begin()];
}

void CSRMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw InvalidArgument("matrix-vector size mismatch");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_[k]];
    y[i] = s;
  }
}

DenseVector CSRMatrix::operator*(std::span<const double> x) const {
  DenseVector y(rows_);
  multiply(x, y);
  return y;
}

std::vector<Triplet> CSRMatrix::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({i, col_[k], values_[k]});
  return t;
}

std::vector<std::vector<double>> CSRMatrix::to_dense() const {
  std::vector<std::vector<double>> D(rows_, std::vector<double>(cols_, 0.0));
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) D[i][col_[k]] = values_[k];
  return D;
}

double CSRMatrix::norm_inf() const {
  double m = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

struct SparseLU::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool ok = false;
  int n = 0;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factorize(const CSRMatrix& A) {
  if (A.rows() != A.cols()) throw InvalidArgument("LU needs a square matrix");
  Eigen::SparseMatrix<double> M(A.rows(), A.cols());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nnz());
  for (const auto& e : A.to_triplets()) t.emplace_back(e.row, e.col, e.value);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  impl_->ok = false;
  impl_->lu.analyzePattern(M);
  impl_->lu.factorize(M);
  if (impl_->lu.info() != Eigen::Success)
    throw SingularMatrix("sparse LU failed: " + impl_->lu.lastErrorMessage());
  impl_->ok = true;
  impl_->n = A.rows();
}

DenseVector SparseLU::solve(std::span<const double> b) const {
  if (!impl_->ok) throw InvalidArgument("LU solve before factorization");
  if (static_cast<int>(b.size()) != impl_->n) throw InvalidArgument("LU solve size mismatch");
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  return DenseVector(x.data(), x.data() + x.size());
}

bool SparseLU::factorized() const { return impl_->ok; }

DenseVector sparse_lu_solve(const CSRMatrix& A, std::span<const double> b) {
  SparseLU lu;
  lu.factorize(A);
  return lu.solve(b);
}

namespace {

struct ILU0 {
  const CSRMatrix* A = nullptr;
  std::vector<double> lu;
  std::vector<int> diag;

  explicit ILU0(const CSRMatrix& M) : A(&M), lu(M.values()), diag(M.rows(), -1) {
    const auto& rp = M.row_ptr();
    const auto& ci = M.col_index();
    const int n = M.rows();
    for (int i = 0; i < n; ++i)
      for (int k = rp[i]; k < rp[i + 1]; ++k)
        if (ci[k] == i) diag[i] = k;
    for (int i = 0; i < n; ++i)
      if (diag[i] < 0 || lu[diag[i]] == 0.0) throw SingularMatrix("ILU(0) needs a nonzero diagonal");
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) {
      for (int k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = k;
      for (int k = rp[i]; k < rp[i + 1] && ci[k] < i; ++k) {
        const int j = ci[k];
        lu[k] /= lu[diag[j]];
        for (int m = diag[j] + 1; m < rp[j + 1]; ++m)
          if (pos[ci[m]] >= 0) lu[pos[ci[m]]] -= lu[k] * lu[m];
      }
      if (lu[diag[i]] == 0.0) throw SingularMatrix("ILU(0) zero pivot");
      for (int k = rp[i]; k < rp[i + 1]; ++k) pos[ci[k]] = -1;
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const auto& rp = A->row_ptr();
    const auto& ci = A->col_index();
    const int n = A->rows();
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int k = rp[i]; k < diag[i]; ++k) s -= lu[k] * z[ci[k]];
      z[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = diag[i] + 1; k < rp[i + 1]; ++k) s -= lu[k] * z[ci[k]];
      z[i] = s / lu[diag[i]];
    }
  }
};

}  // namespace

GmresResult gmres(const CSRMatrix& A, DenseVector x0, std::span<const double> b, Preconditioner prec,
                  double rtol, int maxit, int restart) {
  const int n = A.rows();
  if (A.cols() != n || static_cast<int>(b.size()) != n || static_cast<int>(x0.size()) != n)
    throw InvalidArgument("gmres size mismatch");
  GmresResult res;
  res.x = std::move(x0);
  const double bnorm = norm2(b);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  DenseVector r(n);
  auto compute_r = [&] {
    A.multiply(res.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };
  double rnorm = compute_r();
  res.relative_residual = rnorm / scale;
  if (maxit <= 0) return res;
  if (rnorm / scale <= rtol) {
    res.converged = true;
    return res;
  }
  std::unique_ptr<ILU0> ilu;
  if (prec == Preconditioner::ILU0) ilu = std::make_unique<ILU0>(A);
  auto precondition = [&](std::span<const double> v, std::span<double> z) {
    if (ilu)
      ilu->apply(v, z);
    else
      std::copy(v.begin(), v.end(), z.begin());
  };

  const int m = std::max(1, restart);
  std::vector<DenseVector> V(m + 1, DenseVector(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);
  DenseVector z(n), w(n);

  while (res.iterations < maxit) {
    for (int i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    int k = 0;
    bool breakdown = false;
    for (; k < m && res.iterations < maxit; ++k) {
      ++res.iterations;
      precondition(V[k], z);
      A.multiply(z, w);
      for (int j = 0; j <= k; ++j) {
        H[j][k] = dot(w, V[j]);
        axpy(w, -H[j][k], V[j]);
      }
      H[k + 1][k] = norm2(w);
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double d = std::hypot(H[k][k], H[k + 1][k]);
      if (d == 0.0 || !std::isfinite(d)) {
        breakdown = true;
        break;
      }
      const double hk1 = H[k + 1][k];
      cs[k] = H[k][k] / d;
      sn[k] = hk1 / d;
      H[k][k] = d;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (hk1 != 0.0)
        for (int i = 0; i < n; ++i) V[k + 1][i] = w[i] / hk1;
      if (std::abs(g[k + 1]) / scale <= rtol || hk1 == 0.0) {
        ++k;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    DenseVector u(n, 0.0);
    for (int j = 0; j < k; ++j) axpy(u, y[j], V[j]);
    precondition(u, z);
    axpy(res.x, 1.0, z);
    rnorm = compute_r();
    res.relative_residual = rnorm / scale;
    if (!all_finite(res.x)) break;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      break;
    }
    if (breakdown) break;
  }
  return res;
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
  if (y.size() != x.size()) throw InvalidArgument("axpy length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("dot length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double residual(const CSRMatrix& A, std::span<const double> x, std::span<const double> b) {
  DenseVector r = A * x;
  if (r.size() != b.size()) throw InvalidArgument("residual size mismatch");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void write_matrix_market(const CSRMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  out << std::setprecision(17);
  for (const auto& t : A.to_triplets()) out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
}

}  // namespace ranslab
