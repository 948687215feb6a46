// Independent reference values shared by the unit and acceptance tests.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "ranslab/assembly.hpp"
#include "ranslab/form.hpp"

namespace oracle {

/// Regularized 1D wall distance: |y'| - 1 - eps y'' = 0, y(0) = 0, y'(h) = 0.
inline double eikonal_1d(double s, double h, double eps) {
  return s - eps * (std::exp((s - h) / eps) - std::exp(-h / eps));
}

/// Relative error of the assembled Jacobian form J applied to d against central
/// differences of the assembled residual form F around the state w.
inline double jacobian_fd_error(const ranslab::Form& J, const ranslab::Form& F, ranslab::FieldFunction& w,
                                std::span<const double> d, double rel_step = 1e-6) {
  using namespace ranslab;
  const auto& V = w.space();
  const DenseVector Jd = assemble_matrix(J, V, V) * d;
  const DenseVector w0(w.values().begin(), w.values().end());
  const double h = rel_step * std::max(1.0, norm2(w0)) / std::max(1e-300, norm2(d));
  auto shifted = [&](double s) {
    for (std::size_t i = 0; i < w0.size(); ++i) w[i] = w0[i] + s * h * d[i];
    return assemble_vector(F, V);
  };
  const DenseVector Fp = shifted(1.0), Fm = shifted(-1.0);
  w.assign(w0);
  DenseVector diff(Jd.size());
  for (std::size_t i = 0; i < Jd.size(); ++i) diff[i] = (Fp[i] - Fm[i]) / (2 * h) - Jd[i];
  return norm2(diff) / std::max(1e-300, norm2(Jd));
}

inline double jacobian_fd_error(const ranslab::Form& F, ranslab::FieldFunction& w, std::span<const double> d,
                                double rel_step = 1e-6) {
  return jacobian_fd_error(ranslab::gateaux_derivative(F, w), F, w, d, rel_step);
}

/// Max-norm distance between two vectors.
inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const ranslab::CSRMatrix& A, const ranslab::CSRMatrix& B) {
  const auto a = A.to_dense(), b = B.to_dense();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_diff(a[i], b[i]));
  return m;
}

/// Centroid ordinate and |grad f| of a P1 scalar field, per cell.
inline std::vector<std::array<double, 2>> p1_cell_gradients(const ranslab::FieldFunction& f) {
  const auto& mesh = *f.space()->mesh();
  std::vector<std::array<double, 2>> out;
  for (const auto& c : mesh.cells()) {
    const auto& a = mesh.vertices()[c[0]];
    const auto& b = mesh.vertices()[c[1]];
    const auto& e = mesh.vertices()[c[2]];
    const double x1 = b[0] - a[0], y1 = b[1] - a[1], x2 = e[0] - a[0], y2 = e[1] - a[1];
    const double d1 = f[c[1]] - f[c[0]], d2 = f[c[2]] - f[c[0]];
    const double det = x1 * y2 - x2 * y1;
    const double gx = (d1 * y2 - d2 * y1) / det, gy = (x1 * d2 - x2 * d1) / det;
    out.push_back({(a[1] + b[1] + e[1]) / 3.0, std::hypot(gx, gy)});
  }
  return out;
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace oracle
