#include "kktcert/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kktcert {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vec axpy(std::span<const double> a, double s, std::span<const double> b) {
  assert(a.size() == b.size());
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + s * b[i];
  return y;
}

Vec least_squares(const std::vector<Vec>& columns, const Vec& b) {
  const std::size_t k = columns.size();
  if (k == 0) return {};
  const std::size_t m = b.size();
  for (const Vec& c : columns)
    if (c.size() != m) throw std::invalid_argument("column length mismatch");

  // Row-major working copy [A | b], reduced by Householder reflections.
  std::vector<Vec> a(m, Vec(k + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = columns[j][i];
    a[i][k] = b[i];
  }

  const std::size_t steps = std::min(m, k);
  double col_scale = 0.0;
  for (const Vec& c : columns) col_scale = std::max(col_scale, norm2(c));
  const double tiny = std::max(col_scale, 1.0) * 1e-13;

  for (std::size_t j = 0; j < steps; ++j) {
    double sigma = 0.0;
    for (std::size_t i = j; i < m; ++i) sigma += a[i][j] * a[i][j];
    sigma = std::sqrt(sigma);
    if (sigma < tiny) continue;  // dependent column, handled at solve time
    if (a[j][j] > 0) sigma = -sigma;
    // Householder vector v = x - sigma*e_j, applied to remaining columns.
    Vec v(m - j);
    for (std::size_t i = j; i < m; ++i) v[i - j] = a[i][j];
    v[0] -= sigma;
    double vtv = dot(v, v);
    if (vtv == 0.0) continue;
    for (std::size_t c = j; c <= k; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += v[i - j] * a[i][c];
      s *= 2.0 / vtv;
      for (std::size_t i = j; i < m; ++i) a[i][c] -= s * v[i - j];
    }
    a[j][j] = sigma;
  }

  Vec z(k, 0.0);
  for (std::size_t jj = steps; jj-- > 0;) {
    double r = a[jj][k];
    for (std::size_t c = jj + 1; c < k; ++c) r -= a[jj][c] * z[c];
    z[jj] = std::abs(a[jj][jj]) < tiny ? 0.0 : r / a[jj][jj];
  }
  return z;
}

Vec nnls(const std::vector<Vec>& columns, const Vec& b) {
  const std::size_t k = columns.size();
  Vec x(k, 0.0);
  if (k == 0) return x;

  std::vector<bool> passive(k, false);
  Vec residual = b;

  double scale = 0.0;
  for (const Vec& c : columns) scale = std::max(scale, norm2(c));
  const double w_tol = std::max(scale * norm2(b), 1.0) * 1e-12;

  auto recompute_residual = [&]() {
    residual = b;
    for (std::size_t j = 0; j < k; ++j)
      if (x[j] != 0.0)
        for (std::size_t i = 0; i < b.size(); ++i)
          residual[i] -= x[j] * columns[j][i];
  };

  const std::size_t max_outer = 3 * k + 10;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    // Most negative gradient component among bound variables.
    std::size_t best = k;
    double best_w = w_tol;
    for (std::size_t j = 0; j < k; ++j) {
      if (passive[j]) continue;
      double w = dot(columns[j], residual);
      if (w > best_w) {
        best_w = w;
        best = j;
      }
    }
    if (best == k) break;
    passive[best] = true;

    // Inner loop: solve the unconstrained subproblem on the passive set,
    // clip variables that went negative back to the bound.
    for (std::size_t inner = 0; inner < 3 * k + 10; ++inner) {
      std::vector<Vec> sub;
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < k; ++j)
        if (passive[j]) {
          sub.push_back(columns[j]);
          idx.push_back(j);
        }
      Vec z = least_squares(sub, b);
      bool all_positive = true;
      for (double v : z)
        if (v <= 0.0) all_positive = false;
      if (all_positive) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t t = 0; t < idx.size(); ++t) x[idx[t]] = z[t];
        break;
      }
      // Step toward z until the first variable hits zero.
      double alpha = 1.0;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (z[t] <= 0.0) {
          double xj = x[idx[t]];
          double a = xj / (xj - z[t]);
          alpha = std::min(alpha, a);
        }
      }
      for (std::size_t t = 0; t < idx.size(); ++t) {
        double xj = x[idx[t]];
        double nx = xj + alpha * (z[t] - xj);
        x[idx[t]] = nx;
      }
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (x[idx[t]] <= 1e-14) {
          x[idx[t]] = 0.0;
          passive[idx[t]] = false;
        }
      }
    }
    recompute_residual();
  }
  return x;
}

Vec jacobi_eigenvalues(std::vector<Vec> a) {
  const std::size_t n = a.size();
  for (const Vec& row : a)
    if (row.size() != n) throw std::invalid_argument("matrix not square");

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
    return std::sqrt(2.0 * s);
  };
  double full = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) full += a[i][j] * a[i][j];
  full = std::sqrt(full);
  const double stop = std::max(full, 1.0) * 1e-15;

  for (int sweep = 0; sweep < 64 && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
      }
    }
  }

  Vec eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace kktcert
