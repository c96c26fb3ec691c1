#include "flreg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flreg {

namespace {

double off_diagonal_norm(const std::vector<std::vector<double>>& a) {
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

SymmetricEigenResult symmetric_eigen(
    const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("symmetric_eigen: empty matrix");
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) {
      throw std::invalid_argument("symmetric_eigen: matrix not square");
    }
    for (std::size_t j = 0; j < n; ++j) {
      max_abs = std::max(max_abs, std::abs(m[i][j]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m[i][j] - m[j][i]) > 1e-10 * std::max(1.0, max_abs)) {
        throw std::invalid_argument("symmetric_eigen: matrix not symmetric");
      }
    }
  }

  auto a = m;
  // Symmetrize exactly so rotations stay consistent.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a[i][j] + a[j][i]);
      a[i][j] = a[j][i] = v;
    }
  }

  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  const double tol = 1e-12 * std::max(1.0, max_abs);
  const int max_sweeps = 100;
  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (++sweep > max_sweeps) {
      throw std::runtime_error("symmetric_eigen: Jacobi did not converge");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a[p][p], aqq = a[q][q];
        a[p][p] = app - t * apq;
        a[q][q] = aqq + t * apq;
        a[p][q] = a[q][p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = a[p][k] = akp - s * (akq + tau * akp);
          a[k][q] = a[q][k] = akq + s * (akp - tau * akq);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = vkp - s * (vkq + tau * vkp);
          v[k][q] = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return a[i][i] > a[j][j];
                   });

  SymmetricEigenResult res;
  res.eigenvalues.resize(n);
  res.vectors.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t col = order[k];
    res.eigenvalues[k] = a[col][col];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += v[i][col];
    double sign = 1.0;
    if (sum < 0.0) {
      sign = -1.0;
    } else if (sum == 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (v[i][col] != 0.0) {
          sign = v[i][col] > 0.0 ? 1.0 : -1.0;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) res.vectors[k][i] = sign * v[i][col];
  }
  return res;
}

}  // namespace flreg
