#include "flreg/semimetric.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "flreg/eigen.hpp"

namespace flreg {

PcaBasis fit_pca_basis(const FunctionalSample& sample, std::size_t r) {
  const std::size_t p = sample.grid()->size();
  const std::size_t n = sample.size();
  if (r < 1 || r > p) {
    throw std::invalid_argument("fit_pca_basis: r out of range");
  }
  if (n < 2) {
    throw std::invalid_argument("fit_pca_basis: need n >= 2");
  }

  // Uncentered covariance G(t_a, t_b) = (1/n) sum_i x_i(t_a) x_i(t_b).
  std::vector<std::vector<double>> g(p, std::vector<double>(p, 0.0));
  for (const auto& c : sample.curves()) {
    const auto& v = c.values();
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b) {
        g[a][b] += v[a] * v[b];
      }
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      g[a][b] /= static_cast<double>(n);
      g[b][a] = g[a][b];
    }
  }

  // Weight by W^{1/2} on both sides so Euclidean-orthonormal eigenvectors
  // of the discrete problem map to quadrature-orthonormal eigenfunctions.
  const auto& w = sample.grid()->weights();
  std::vector<double> sqw(p);
  for (std::size_t k = 0; k < p; ++k) sqw[k] = std::sqrt(w[k]);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      g[a][b] *= sqw[a] * sqw[b];
    }
  }

  auto eig = symmetric_eigen(g);

  PcaBasis basis;
  basis.eigenvalues.assign(eig.eigenvalues.begin(),
                           eig.eigenvalues.begin() + r);
  basis.eigenfunctions.reserve(r);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<double> vals(p);
    for (std::size_t a = 0; a < p; ++a) {
      vals[a] = eig.vectors[k][a] / sqw[a];
    }
    basis.eigenfunctions.emplace_back(sample.grid(), std::move(vals));
  }
  return basis;
}

std::vector<double> pca_scores(const Curve& x, const PcaBasis& basis,
                               std::size_t r) {
  if (r > basis.r()) {
    throw std::invalid_argument("pca_scores: r exceeds basis size");
  }
  std::vector<double> s(r);
  for (std::size_t k = 0; k < r; ++k) {
    s[k] = project(x, basis.eigenfunctions[k]);
  }
  return s;
}

double pca_semimetric(const Curve& a, const Curve& b, const PcaBasis& basis,
                      std::size_t r) {
  if (r > basis.r()) {
    throw std::invalid_argument("pca_semimetric: r exceeds basis size");
  }
  if (&a == &b || a.values() == b.values()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    const double proj = project(a, basis.eigenfunctions[k]) -
                        project(b, basis.eigenfunctions[k]);
    acc += proj * proj;
  }
  return std::sqrt(acc);
}

double semimetric_eval(const Curve& a, const Curve& b,
                       const SemimetricSpec& spec, const PcaBasis& basis) {
  if (spec.kind == SemimetricKind::L2) return l2_distance(a, b);
  return pca_semimetric(a, b, basis, spec.r);
}

double beta_locate(const Curve& a, const Curve& b, const LocatorSpec& spec,
                   const PcaBasis& basis) {
  if (spec.kind == LocatorKind::PcaDistance) {
    return pca_semimetric(a, b, basis, spec.r);
  }
  if (&a == &b || a.values() == b.values()) return 0.0;
  return project(a, basis.eigenfunctions[0]) -
         project(b, basis.eigenfunctions[0]);
}

void write_basis_csv(const PcaBasis& basis, std::ostream& out) {
  out << "t";
  for (double lam : basis.eigenvalues) out << ',' << format_double(lam);
  out << '\n';
  const auto& grid = *basis.eigenfunctions.front().grid();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    out << format_double(grid.points()[a]);
    for (const auto& ef : basis.eigenfunctions) {
      out << ',' << format_double(ef.values()[a]);
    }
    out << '\n';
  }
}

void write_basis_csv(const PcaBasis& basis, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_basis_csv(basis, f);
}

}  // namespace flreg
