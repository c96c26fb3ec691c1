#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "flreg/eigen.hpp"
#include "flreg/rng.hpp"
#include "flreg/semimetric.hpp"
#include "flreg/simulate.hpp"

using namespace flreg;

namespace {

std::vector<std::vector<double>> random_symmetric(std::size_t n,
                                                  CounterRng& rng) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      m[i][j] = m[j][i] = rng.next_normal();
    }
  }
  return m;
}

Curve shift_by(const Curve& base, const Curve& dir, double s) {
  std::vector<double> v(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    v[k] = base.values()[k] + s * dir.values()[k];
  }
  return Curve(base.grid(), std::move(v));
}

FunctionalSample wiener_sample(std::size_t n, const GridPtr& grid,
                               std::uint64_t seed) {
  WienerConfig wc{100, grid};
  CounterRng rng(seed);
  std::vector<Curve> curves;
  std::vector<double> responses(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    curves.push_back(sample_wiener(wc, rng).curve);
  }
  return FunctionalSample(std::move(curves), std::move(responses));
}

}  // namespace

TEST_CASE("symmetric_eigen on identity and diagonal matrices") {
  auto id = symmetric_eigen({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(id.eigenvalues == std::vector<double>{1, 1, 1});

  auto di = symmetric_eigen({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}});
  CHECK(di.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(di.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(di.eigenvalues[2] == doctest::Approx(1.0));
  CHECK(std::abs(di.vectors[0][0]) == doctest::Approx(1.0));
  CHECK(std::abs(di.vectors[1][2]) == doctest::Approx(1.0));
  CHECK(std::abs(di.vectors[2][1]) == doctest::Approx(1.0));
}

TEST_CASE("symmetric_eigen reconstructs a random 10x10 matrix") {
  CounterRng rng(11);
  auto m = random_symmetric(10, rng);
  auto eig = symmetric_eigen(m);

  double frob_m = 0.0, frob_err = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      double rec = 0.0;
      for (std::size_t k = 0; k < 10; ++k) {
        rec += eig.eigenvalues[k] * eig.vectors[k][i] * eig.vectors[k][j];
      }
      frob_m += m[i][j] * m[i][j];
      frob_err += (rec - m[i][j]) * (rec - m[i][j]);
    }
  }
  CHECK(std::sqrt(frob_err / frob_m) < 1e-9);

  // Orthonormality of the eigenvector set.
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a; b < 10; ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 10; ++k) {
        dot += eig.vectors[a][k] * eig.vectors[b][k];
      }
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
  }

  // Eigenvalue sum equals the trace.
  double trace = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 10; ++i) trace += m[i][i];
  for (double v : eig.eigenvalues) sum += v;
  CHECK(sum == doctest::Approx(trace).epsilon(1e-9));
}

TEST_CASE("symmetric_eigen sign convention is deterministic") {
  CounterRng rng(5);
  auto m = random_symmetric(6, rng);
  auto a = symmetric_eigen(m);
  auto b = symmetric_eigen(m);
  CHECK(a.vectors == b.vectors);
  for (const auto& v : a.vectors) {
    double s = 0.0;
    for (double x : v) s += x;
    CHECK(s >= -1e-12);
  }
}

TEST_CASE("symmetric_eigen rejects asymmetric input") {
  CHECK_THROWS_AS(symmetric_eigen({{1, 2}, {3, 4}}), std::invalid_argument);
}

TEST_CASE("fit_pca_basis on a rank-1 sample") {
  auto g = make_uniform_grid(30);
  std::vector<double> vals(30);
  for (std::size_t k = 0; k < 30; ++k) vals[k] = std::sin(3.0 * g->points()[k]);
  Curve c(g, vals);
  FunctionalSample sample({c, c, c}, {0, 0, 0});

  auto basis = fit_pca_basis(sample, 3);
  REQUIRE(basis.r() == 3);
  CHECK(basis.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(basis.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-10));

  // First eigenfunction proportional to the curve: unit cosine similarity.
  const double num = std::abs(inner_product(c, basis.eigenfunctions[0]));
  const double den = l2_distance(c, Curve(g, std::vector<double>(30, 0.0)));
  CHECK(num / den == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(fit_pca_basis(sample, 31), std::invalid_argument);
}

TEST_CASE("fit_pca_basis recovers the Wiener spectrum") {
  auto g = make_uniform_grid(100);
  auto sample = wiener_sample(5000, g, 12345);
  auto basis = fit_pca_basis(sample, 4);

  CHECK(basis.eigenvalues[0] ==
        doctest::Approx(kl_eigenvalue(1)).epsilon(0.10));

  std::vector<double> v1(100);
  for (std::size_t k = 0; k < 100; ++k) {
    v1[k] = kl_eigenfunction(1, g->points()[k]);
  }
  Curve true_ef(g, v1);
  CHECK(std::abs(inner_product(true_ef, basis.eigenfunctions[0])) >= 0.95);

  // Quadrature orthonormality of the fitted basis.
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a; b < 4; ++b) {
      CHECK(inner_product(basis.eigenfunctions[a], basis.eigenfunctions[b]) ==
            doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("pca_semimetric identities and truncation blindness") {
  auto g = make_uniform_grid(60);
  auto sample = wiener_sample(200, g, 77);
  auto basis = fit_pca_basis(sample, 3);

  const Curve& a = sample.curves()[0];
  CHECK(pca_semimetric(a, a, basis, 3) == 0.0);

  // a - b equal to an eigenfunction: distance 1 under r covering it,
  // 0 under r below it.
  Curve b1 = Curve(g, basis.eigenfunctions[0].values());
  Curve zero(g, std::vector<double>(60, 0.0));
  CHECK(pca_semimetric(b1, zero, basis, 1) == doctest::Approx(1.0).epsilon(1e-8));

  Curve b2 = Curve(g, basis.eigenfunctions[1].values());
  CHECK(pca_semimetric(b2, zero, basis, 1) ==
        doctest::Approx(0.0).epsilon(1e-8));
  CHECK(pca_semimetric(b2, zero, basis, 2) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pca_semimetric is monotone in r and Bessel-bounded") {
  auto g = make_uniform_grid(50);
  auto sample = wiener_sample(100, g, 31);
  auto basis = fit_pca_basis(sample, 6);
  for (std::size_t i = 0; i + 1 < 20; i += 2) {
    const Curve& a = sample.curves()[i];
    const Curve& b = sample.curves()[i + 1];
    double prev = 0.0;
    for (std::size_t r = 1; r <= 6; ++r) {
      const double d = pca_semimetric(a, b, basis, r);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
    CHECK(pca_semimetric(a, b, basis, 6) <= l2_distance(a, b) + 1e-8);
  }
}

TEST_CASE("beta_locate variants") {
  auto g = make_uniform_grid(50);
  auto sample = wiener_sample(100, g, 63);
  auto basis = fit_pca_basis(sample, 2);

  const Curve& a = sample.curves()[0];
  CHECK(beta_locate(a, a, {LocatorKind::PcaDistance, 2}, basis) == 0.0);
  CHECK(beta_locate(a, a, {LocatorKind::SignedFirstScore, 1}, basis) == 0.0);

  // a - b = -v1: signed score is -1.
  Curve zero(g, std::vector<double>(50, 0.0));
  Curve minus_v1 = [&] {
    std::vector<double> v(50);
    for (std::size_t k = 0; k < 50; ++k) {
      v[k] = -basis.eigenfunctions[0].values()[k];
    }
    return Curve(g, v);
  }();
  CHECK(beta_locate(minus_v1, zero, {LocatorKind::SignedFirstScore, 1},
                    basis) == doctest::Approx(-1.0).epsilon(1e-8));

  // PcaDistance locator equals the semimetric; signed score is bounded
  // by the r=1 distance.
  for (std::size_t i = 0; i + 1 < 100; i += 1) {
    const Curve& x = sample.curves()[i];
    const Curve& y = sample.curves()[(i + 37) % 100];
    CHECK(beta_locate(x, y, {LocatorKind::PcaDistance, 2}, basis) ==
          pca_semimetric(x, y, basis, 2));
    CHECK(std::abs(beta_locate(x, y, {LocatorKind::SignedFirstScore, 1},
                               basis)) <=
          pca_semimetric(x, y, basis, 1) + 1e-10);
  }
}
