#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "flreg/grid.hpp"
#include "flreg/rng.hpp"

using namespace flreg;

namespace {

Curve constant_curve(const GridPtr& g, double c) {
  return Curve(g, std::vector<double>(g->size(), c));
}

Curve from_fn(const GridPtr& g, double (*f)(double)) {
  std::vector<double> v(g->size());
  for (std::size_t k = 0; k < g->size(); ++k) v[k] = f(g->points()[k]);
  return Curve(g, std::move(v));
}

Curve random_curve(const GridPtr& g, CounterRng& rng) {
  std::vector<double> v(g->size());
  for (auto& x : v) x = rng.next_normal();
  return Curve(g, std::move(v));
}

}  // namespace

TEST_CASE("make_uniform_grid places open-interval points") {
  auto g = make_uniform_grid(100);
  REQUIRE(g->size() == 100);
  CHECK(g->points().front() == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  CHECK(g->points().back() == doctest::Approx(100.0 / 101.0).epsilon(1e-15));

  auto g2 = make_uniform_grid(2);
  CHECK(g2->points()[0] == doctest::Approx(1.0 / 3.0));
  CHECK(g2->points()[1] == doctest::Approx(2.0 / 3.0));

  auto g3 = make_uniform_grid(3);
  CHECK(g3->points()[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(make_uniform_grid(1), std::invalid_argument);
}

TEST_CASE("quadrature of constant 1 equals the weight sum exactly") {
  auto g = make_uniform_grid(37);
  auto one = constant_curve(g, 1.0);
  double wsum = 0.0;
  for (double w : g->weights()) wsum += w;
  CHECK(inner_product(one, one) == wsum);
}

TEST_CASE("inner_product matches analytic integrals") {
  auto g = make_uniform_grid(1000);
  auto one = constant_curve(g, 1.0);
  CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(2e-3));

  auto t = from_fn(g, [](double x) { return x; });
  CHECK(inner_product(t, one) == doctest::Approx(0.5).epsilon(2e-3));

  // Orthogonality of the sin((j - 1/2) pi t) family.
  auto v1 = from_fn(g, [](double x) {
    return std::numbers::sqrt2 * std::sin(0.5 * std::numbers::pi * x);
  });
  auto v2 = from_fn(g, [](double x) {
    return std::numbers::sqrt2 * std::sin(1.5 * std::numbers::pi * x);
  });
  CHECK(std::abs(inner_product(v1, v2)) < 1e-3);
}

TEST_CASE("inner_product is symmetric and bilinear") {
  auto g = make_uniform_grid(50);
  CounterRng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = random_curve(g, rng);
    auto b = random_curve(g, rng);
    auto c = random_curve(g, rng);
    CHECK(inner_product(a, b) == doctest::Approx(inner_product(b, a))
                                      .epsilon(1e-12));
    std::vector<double> sum_vals(g->size());
    const double s = 0.7;
    for (std::size_t k = 0; k < g->size(); ++k) {
      sum_vals[k] = s * b.values()[k] + c.values()[k];
    }
    Curve combo(g, sum_vals);
    CHECK(inner_product(a, combo) ==
          doctest::Approx(s * inner_product(a, b) + inner_product(a, c))
              .epsilon(1e-12));
  }
}

TEST_CASE("l2_distance basics") {
  auto g = make_uniform_grid(1000);
  auto one = constant_curve(g, 1.0);
  auto zero = constant_curve(g, 0.0);
  CHECK(l2_distance(one, one) == 0.0);
  CHECK(l2_distance(one, zero) == doctest::Approx(1.0).epsilon(2e-3));

  CounterRng rng(7);
  auto a = random_curve(g, rng);
  auto b = random_curve(g, rng);
  CHECK(l2_distance(a, b) == doctest::Approx(l2_distance(b, a)).epsilon(1e-14));
}

TEST_CASE("l2_distance triangle inequality on random triples") {
  auto g = make_uniform_grid(40);
  CounterRng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    auto a = random_curve(g, rng);
    auto b = random_curve(g, rng);
    auto c = random_curve(g, rng);
    CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-10);
  }
}

TEST_CASE("grid mismatch is rejected") {
  auto g1 = make_uniform_grid(10);
  auto g2 = make_uniform_grid(11);
  auto a = constant_curve(g1, 1.0);
  auto b = constant_curve(g2, 1.0);
  CHECK_THROWS_AS(inner_product(a, b), GridMismatchError);
  CHECK_THROWS_AS(l2_distance(a, b), GridMismatchError);
}

TEST_CASE("grid identity is by content, not reference") {
  auto g1 = make_uniform_grid(10);
  auto g2 = make_uniform_grid(10);
  auto a = constant_curve(g1, 2.0);
  auto b = constant_curve(g2, 3.0);
  CHECK(inner_product(a, b) == doctest::Approx(6.0 * 10.0 / 11.0));
}

TEST_CASE("curve validation") {
  auto g = make_uniform_grid(5);
  CHECK_THROWS_AS(Curve(g, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Curve(g, {1, 2, 3, 4, std::nan("")}), std::invalid_argument);
}

TEST_CASE("sample CSV round-trips bit-exactly") {
  auto g = make_uniform_grid(12);
  CounterRng rng(3);
  std::vector<Curve> curves;
  std::vector<double> responses;
  for (int i = 0; i < 8; ++i) {
    curves.push_back(random_curve(g, rng));
    responses.push_back(rng.next_normal());
  }
  FunctionalSample sample(curves, responses);

  std::stringstream ss;
  write_sample_csv(sample, ss);
  auto back = read_sample_csv(ss);

  REQUIRE(back.size() == sample.size());
  CHECK(back.responses() == sample.responses());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    CHECK(back.curves()[i].values() == sample.curves()[i].values());
  }
  CHECK(back.grid()->points() == sample.grid()->points());
}
