#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace flreg {

struct GridMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discretization of [0,1]: strictly increasing points with positive
/// quadrature weights. Immutable after construction; shared by curves.
class Grid {
 public:
  Grid(std::vector<double> points, std::vector<double> weights);

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

  /// Content equality: same points within exact comparison.
  bool same_as(const Grid& other) const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// p equally spaced points t_k = k/(p+1), k = 1..p, with cell-width
/// trapezoid weights.
GridPtr make_uniform_grid(std::size_t p);

/// A function value per grid point. Values are fixed at construction.
class Curve {
 public:
  Curve(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

double inner_product(const Curve& a, const Curve& b);
double l2_distance(const Curve& a, const Curve& b);

/// Quadrature projection of a curve onto a basis function: integral of
/// x(t) v(t) dt.
double project(const Curve& x, const Curve& v);

/// n (curve, response) pairs on a common grid.
class FunctionalSample {
 public:
  FunctionalSample(std::vector<Curve> curves, std::vector<double> responses);

  const std::vector<Curve>& curves() const { return curves_; }
  const std::vector<double>& responses() const { return responses_; }
  const GridPtr& grid() const { return curves_.front().grid(); }
  std::size_t size() const { return curves_.size(); }

 private:
  std::vector<Curve> curves_;
  std::vector<double> responses_;
};

// CSV layout: header row holds the grid points, then one row per
// observation with the response in column 1 followed by the curve values.
// Decimals are written with 17 significant digits so round-trips are exact.
void write_sample_csv(const FunctionalSample& sample, std::ostream& out);
void write_sample_csv(const FunctionalSample& sample, const std::string& path);
FunctionalSample read_sample_csv(std::istream& in);
FunctionalSample read_sample_csv(const std::string& path);

/// Formats a double with enough digits to round-trip bit-exactly.
std::string format_double(double v);

}  // namespace flreg
