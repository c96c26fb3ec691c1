#include "flreg/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace flreg {

Grid::Grid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("Grid: need at least 2 points");
  }
  if (points_.size() != weights_.size()) {
    throw std::invalid_argument("Grid: points/weights length mismatch");
  }
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    if (!(points_[k] < points_[k + 1])) {
      throw std::invalid_argument("Grid: points must be strictly increasing");
    }
  }
  for (double w : weights_) {
    if (!(w > 0.0)) {
      throw std::invalid_argument("Grid: weights must be positive");
    }
  }
}

bool Grid::same_as(const Grid& other) const {
  return points_ == other.points_;
}

GridPtr make_uniform_grid(std::size_t p) {
  if (p < 2) {
    throw std::invalid_argument("make_uniform_grid: p must be >= 2");
  }
  std::vector<double> points(p);
  for (std::size_t k = 0; k < p; ++k) {
    points[k] = static_cast<double>(k + 1) / static_cast<double>(p + 1);
  }
  // Each point owns the width of its cell; endpoint cells extend halfway
  // to the open-interval boundary covered by the grid.
  std::vector<double> weights(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double left = (k == 0) ? points[0] - 0.5 / (p + 1)
                                 : 0.5 * (points[k - 1] + points[k]);
    const double right = (k + 1 == p) ? points[p - 1] + 0.5 / (p + 1)
                                      : 0.5 * (points[k] + points[k + 1]);
    weights[k] = right - left;
  }
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

Curve::Curve(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw std::invalid_argument("Curve: null grid");
  }
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("Curve: values length != grid length");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Curve: non-finite value");
    }
  }
}

namespace {
void require_shared_grid(const Curve& a, const Curve& b) {
  if (a.grid() != b.grid() && !a.grid()->same_as(*b.grid())) {
    throw GridMismatchError("curves are on different grids");
  }
}
}  // namespace

double inner_product(const Curve& a, const Curve& b) {
  require_shared_grid(a, b);
  const auto& w = a.grid()->weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k] * a.values()[k] * b.values()[k];
  }
  return acc;
}

double l2_distance(const Curve& a, const Curve& b) {
  require_shared_grid(a, b);
  const auto& w = a.grid()->weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = a.values()[k] - b.values()[k];
    acc += w[k] * d * d;
  }
  return std::sqrt(acc);
}

double project(const Curve& x, const Curve& v) { return inner_product(x, v); }

FunctionalSample::FunctionalSample(std::vector<Curve> curves,
                                   std::vector<double> responses)
    : curves_(std::move(curves)), responses_(std::move(responses)) {
  if (curves_.empty()) {
    throw std::invalid_argument("FunctionalSample: empty sample");
  }
  if (curves_.size() != responses_.size()) {
    throw std::invalid_argument(
        "FunctionalSample: curves/responses length mismatch");
  }
  const auto& g = curves_.front().grid();
  for (const auto& c : curves_) {
    if (c.grid() != g && !c.grid()->same_as(*g)) {
      throw GridMismatchError("FunctionalSample: curves on different grids");
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sample_csv(const FunctionalSample& sample, std::ostream& out) {
  const auto& pts = sample.grid()->points();
  out << "response";
  for (double t : pts) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << format_double(sample.responses()[i]);
    for (double v : sample.curves()[i].values()) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

void write_sample_csv(const FunctionalSample& sample, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_sample_csv(sample, f);
}

namespace {
std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(std::stod(cell));
  }
  return out;
}
}  // namespace

FunctionalSample read_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("sample CSV: empty input");
  }
  // Header: "response,t1,...,tp"
  std::vector<double> pts;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // label column
    while (std::getline(ss, cell, ',')) pts.push_back(std::stod(cell));
  }
  const std::size_t p = pts.size();
  // Reconstruct cell-width weights from point spacing; matches
  // make_uniform_grid exactly on equally spaced grids.
  std::vector<double> weights(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double left = (k == 0) ? pts[0] - 0.5 * (pts[1] - pts[0])
                                 : 0.5 * (pts[k - 1] + pts[k]);
    const double right = (k + 1 == p)
                             ? pts[p - 1] + 0.5 * (pts[p - 1] - pts[p - 2])
                             : 0.5 * (pts[k] + pts[k + 1]);
    weights[k] = right - left;
  }
  auto grid = std::make_shared<const Grid>(pts, std::move(weights));

  std::vector<Curve> curves;
  std::vector<double> responses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = parse_csv_row(line);
    if (row.size() != p + 1) {
      throw std::runtime_error("sample CSV: row width mismatch");
    }
    responses.push_back(row[0]);
    curves.emplace_back(grid,
                        std::vector<double>(row.begin() + 1, row.end()));
  }
  return FunctionalSample(std::move(curves), std::move(responses));
}

FunctionalSample read_sample_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_sample_csv(f);
}

}  // namespace flreg
