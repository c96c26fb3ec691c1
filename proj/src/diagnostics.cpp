#include "flreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace flreg {

BallProfile small_ball_profile(const Curve& x, const FunctionalSample& sample,
                               const SemimetricSpec& d_spec,
                               const PcaBasis& basis,
                               const std::vector<double>& h_list) {
  for (std::size_t i = 0; i + 1 < h_list.size(); ++i) {
    if (!(h_list[i] < h_list[i + 1])) {
      throw std::invalid_argument("small_ball_profile: h_list not increasing");
    }
  }
  if (!h_list.empty() && !(h_list.front() > 0.0)) {
    throw std::invalid_argument("small_ball_profile: h values must be positive");
  }

  std::vector<double> dists;
  dists.reserve(sample.size());
  for (const auto& c : sample.curves()) {
    dists.push_back(semimetric_eval(c, x, d_spec, basis));
  }

  BallProfile profile;
  profile.h_values = h_list;
  profile.fractions.reserve(h_list.size());
  const double n = static_cast<double>(sample.size());
  for (double h : h_list) {
    const auto count = std::count_if(dists.begin(), dists.end(),
                                     [h](double d) { return d <= h; });
    profile.fractions.push_back(static_cast<double>(count) / n);
  }
  return profile;
}

std::vector<double> distance_quantiles(const FunctionalSample& sample,
                                       const SemimetricSpec& d_spec,
                                       const PcaBasis& basis,
                                       const std::vector<double>& q_list) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("distance_quantiles: need n >= 2");
  for (double q : q_list) {
    if (!(q > 0.0 && q <= 1.0)) {
      throw std::invalid_argument("distance_quantiles: q must be in (0,1]");
    }
  }

  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(semimetric_eval(sample.curves()[i], sample.curves()[j],
                                      d_spec, basis));
    }
  }
  std::sort(dists.begin(), dists.end());

  std::vector<double> out;
  out.reserve(q_list.size());
  const std::size_t m = dists.size();
  for (double q : q_list) {
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * m));
    if (idx == 0) idx = 1;
    if (idx > m) idx = m;
    out.push_back(dists[idx - 1]);
  }
  return out;
}

void write_ball_profile_csv(const BallProfile& profile, std::ostream& out) {
  out << "h,fraction\n";
  for (std::size_t i = 0; i < profile.h_values.size(); ++i) {
    out << format_double(profile.h_values[i]) << ','
        << format_double(profile.fractions[i]) << '\n';
  }
}

}  // namespace flreg
