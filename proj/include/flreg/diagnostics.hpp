#pragma once

#include <iosfwd>
#include <vector>

#include "flreg/grid.hpp"
#include "flreg/semimetric.hpp"

namespace flreg {

/// Empirical small-ball profile: fraction of sample curves within distance
/// h of a center, per h.
struct BallProfile {
  std::vector<double> h_values;
  std::vector<double> fractions;  // nondecreasing, in [0,1]
};

BallProfile small_ball_profile(const Curve& x, const FunctionalSample& sample,
                               const SemimetricSpec& d_spec,
                               const PcaBasis& basis,
                               const std::vector<double>& h_list);

/// Nearest-rank quantiles of the n(n-1)/2 pairwise distances.
std::vector<double> distance_quantiles(const FunctionalSample& sample,
                                       const SemimetricSpec& d_spec,
                                       const PcaBasis& basis,
                                       const std::vector<double>& q_list);

void write_ball_profile_csv(const BallProfile& profile, std::ostream& out);

}  // namespace flreg
