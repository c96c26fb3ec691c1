#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "flreg/grid.hpp"

namespace flreg {

/// Top-r eigenpairs of the uncentered empirical covariance operator,
/// rescaled so the eigenfunctions are orthonormal under the grid quadrature.
struct PcaBasis {
  std::vector<Curve> eigenfunctions;  // size r
  std::vector<double> eigenvalues;    // nonincreasing, size r
  std::size_t r() const { return eigenfunctions.size(); }
};

enum class SemimetricKind { L2, Pca };

struct SemimetricSpec {
  SemimetricKind kind = SemimetricKind::Pca;
  std::size_t r = 1;  // PCA truncation, ignored for L2
};

enum class LocatorKind { PcaDistance, SignedFirstScore };

struct LocatorSpec {
  LocatorKind kind = LocatorKind::PcaDistance;
  std::size_t r = 1;
};

PcaBasis fit_pca_basis(const FunctionalSample& sample, std::size_t r);

/// Projection scores of a curve onto the first r basis functions.
std::vector<double> pca_scores(const Curve& x, const PcaBasis& basis,
                               std::size_t r);

/// d_r: root of the summed squared projections of a-b onto the first r
/// eigenfunctions. A semimetric: distinct curves can sit at distance 0.
double pca_semimetric(const Curve& a, const Curve& b, const PcaBasis& basis,
                      std::size_t r);

double semimetric_eval(const Curve& a, const Curve& b,
                       const SemimetricSpec& spec, const PcaBasis& basis);

/// Locating function beta. PcaDistance is nonnegative; SignedFirstScore is
/// the signed projection of a-b onto the leading eigenfunction. Both are
/// exactly zero at a == b.
double beta_locate(const Curve& a, const Curve& b, const LocatorSpec& spec,
                   const PcaBasis& basis);

// Inspection export: eigenvalues in the header, one eigenfunction per column.
void write_basis_csv(const PcaBasis& basis, std::ostream& out);
void write_basis_csv(const PcaBasis& basis, const std::string& path);

}  // namespace flreg
