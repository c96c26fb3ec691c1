#pragma once

#include <cstddef>
#include <vector>

namespace flreg {

/// Dense symmetric matrix stored row-major.
struct SymmetricEigenResult {
  std::vector<double> eigenvalues;          // descending
  std::vector<std::vector<double>> vectors; // vectors[k] pairs with value k
};

/// Full spectral decomposition by cyclic Jacobi sweeps. The input must be
/// symmetric within 1e-10 relative. Eigenvector signs are fixed so each
/// vector's component sum is nonnegative (tie: first nonzero component
/// positive), giving deterministic output across platforms.
SymmetricEigenResult symmetric_eigen(const std::vector<std::vector<double>>& m);

}  // namespace flreg
