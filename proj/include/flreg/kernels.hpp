#pragma once

#include <string>

namespace flreg {

// Asymmetric kernels supported on [0,1] with unit integral:
//   Uniform   K(u) = 1
//   Triangle  K(u) = 2(1-u)
//   Quadratic K(u) = (3/2)(1-u^2)
//   Cubic     K(u) = (4/3)(1-u^3)
enum class KernelKind { Uniform, Triangle, Quadratic, Cubic };

struct KernelSpec {
  KernelKind kind = KernelKind::Quadratic;
};

KernelKind kernel_from_name(const std::string& name);
std::string kernel_name(KernelKind kind);

double kernel_eval(const KernelSpec& spec, double u);

enum class KernelType { TypeI, TypeII, Unclassified };

struct KernelReport {
  double integral = 0.0;       // Simpson estimate of the [0,1] integral
  bool integral_ok = false;    // |integral - 1| <= 1e-6
  bool nonnegative = false;    // scan over [0,1]
  KernelType type = KernelType::Unclassified;
  bool nonincreasing = false;  // scan over [0,1]
  double value_at_one = 0.0;
};

/// Numeric check of the kernel requirements: unit integral (Simpson with
/// 1e4 panels), nonnegativity on a 1e4-point scan, and classification as
/// type I (bounded away from 0 on [0,1]) or type II (K(1)=0, nonincreasing).
KernelReport kernel_validate(const KernelSpec& spec);

}  // namespace flreg
