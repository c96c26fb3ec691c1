#include "flreg/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace flreg {

KernelKind kernel_from_name(const std::string& name) {
  if (name == "uniform") return KernelKind::Uniform;
  if (name == "triangle") return KernelKind::Triangle;
  if (name == "quadratic") return KernelKind::Quadratic;
  if (name == "cubic") return KernelKind::Cubic;
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::Uniform: return "uniform";
    case KernelKind::Triangle: return "triangle";
    case KernelKind::Quadratic: return "quadratic";
    case KernelKind::Cubic: return "cubic";
  }
  return "?";
}

double kernel_eval(const KernelSpec& spec, double u) {
  if (u < 0.0 || u > 1.0) return 0.0;
  switch (spec.kind) {
    case KernelKind::Uniform: return 1.0;
    case KernelKind::Triangle: return 2.0 * (1.0 - u);
    case KernelKind::Quadratic: return 1.5 * (1.0 - u * u);
    case KernelKind::Cubic: return (4.0 / 3.0) * (1.0 - u * u * u);
  }
  return 0.0;
}

KernelReport kernel_validate(const KernelSpec& spec) {
  KernelReport rep;
  const int panels = 10000;
  const double h = 1.0 / panels;
  double simpson = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = i * h;
    const double b = a + h;
    simpson += (h / 6.0) * (kernel_eval(spec, a) +
                            4.0 * kernel_eval(spec, 0.5 * (a + b)) +
                            kernel_eval(spec, b));
  }
  rep.integral = simpson;
  rep.integral_ok = std::abs(simpson - 1.0) <= 1e-6;

  const int scan = 10000;
  double min_val = kernel_eval(spec, 0.0);
  bool nonneg = true;
  bool noninc = true;
  double prev = kernel_eval(spec, 0.0);
  for (int i = 1; i <= scan; ++i) {
    const double u = static_cast<double>(i) / scan;
    const double k = kernel_eval(spec, u);
    if (k < 0.0) nonneg = false;
    if (k > prev + 1e-15) noninc = false;
    if (k < min_val) min_val = k;
    prev = k;
  }
  rep.nonnegative = nonneg;
  rep.nonincreasing = noninc;
  rep.value_at_one = kernel_eval(spec, 1.0);

  if (min_val > 0.0) {
    rep.type = KernelType::TypeI;
  } else if (rep.value_at_one == 0.0 && noninc) {
    rep.type = KernelType::TypeII;
  }
  return rep;
}

}  // namespace flreg
