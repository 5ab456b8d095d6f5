#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "bpcl/core.hpp"

namespace bpcl {

struct Kernel1d {
  std::function<Complex(double, double)> rule;
  Complex operator()(double x, double y) const { return rule(x, y); }
};

Kernel1d hilbert_1d(double amplitude = 1.0 / kPi);

struct KernelSpec {
  std::string name;
  std::function<Complex(const Point&, const Point&)> rule;
  double size_constant = 1.0;
  double regularity_constant = 2.0;
  double delta = 1.0;
  std::function<double(double)> modulus;
  double nondegeneracy_constant = 0.0;
  std::function<Point(const Point&, double, double)> witness;
  // Present when K(x,y) = k1(x1,y1) * k2(x2,y2).
  std::optional<std::pair<Kernel1d, Kernel1d>> tensor;

  // Unchecked evaluation; callers guarantee x1 != y1 and x2 != y2.
  Complex operator()(const Point& x, const Point& y) const { return rule(x, y); }
  double omega(double t) const { return modulus ? modulus(t) : std::pow(t, delta); }
};

KernelSpec tensor_hilbert(double amplitude = 1.0 / (kPi * kPi));
KernelSpec zero_kernel();

Complex eval_kernel(const KernelSpec& K, const Point& x, const Point& y);
Point nondegenerate_witness(const KernelSpec& K, const Point& x, double r1, double r2);

struct KernelEstimateReport {
  std::int64_t samples = 0;
  double size_ratio = 0.0;
  double regularity_ratio = 0.0;
  double full_regularity_ratio = 0.0;
  bool passes = false;
};

KernelEstimateReport verify_kernel_estimates(const KernelSpec& K, std::int64_t sample_count, std::uint64_t seed);

}  // namespace bpcl
