#include "bpcl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bpcl {

Kernel1d hilbert_1d(double amplitude) {
  return {[amplitude](double x, double y) { return Complex(amplitude / (x - y)); }};
}

KernelSpec tensor_hilbert(double amplitude) {
  if (!(amplitude > 0.0)) throw InvalidInput("kernel amplitude must be positive");
  KernelSpec K;
  K.name = "tensor_hilbert";
  K.rule = [amplitude](const Point& x, const Point& y) {
    return Complex(amplitude / ((x[0] - y[0]) * (x[1] - y[1])));
  };
  K.size_constant = amplitude;
  K.regularity_constant = 2.0;
  K.delta = 1.0;
  K.modulus = [](double t) { return t; };
  K.nondegeneracy_constant = amplitude / 4.0;
  K.witness = [](const Point& x, double r1, double r2) { return Point{x[0] + 2.0 * r1, x[1] + 2.0 * r2}; };
  // Split the amplitude as (1/pi) * (amplitude*pi).
  K.tensor = std::make_pair(hilbert_1d(1.0 / kPi), hilbert_1d(amplitude * kPi));
  return K;
}

KernelSpec zero_kernel() {
  KernelSpec K;
  K.name = "zero";
  K.rule = [](const Point&, const Point&) { return Complex(0.0); };
  K.size_constant = 1.0;
  K.regularity_constant = 1.0;
  K.modulus = [](double t) { return t; };
  K.nondegeneracy_constant = 0.0;
  K.witness = [](const Point& x, double r1, double r2) { return Point{x[0] + 2.0 * r1, x[1] + 2.0 * r2}; };
  K.tensor = std::make_pair(Kernel1d{[](double, double) { return Complex(0.0); }},
                            Kernel1d{[](double, double) { return Complex(0.0); }});
  return K;
}

Complex eval_kernel(const KernelSpec& K, const Point& x, const Point& y) {
  if (x[0] == y[0] || x[1] == y[1]) {
    std::ostringstream os;
    os << "kernel evaluated on the diagonal at x=(" << x[0] << "," << x[1] << "), y=(" << y[0] << "," << y[1] << ")";
    throw SingularityError(os.str());
  }
  return K(x, y);
}

Point nondegenerate_witness(const KernelSpec& K, const Point& x, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw InvalidInput("witness radii must be positive");
  return K.witness(x, r1, r2);
}

KernelEstimateReport verify_kernel_estimates(const KernelSpec& K, std::int64_t sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw InvalidInput("sample_count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> logmag(std::log(1e-2), std::log(10.0));
  std::uniform_real_distribution<double> frac(-0.5, 0.5);
  std::bernoulli_distribution coin(0.5);
  auto offset = [&] { return (coin(rng) ? 1.0 : -1.0) * std::exp(logmag(rng)); };

  KernelEstimateReport rep;
  rep.samples = sample_count;
  const double C = K.size_constant;
  for (std::int64_t s = 0; s < sample_count; ++s) {
    const Point x{pos(rng), pos(rng)};
    const double u = offset(), v = offset();
    const Point y{x[0] - u, x[1] - v};
    const double au = std::abs(u), av = std::abs(v);
    const Complex kxy = K(x, y);
    rep.size_ratio = std::max(rep.size_ratio, std::abs(kxy) * au * av / C);

    // Perturbations of size at most half the separation in the moved slot.
    const double t1 = frac(rng) * au, t2 = frac(rng) * av;
    if (t1 == 0.0 || t2 == 0.0) continue;
    const double w1 = K.omega(std::abs(t1) / au), w2 = K.omega(std::abs(t2) / av);
    const double base = 1.0 / (au * av);
    const Complex dx1 = kxy - K({x[0] + t1, x[1]}, y);
    const Complex dx2 = kxy - K({x[0], x[1] + t2}, y);
    const Complex dy1 = kxy - K(x, {y[0] + t1, y[1]});
    const Complex dy2 = kxy - K(x, {y[0], y[1] + t2});
    rep.regularity_ratio = std::max({rep.regularity_ratio, std::abs(dx1) / (base * w1 * C),
                                     std::abs(dx2) / (base * w2 * C), std::abs(dy1) / (base * w1 * C),
                                     std::abs(dy2) / (base * w2 * C)});
    const Complex dd = kxy - K({x[0] + t1, x[1]}, y) - K({x[0], x[1] + t2}, y) + K({x[0] + t1, x[1] + t2}, y);
    rep.full_regularity_ratio = std::max(rep.full_regularity_ratio, std::abs(dd) / (base * w1 * w2 * C));
  }
  rep.passes = rep.size_ratio <= 1.0 + 1e-12 && rep.regularity_ratio <= K.regularity_constant + 1e-12;
  return rep;
}

}  // namespace bpcl
