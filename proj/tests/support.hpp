#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "bpcl/lattice.hpp"

#ifndef BPCL_ORACLE_DIR
#define BPCL_ORACLE_DIR "oracles"
#endif

namespace testing {

using Rng = std::mt19937_64;

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
inline double rel_err(bpcl::Complex a, bpcl::Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline bpcl::MeshFunction random_mesh(Rng& rng, const bpcl::BoxDomain& d) {
  std::normal_distribution<double> N(0.0, 1.0);
  bpcl::MeshFunction f(d);
  for (auto& z : f.values()) z = bpcl::Complex(N(rng), N(rng));
  return f;
}

inline bpcl::MeshFunction real_positive_mesh(Rng& rng, const bpcl::BoxDomain& d) {
  std::uniform_real_distribution<double> U(0.2, 3.0);
  bpcl::MeshFunction f(d);
  for (auto& z : f.values()) z = U(rng);
  return f;
}

// Gauss-Legendre nodes and weights on [a, b] by Newton iteration on P_n.
inline std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
  std::vector<std::pair<double, double>> out;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w);
  }
  return out;
}

// Haar function h_I = (1_left - 1_right) / |I|^{1/2} on the cells of one axis, built cell by cell.
inline std::vector<double> haar_cells(const bpcl::BoxDomain& d, int axis, int level, std::int64_t index) {
  const auto n = d.cells(axis);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  const std::int64_t len = n >> level;
  const double norm = 1.0 / std::sqrt(d.extent[axis] * std::ldexp(1.0, -level));
  for (std::int64_t i = index * len; i < (index + 1) * len; ++i)
    v[static_cast<std::size_t>(i)] = (i < index * len + len / 2 ? 1.0 : -1.0) * norm;
  return v;
}

}  // namespace testing
