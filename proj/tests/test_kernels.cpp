#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpcl/awf.hpp"
#include "bpcl/harness.hpp"
#include "bpcl/kernels.hpp"
#include "bpcl/sweeps.hpp"
#include "support.hpp"

using namespace bpcl;
using testing::Rng;

TEST_CASE("tensor Hilbert values and signs") {
  const auto K = tensor_hilbert();
  CHECK(eval_kernel(K, {0, 0}, {1, 1}).real() == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-15));
  CHECK(eval_kernel(K, {0, 0}, {1, 1}).real() == doctest::Approx(0.101321).epsilon(1e-5));
  CHECK(eval_kernel(K, {0, 0}, {1, -1}).real() == doctest::Approx(-1.0 / (kPi * kPi)));
  Rng rng(1);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
    // antisymmetric in each slot separately
    CHECK(eval_kernel(K, {y[0], x[1]}, {x[0], y[1]}) == -eval_kernel(K, x, y));
    CHECK(eval_kernel(K, {x[0], y[1]}, {y[0], x[1]}) == -eval_kernel(K, x, y));
  }
  CHECK_THROWS_AS(eval_kernel(K, {0, 0}, {0, 1}), SingularityError);
  CHECK_THROWS_AS(eval_kernel(K, {0, 2}, {1, 2}), SingularityError);
}

TEST_CASE("non-degeneracy witness") {
  const auto K = tensor_hilbert();
  const auto y = nondegenerate_witness(K, {0, 0}, 1, 1);
  CHECK(y == Point{2, 2});
  CHECK(std::abs(eval_kernel(K, {0, 0}, y)) == doctest::Approx(1.0 / (4.0 * kPi * kPi)));
  CHECK(std::abs(eval_kernel(K, {0, 0}, y)) >= K.nondegeneracy_constant * (1 - 1e-15));
  CHECK(nondegenerate_witness(K, {3, -3}, 0.5, 2) == Point{4, 1});

  Rng rng(2);
  std::uniform_real_distribution<double> U(-10.0, 10.0), R(0.01, 5.0);
  for (int t = 0; t < 100; ++t) {
    const Point x{U(rng), U(rng)};
    const double r1 = R(rng), r2 = R(rng);
    const auto w = nondegenerate_witness(K, x, r1, r2);
    CHECK(std::abs(w[0] - x[0]) > r1);
    CHECK(std::abs(w[1] - x[1]) <= 2.0 * r2 + 1e-12);  // rounding of x + 2r - x
    CHECK(std::abs(eval_kernel(K, x, w)) * r1 * r2 == doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-12));
  }
  CHECK_THROWS(nondegenerate_witness(K, {0, 0}, 0.0, 1.0));
}

TEST_CASE("kernel estimate verification") {
  const auto K = tensor_hilbert();
  const auto rep = verify_kernel_estimates(K, 10000, 17);
  CHECK(rep.size_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.size_ratio <= 1.0 + 1e-12);
  // |1/u - 1/(u - t)| / (|t| / u^2) = |u / (u - t)| <= 2 for |t| <= |u| / 2, with the sup approached at |t| = |u| / 2
  CHECK(rep.regularity_ratio <= 2.0 + 1e-12);
  CHECK(rep.regularity_ratio > 1.9);
  CHECK(rep.full_regularity_ratio <= 4.0 + 1e-12);
  CHECK(rep.passes);

  const auto Z = verify_kernel_estimates(zero_kernel(), 1000, 3);
  CHECK(Z.size_ratio == 0.0);
  CHECK(Z.regularity_ratio == 0.0);
  CHECK(Z.full_regularity_ratio == 0.0);
  CHECK_THROWS_AS(verify_kernel_estimates(K, 0, 1), InvalidInput);
}

TEST_CASE("kernel centre size at reflected pairs stays in the frozen band") {
  const auto bands = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  const auto K = tensor_hilbert();
  // for the exemplar the centre value is exactly a/4 for every reflected pair
  const auto d = BoxDomain::square(32.0, 8);
  for (const auto& R : {make_rectangle(5, 0, 5, 0), make_rectangle(6, 3, 7, 2), make_rectangle(8, 10, 5, 1)}) {
    const double v = bootstrap_check(K, d, R, 8.0).center_value;
    CHECK(v == doctest::Approx(0.25 / (kPi * kPi)).epsilon(1e-12));
    CHECK(v <= *bands.upper("kernel.center_size"));
    CHECK(v >= *bands.lower("kernel.center_size"));
  }
  for (const auto& v : check_group(bands, "kernel.center_size", 7)) {
    INFO(v.name);
    CHECK(v.pass);
  }
}
