#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpcl/awf.hpp"
#include "bpcl/harness.hpp"
#include "bpcl/sio.hpp"
#include "bpcl/sweeps.hpp"
#include "support.hpp"

using namespace bpcl;
using testing::Rng;

namespace {

const KernelSpec K = tensor_hilbert();

bool zero_off(const MeshFunction& f, const BoxDomain& d, const DyadicRectangle& R) {
  const auto in = indicator(d, R);
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (in.values()[i] == Complex{} && f.values()[i] != Complex{}) return false;
  return true;
}

MeshFunction haar_sign(const BoxDomain& d, const DyadicRectangle& R) {
  const auto h1 = testing::haar_cells(d, 0, R.I.level, R.I.index);
  const auto h2 = testing::haar_cells(d, 1, R.J.level, R.J.index);
  MeshFunction f(d);
  for (std::int64_t i1 = 0; i1 < d.cells(0); ++i1)
    for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2)
      f(i1, i2) = (h1[static_cast<std::size_t>(i1)] > 0 ? 1.0 : h1[static_cast<std::size_t>(i1)] < 0 ? -1.0 : 0.0) *
                  (h2[static_cast<std::size_t>(i2)] > 0 ? 1.0 : h2[static_cast<std::size_t>(i2)] < 0 ? -1.0 : 0.0);
  return f;
}

void check_structure(const AwfOutput& o, const MeshFunction& f) {
  const auto& d = f.domain();
  CHECK(max_abs_diff(o.g1, indicator(d, o.Rt)) == 0.0);
  CHECK(max_abs_diff(o.g2, indicator(d, o.R)) == 0.0);
  CHECK(zero_off(o.h1, d, o.R));
  CHECK(zero_off(o.h2, d, o.Rt));
  CHECK(zero_off(o.ftilde, d, o.R));
  CHECK(o.diag.residual <= 1e-8);
  CHECK(max_abs_diff(awf_reconstruct(o), f) <= 1e-8 * f.sup());
  CHECK(std::abs(o.ftilde.integral()) <= 1e-10 * f.l1());
}

}  // namespace

TEST_CASE("zero input gives the zero factorization") {
  const auto d = BoxDomain::square(32.0, 7);
  const auto o = awf_decompose(K, MeshFunction(d), make_rectangle(5, 0, 5, 0), AwfConfig{});
  CHECK(o.diag.residual == 0.0);
  for (const auto* m : {&o.h1, &o.h2, &o.ftilde}) CHECK(m->is_zero());
}

TEST_CASE("Haar sign pattern on the unit square") {
  const auto d = BoxDomain::square(32.0, 8);
  const auto R = make_rectangle(5, 0, 5, 0);
  const auto f = haar_sign(d, R);
  REQUIRE(std::abs(f.integral()) == 0.0);
  const auto o = awf_decompose(K, f, R, AwfConfig{});
  CHECK(o.Rt == make_rectangle(5, 16, 5, 16));
  check_structure(o, f);
  CHECK(o.diag.rho < 1.0);
  CHECK(o.diag.absorption < 0.5);
}

TEST_CASE("identity, supports and zero mean over random inputs") {
  const auto d = BoxDomain::square(32.0, 8);
  Rng rng(11);
  AwfConfig cfg;
  for (int t = 0; t < 20; ++t) {
    auto& r = rng;
    DyadicRectangle R;
    for (;;) {
      const int k1 = std::uniform_int_distribution<int>(5, 7)(rng), k2 = std::uniform_int_distribution<int>(5, 7)(rng);
      R = make_rectangle(k1, std::uniform_int_distribution<std::int64_t>(0, (1 << k1) / 3)(rng), k2,
                         std::uniform_int_distribution<std::int64_t>(0, (1 << k2) / 3)(rng));
      try {
        reflect_rectangle(d, R, cfg.A, K);
        break;
      } catch (const GeometryError&) {
      }
    }
    const auto f = random_inputs::mean_zero_on(r, d, R);
    const auto o = awf_decompose(K, f, R, cfg);
    INFO("trial " << t);
    check_structure(o, f);
    CHECK(o.diag.absorption < 0.5);
  }
}

TEST_CASE("residual decays with A") {
  const auto d = BoxDomain::square(64.0, 9);
  const auto R = make_rectangle(6, 0, 6, 0);
  double ratio_sum = 0.0;
  for (int t = 0; t < 5; ++t) {
    Rng r(100 + t);
    const auto f = random_inputs::mean_zero_on(r, d, R);
    AwfConfig c8, c16;
    c16.A = 16.0;
    ratio_sum += awf_decompose(K, f, R, c16).diag.rho / awf_decompose(K, f, R, c8).diag.rho;
  }
  CHECK(ratio_sum / 5.0 <= 0.67);
}

TEST_CASE("bootstrap estimates") {
  const auto d = BoxDomain::square(64.0, 8);
  const auto R = make_rectangle(6, 0, 6, 0);
  const auto b8 = bootstrap_check(K, d, R, 8.0), b16 = bootstrap_check(K, d, R, 16.0);
  const double shrink = b8.center_diff / b16.center_diff;
  CHECK(shrink >= 1.5);
  CHECK(shrink <= 3.0);
  CHECK(b8.center_value == doctest::Approx(0.25 / (kPi * kPi)));
  const auto bands = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  for (double v : {b8.int_over_R_min, b8.int_over_R_max, b8.int_over_Rt_min, b8.int_over_Rt_max}) {
    CHECK(v <= *bands.upper("awf.bootstrap_integrals"));
    CHECK(v >= *bands.lower("awf.bootstrap_integrals"));
  }
  CHECK_THROWS_AS(bootstrap_check(K, d, make_rectangle(6, 100, 6, 0), 8.0), GeometryError);
}

TEST_CASE("preconditions and division failure") {
  const auto d = BoxDomain::square(32.0, 7);
  const auto R = make_rectangle(5, 0, 5, 0);
  const auto f = haar_sign(d, R);
  AwfConfig small;
  small.A = 2.5;
  CHECK_THROWS_AS(awf_decompose(K, f, R, small), InvalidInput);
  CHECK_THROWS_AS(awf_decompose(K, f + indicator(d, R), R, AwfConfig{}), PreconditionError);
  CHECK_THROWS_AS(awf_decompose(K, haar_sign(d, make_rectangle(5, 1, 5, 0)), R, AwfConfig{}), PreconditionError);
  CHECK_THROWS_AS(awf_decompose(zero_kernel(), f, R, AwfConfig{}), NumericalError);
  CHECK(min_reflectable_level(8.0) == 5);
  CHECK(min_reflectable_level(16.0) == 6);
}

TEST_CASE("oscillation certificate") {
  const auto d = BoxDomain::square(32.0, 8);
  const auto R = make_rectangle(5, 0, 5, 0);
  AwfConfig cfg;
  const auto c0 = osc_lower_bound_certificate(MeshFunction::sample(d, [](double, double) { return 3.0; }), K, R, cfg);
  CHECK(c0.lhs == 0.0);
  CHECK(c0.rhs == 0.0);

  const auto b = make_symbol({{"kind", "coord:x1+x2"}}, d);
  const auto c = osc_lower_bound_certificate(b, K, R, cfg);
  const auto bands = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  CHECK(c.ratio > 0.0);
  CHECK(c.ratio <= *bands.upper("awf.osc_certificate"));
  CHECK(c.residual <= 1e-8);

  const Complex lam(-2.0, 0.75);
  const auto cl = osc_lower_bound_certificate(lam * b, K, R, cfg);
  CHECK(testing::rel_err(cl.lhs, std::abs(lam) * c.lhs) < 1e-10);
  CHECK(testing::rel_err(cl.rhs, std::abs(lam) * c.rhs) < 1e-10);
  CHECK(testing::rel_err(cl.ratio, c.ratio) < 1e-10);

  // the extremal function is mean zero on R with sup norm one
  double scale = 0.0;
  const auto f = oscillation_extremal(b, R, &scale);
  CHECK(scale > 0.0);
  CHECK(f.sup() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.integral()) <= 1e-12);
  CHECK(zero_off(f, d, R));
}

TEST_CASE("frozen awf bands hold at a fresh seed") {
  const auto bands = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  for (const char* id : {"awf.tg_band", "awf.bootstrap_integrals", "awf.local2", "awf.osc_certificate"})
    for (const auto& v : check_group(bands, id, 7)) {
      INFO(v.name << " [" << v.measured.min << ", " << v.measured.max << "] vs [" << v.lower.value_or(0) << ", "
                  << v.upper.value_or(-1) << "]");
      CHECK(v.pass);
    }
}
