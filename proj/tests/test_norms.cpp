#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpcl/harness.hpp"
#include "bpcl/norms.hpp"
#include "bpcl/reference.hpp"
#include "bpcl/sio.hpp"
#include "bpcl/sweeps.hpp"
#include "support.hpp"

using namespace bpcl;
using testing::Rng;

namespace {

const KernelSpec K = tensor_hilbert();

template <class F>
void each_rectangle(const BoxDomain& d, F&& fn) {
  for (int k1 = 0; k1 <= d.depth[0]; ++k1)
    for (int k2 = 0; k2 <= d.depth[1]; ++k2)
      for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1)
        for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) fn(make_rectangle(k1, m1, k2, m2));
}

MeshFunction constant(const BoxDomain& d, Complex c) {
  return MeshFunction::sample(d, [c](double, double) { return c; });
}

}  // namespace

TEST_CASE("little bmo") {
  const auto d = BoxDomain::square(1.0, 6);
  CHECK(little_bmo(constant(d, {1.0, 2.0})).value == 0.0);

  const auto b = MeshFunction::sample(d, [](double x1, double x2) { return x1 + x2; });
  const auto r = little_bmo(b);
  CHECK(r.argmax == make_rectangle(0, 0, 0, 0));
  double direct = 0.0;
  for (std::int64_t i = 0; i < 64; ++i)
    for (std::int64_t j = 0; j < 64; ++j) direct += std::abs(d.center(0, i) + d.center(1, j) - 1.0) / 4096.0;
  CHECK(r.value == doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-3);

  const auto h = haar_product(d, {{0, 0, 0}}, {{1, 0, 0}});
  const auto s = little_bmo((1.0 / h.sup()) * h);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.argmax == make_rectangle(0, 0, 0, 0));

  // exhaustive scan
  const auto small = BoxDomain{{0.0, 0.0}, {1.0, 2.0}, {3, 4}};
  Rng rng(1);
  const auto c = testing::random_mesh(rng, small);
  double best = 0.0;
  each_rectangle(small, [&](const DyadicRectangle& R) { best = std::max(best, oscillation(c, R)); });
  CHECK(little_bmo(c).value == best);
  CHECK(little_bmo(c, 1).value <= best);
  const auto big = testing::random_mesh(rng, d);
  const auto p = little_bmo(big), q = reference::little_bmo(big);
  CHECK(p.value == q.value);
  CHECK(p.argmax == q.argmax);
}

TEST_CASE("Holder seminorms") {
  const auto d = BoxDomain::square(1.0, 5);
  CHECK(holder_seminorm(constant(d, 3.0), 0.5, 0) == 0.0);
  const auto x2 = MeshFunction::sample(d, [](double, double y) { return y; });
  CHECK(holder_seminorm(x2, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  const double h = d.width(1);
  CHECK(holder_seminorm(x2, 0.5, 1) == doctest::Approx(std::sqrt(1.0 - h)).epsilon(1e-12));
  CHECK(holder_seminorm(x2, 0.5, 0) == 0.0);
  CHECK_THROWS_AS(holder_seminorm(x2, 0.0, 1), InvalidInput);
  CHECK_THROWS_AS(holder_seminorm(x2, 0.5, 2), InvalidInput);
  // brute-force pair scan on a rough slice function
  Rng rng(2);
  const auto b = random_inputs::one_axis_symbol(rng, d, 1, 0.3);
  double best = 0.0;
  for (std::int64_t i = 0; i < 32; ++i)
    for (std::int64_t j = i + 1; j < 32; ++j)
      best = std::max(best, std::abs(b(0, i) - b(0, j)) / std::pow(d.center(1, j) - d.center(1, i), 0.3));
  CHECK(holder_seminorm(b, 0.3, 1) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("infimum over constants") {
  const auto d = BoxDomain::square(1.0, 5);
  const Complex c0(1.5, -0.5);
  const auto r0 = inf_const_mixed_norm(constant(d, c0), MixedNormSpec{0, 2, 2});
  CHECK(r0.value < 1e-7);
  CHECK(std::abs(r0.argmin - c0) < 1e-7);

  const auto step = MeshFunction::sample(d, [](double, double y) { return y < 0.5 ? 1.0 : 0.0; });
  const auto r1 = inf_const_mixed_norm(step, MixedNormSpec{0, 2, 2});
  CHECK(std::abs(r1.argmin - 0.5) < 1e-6);
  CHECK(r1.value == doctest::Approx(0.5).epsilon(1e-8));

  const auto sign = MeshFunction::sample(d, [](double, double y) { return y < 0.5 ? 1.0 : -1.0; });
  const auto r2 = inf_const_mixed_norm(sign, MixedNormSpec{0, kInf, 2});
  CHECK(std::abs(r2.argmin) < 1e-6);
  CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-8));
  // a grid of constants never beats the minimizer
  for (double a = -1.0; a <= 1.0; a += 0.25)
    for (double bb = -1.0; bb <= 1.0; bb += 0.25)
      CHECK(mixed_norm(sign - constant(d, {a, bb}), MixedNormSpec{0, kInf, 2}) >= r2.value - 1e-8);

  Rng rng(3);
  const auto b = testing::random_mesh(rng, d);
  for (const auto& spec : {MixedNormSpec{0, 3, 1.5}, MixedNormSpec{1, kInf, 4}, MixedNormSpec{0, 2, kInf}}) {
    const auto r = inf_const_mixed_norm(b, spec);
    CHECK(r.value == doctest::Approx(mixed_norm(b - constant(d, r.argmin), spec)).epsilon(1e-12));
    for (Complex e : {Complex(1e-3, 0), Complex(0, 1e-3), Complex(-1e-3, 0), Complex(0, -1e-3)})
      CHECK(mixed_norm(b - constant(d, r.argmin + e), spec) >= r.value - 1e-8);
    // adding a constant moves the argmin and keeps the value
    CHECK(inf_const_mixed_norm(b + constant(d, {4.0, -2.0}), spec).value == doctest::Approx(r.value).epsilon(1e-7));
  }
}

TEST_CASE("A_p characteristic and Bloom bmo") {
  const auto d = BoxDomain::square(1.0, 4);
  CHECK(ap_characteristic(constant(d, 1.0), 2.0).value == doctest::Approx(1.0));
  CHECK(ap_characteristic(constant(d, 2.0), 3.0).value == doctest::Approx(1.0));
  const auto mu = MeshFunction::sample(d, [](double x1, double) { return x1 < 0.5 ? 1.0 : 4.0; });
  const auto r = ap_characteristic(mu, 2.0);
  CHECK(r.value == doctest::Approx(1.5625).epsilon(1e-14));
  CHECK(length(d, r.argmax.I) == 1.0);
  CHECK_THROWS_AS(ap_characteristic(constant(d, 0.0), 2.0), InvalidInput);
  CHECK_THROWS_AS(ap_characteristic(mu, 1.0), InvalidInput);

  Rng rng(4);
  const auto b = testing::random_mesh(rng, d);
  CHECK(bloom_bmo(constant(d, 2.0), mu).value == 0.0);
  CHECK(bloom_bmo(b, constant(d, 1.0)).value == doctest::Approx(little_bmo(b).value).epsilon(1e-14));
  const auto nu = testing::real_positive_mesh(rng, d);
  const double B = bloom_bmo(b, nu).value;
  each_rectangle(d, [&](const DyadicRectangle& R) {
    CHECK(oscillation(b, R) * measure(d, R) <= B * weight_measure(nu, R) * (1 + 1e-12));
  });
  WeightPair w{mu, constant(d, 4.0), 2.0};
  CHECK(max_abs_diff(w.nu(), MeshFunction::sample(d, [](double x1, double) { return x1 < 0.5 ? 0.5 : 1.0; })) < 1e-15);
  WeightPair bad{mu, constant(d, -1.0), 2.0};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("off-support norm: constant symbols and the x1 pair") {
  const auto d = BoxDomain::square(32.0, 6);
  const auto R = make_rectangle(5, 0, 5, 0), Rt = make_rectangle(5, 16, 5, 16);
  OffSupportConfig cfg;
  cfg.rectangles = {R};
  CHECK(offsupport_norm(constant(d, 2.0), K, {}, cfg).value == 0.0);

  // 2 x 2 cells on R and on Rt; (x1 - y1) K has a fixed sign on the pair
  const auto b = MeshFunction::sample(d, [](double x1, double) { return x1; });
  const auto pm = offsupport_pair(b, K, R, Rt, cfg);
  const auto cR = cells_of(d, R), cT = cells_of(d, Rt);
  REQUIRE(cR.size() == 4);
  double best = 0.0, total = 0.0;
  for (int sf = 0; sf < 16; ++sf)
    for (int sg = 0; sg < 16; ++sg) {
      MeshFunction f(d), g(d);
      for (int k = 0; k < 4; ++k) {
        f(cR[k].i1, cR[k].i2) = (sf >> k) & 1 ? 1.0 : -1.0;
        g(cT[k].i1, cT[k].i2) = (sg >> k) & 1 ? 1.0 : -1.0;
      }
      best = std::max(best, std::abs(commutator_form(b, K, f, g)));
    }
  for (const auto& x : cT)
    for (const auto& y : cR) {
      const double v = (d.center(0, x.i1) - d.center(0, y.i1)) *
                       eval_kernel(K, {d.center(0, x.i1), d.center(1, x.i2)}, {d.center(0, y.i1), d.center(1, y.i2)}).real();
      total += std::abs(v) * d.cell_area() * d.cell_area();
    }
  CHECK(best == doctest::Approx(total).epsilon(1e-12));
  CHECK(pm.value == doctest::Approx(best).epsilon(1e-12));
  const auto o = offsupport_norm(b, K, {}, cfg);
  CHECK(o.value == doctest::Approx(best / offsupport_normalization(d, R, {})).epsilon(1e-12));
  CHECK(o.argmax == R);
  CHECK(o.argmax_reflected == Rt);
}

TEST_CASE("off-support norm: monotone iterations and constant invariance") {
  const auto d = BoxDomain::square(1.0, 6);
  Rng rng(5);
  OffSupportConfig cfg;
  cfg.max_rectangles = 24;
  for (int t = 0; t < 6; ++t) {
    const auto b = random_inputs::symbol(rng, d);
    const auto rects = offsupport_rectangles(d, K, cfg);
    REQUIRE(!rects.empty());
    const auto& R = rects[static_cast<std::size_t>(t) % rects.size()];
    const auto pm = offsupport_pair(b, K, R, reflect_rectangle(d, R, cfg.A, K), cfg);
    for (std::size_t i = 1; i < pm.history.size(); ++i) CHECK(pm.history[i] >= pm.history[i - 1] * (1 - 1e-12));
    CHECK(pm.f.sup() <= 1.0 + 1e-12);
    CHECK(pm.g.sup() <= 1.0 + 1e-12);
    const ExponentProfile pr{2, 3, 4, 3};
    const double O = offsupport_norm(b, K, pr, cfg).value, Oc = offsupport_norm(b + constant(d, {3.0, 1.0}), K, pr, cfg).value;
    CHECK(testing::rel_err(Oc, O) < 1e-10);
    // O^Sigma dominates the single-rectangle value it contains
    const auto fams = sigma_families(d, K, R.I, R.J, 1, 3, cfg.A, 17);
    const auto sig = offsupport_norm_sigma(b, K, pr, fams, cfg);
    OffSupportConfig one = cfg;
    one.rectangles = {R};
    one.max_rectangles = 0;
    const double single = offsupport_norm(b, K, pr, one).value;
    CHECK(sig.per_family[0] == doctest::Approx(single).epsilon(1e-10));
    CHECK(sig.value >= single * (1 - 1e-10));
  }
  CHECK_THROWS_AS(offsupport_norm_sigma(constant(d, 1.0), K, {}, {}, cfg), InvalidInput);
  CHECK(offsupport_norm_sigma(constant(d, 1.0), K, {}, sigma_families(d, K, {0, 5, 0}, {1, 5, 0}, 1, 2, 8.0, 1), cfg)
            .value == 0.0);
}

TEST_CASE("scaling laws for one-variable symbols") {
  const auto d = BoxDomain::square(1.0, 5);
  Rng rng(6);
  const auto b2 = random_inputs::one_axis_symbol(rng, d, 1, 0.5);
  const auto b1 = random_inputs::one_axis_symbol(rng, d, 0, 0.5);
  each_rectangle(d, [&](const DyadicRectangle& R) {
    const DyadicRectangle top_I{{0, 0, 0}, R.J}, top_J{R.I, {1, 0, 0}};
    CHECK(oscillation(b2, R) == doctest::Approx(oscillation(b2, top_I)).epsilon(1e-13));
    CHECK(oscillation(b1, R) == doctest::Approx(oscillation(b1, top_J)).epsilon(1e-13));
  });
}

TEST_CASE("sparse oscillation functionals") {
  const LineDomain line{0.0, 1.0, 7};
  const auto flat = CubeField::from_line(LineFunction::sample(line, [](double) { return 2.0; }));
  CHECK(sparse_osc_sup(flat, 2.0).value == 0.0);
  Rng rng(7);
  const auto u = random_inputs::line_function(rng, line, 0);
  const auto cf = CubeField::from_line(u);
  const Cube Q{2, 1, 0};
  CHECK(sparse_osc_value(cf, {Q}, 3.0) == doctest::Approx(std::pow(0.25, 1.0 / 3.0) * cube_oscillation(cf, Q)));
  LineFunction shifted = u;
  for (auto& z : shifted.values) z += Complex(5.0, -1.0);
  CHECK(testing::rel_err(sparse_osc_sup(CubeField::from_line(shifted), 2.0).value, sparse_osc_sup(cf, 2.0).value) < 1e-10);
  CHECK_THROWS_AS(sparse_osc_sup(cf, 1.0), InvalidInput);

  // double sparse functional with singleton collections
  const auto d = BoxDomain{{0.0, 0.0}, {1.0, 1.0}, {5, 6}};
  const auto S1 = sparse_stopping(CubeField::from_line(LineFunction(axis_line(d, 0))));
  const auto S2 = sparse_stopping(CubeField::from_line(LineFunction(axis_line(d, 1))));
  const auto b = testing::random_mesh(rng, d);
  const double r1 = 3.0, r2 = 1.5;
  const std::vector<double> l1{1.0}, l2{1.0};
  CHECK(double_sparse_osc_functional(b, S1, S2, l1, l2, r1, r2) ==
        doctest::Approx(oscillation(b, make_rectangle(0, 0, 0, 0))).epsilon(1e-14));
  CHECK(double_sparse_osc_functional(constant(d, 1.0), S1, S2, l1, l2, r1, r2) == 0.0);
  CHECK_THROWS_AS(double_sparse_osc_functional(b, S1, S2, {1.5}, l2, r1, r2), InvalidInput);
  CHECK_THROWS_AS(double_sparse_osc_functional(b, S2, S1, l1, l2, r1, r2), InvalidInput);
  const auto lam = normalized_lambda(S1, {3.0}, r1);
  CHECK(lam[0] == doctest::Approx(1.0));
}

TEST_CASE("frozen norm bands hold at a fresh seed") {
  const auto bands = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  for (const char* id : {"norms.offsupport", "norms.bloom", "norms.double_sparse", "norms.sparse_osc"})
    for (const auto& v : check_group(bands, id, 7)) {
      INFO(v.name << " [" << v.measured.min << ", " << v.measured.max << "] vs [" << v.lower.value_or(0) << ", "
                  << v.upper.value_or(-1) << "]");
      CHECK(v.pass);
    }
}
