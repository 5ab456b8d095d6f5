#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <sstream>

#include "bpcl/io.hpp"
#include "bpcl/kernels.hpp"
#include "bpcl/lattice.hpp"
#include "bpcl/reference.hpp"
#include "support.hpp"

using namespace bpcl;
using testing::Rng;

TEST_CASE("box domain validation and cell geometry") {
  const auto d = BoxDomain::square(2.0, 3, -1.0);
  CHECK(d.cells(0) == 8);
  CHECK(d.width(1) == doctest::Approx(0.25));
  CHECK(d.center(0, 0) == doctest::Approx(-0.875));
  BoxDomain bad = d;
  bad.extent[1] = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = d;
  bad.depth[0] = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("dyadic intervals nest and halve") {
  const auto d = BoxDomain::square(1.0, 6);
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const int k = std::uniform_int_distribution<int>(0, 5)(rng);
    const auto m = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << k) - 1)(rng);
    const DyadicInterval I{0, k, m};
    for (int s = 0; s < 2; ++s) {
      const auto c = child(I, s);
      CHECK(length(d, c) == length(d, I) / 2);
      CHECK(parent(c) == I);
      CHECK(contains(I, c));
    }
    const DyadicInterval J{0, std::uniform_int_distribution<int>(0, 5)(rng), 0};
    const auto Jm = DyadicInterval{0, J.level, std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << J.level) - 1)(rng)};
    const bool disjoint = cell_end(d, I) <= cell_begin(d, Jm) || cell_end(d, Jm) <= cell_begin(d, I);
    CHECK((disjoint || contains(I, Jm) || contains(Jm, I)));
  }
  CHECK_THROWS_AS(check_interval(d, DyadicInterval{0, 7, 0}), GeometryError);
  CHECK_THROWS_AS(check_interval(d, DyadicInterval{0, 2, 4}), GeometryError);
}

TEST_CASE("rectangle measure and center") {
  const auto d = BoxDomain::square(1.0, 5);
  const auto R = make_rectangle(1, 1, 2, 0);
  CHECK(measure(d, R) == doctest::Approx(0.125));
  const auto c = center(d, R);
  CHECK(c[0] == doctest::Approx(0.75));
  CHECK(c[1] == doctest::Approx(0.125));
  // indicator integrals are exact under midpoint quadrature
  CHECK(indicator(d, R).integral().real() == 0.125);
}

TEST_CASE("mixed norm examples") {
  const auto d = BoxDomain::square(1.0, 6);
  const auto one = MeshFunction::sample(d, [](double, double) { return 1.0; });
  for (auto [p1, p2] : {std::pair{2.0, 2.0}, std::pair{1.5, 4.0}, std::pair{3.0, 1.0}})
    CHECK(mixed_norm(one, p1, p2) == doctest::Approx(1.0).epsilon(1e-14));
  const auto half = indicator(d, make_rectangle(1, 0, 0, 0));
  CHECK(mixed_norm(half, 2.0, 3.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  // midpoint sum of x^2 over n cells is exactly 1/3 - h^2/12
  for (int L : {4, 6, 8}) {
    const auto dd = BoxDomain::square(1.0, L);
    const double h = dd.width(1);
    const auto x2 = MeshFunction::sample(dd, [](double, double y) { return y; });
    CHECK(mixed_norm(x2, 2.0, 2.0) == doctest::Approx(std::sqrt(1.0 / 3.0 - h * h / 12.0)).epsilon(1e-13));
  }
  CHECK(mixed_norm(MeshFunction::sample(BoxDomain::square(1.0, 8), [](double, double y) { return y; }), 2.0, 2.0) ==
        doctest::Approx(0.57735).epsilon(1e-4));
}

TEST_CASE("mixed norm infinity exponents and explicit outer axis") {
  const auto d = BoxDomain::square(1.0, 4);
  const auto f = MeshFunction::sample(d, [](double x1, double x2) { return x1 < 0.5 ? 2.0 * x2 : 0.0; });
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(mixed_norm(f, inf, inf) == doctest::Approx(2.0 * d.center(1, 15)));
  // outer sup over x1 of the L^1 norm in x2 of 2 x2 is 1 (midpoint exact for linear)
  CHECK(mixed_norm(f, MixedNormSpec{0, inf, 1.0}) == doctest::Approx(1.0));
  // outer L^1 over x2 of sup over x1
  CHECK(mixed_norm(f, MixedNormSpec{1, 1.0, inf}) == doctest::Approx(1.0));
}

TEST_CASE("mixed norm rejects non-finite values") {
  const auto d = BoxDomain::square(1.0, 2);
  MeshFunction f(d);
  f(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mixed_norm(f, 2.0, 2.0), InvalidInput);
}

TEST_CASE("property: Holder duality and homogeneity") {
  Rng rng(5);
  const auto d = BoxDomain::square(1.0, 5);
  for (int t = 0; t < 50; ++t) {
    const auto f = testing::random_mesh(rng, d), g = testing::random_mesh(rng, d);
    std::uniform_real_distribution<double> P(1.1, 6.0);
    const double p1 = P(rng), p2 = P(rng);
    CHECK(std::abs(pairing(f, g)) <= mixed_norm(f, p1, p2) * mixed_norm(g, conjugate(p1), conjugate(p2)) + 1e-12);
    const Complex lam(P(rng), -P(rng));
    CHECK(testing::rel_err(mixed_norm(lam * f, p1, p2), std::abs(lam) * mixed_norm(f, p1, p2)) < 1e-13);
  }
}

TEST_CASE("property: mixed norm refinement converges at second order") {
  auto smooth = [](double x1, double x2) { return std::exp(x1) * std::sin(3.0 * x2) + x1 * x2; };
  double prev = 0.0, prev_step = 0.0;
  for (int L = 3; L <= 8; ++L) {
    const double v = mixed_norm(MeshFunction::sample(BoxDomain::square(1.0, L), smooth), 3.0, 2.0);
    if (L > 3) {
      const double step = std::abs(v - prev);
      CHECK(step <= 0.1 * std::ldexp(1.0, -L));
      if (L > 4) CHECK(step < prev_step / 3.0);
      prev_step = step;
    }
    prev = v;
  }
}

TEST_CASE("oscillation and rectangle mean examples") {
  const auto d = BoxDomain::square(1.0, 6);
  const auto full = DyadicRectangle{};
  CHECK(oscillation(MeshFunction::sample(d, [](double, double) { return 3.0; }), full) == 0.0);
  const auto x2 = MeshFunction::sample(d, [](double, double y) { return y; });
  CHECK(oscillation(x2, full) == doctest::Approx(0.25).epsilon(1e-14));
  const auto sgn = MeshFunction::sample(d, [](double, double y) { return y < 0.5 ? 1.0 : -1.0; });
  CHECK(oscillation(sgn, full) == doctest::Approx(1.0).epsilon(1e-14));
  const auto x1 = MeshFunction::sample(d, [](double x, double) { return x; });
  CHECK(rectangle_mean(x1, full).real() == doctest::Approx(0.5).epsilon(1e-14));
  const auto c = Complex(1.0, -2.0);
  CHECK(rectangle_mean(MeshFunction::sample(d, [&](double, double) { return c; }), make_rectangle(2, 1, 3, 5)) == c);

  // cancellative Haar product on its own rectangle
  const auto R = make_rectangle(2, 1, 1, 1);
  const auto hI = testing::haar_cells(d, 0, 2, 1), hJ = testing::haar_cells(d, 1, 1, 1);
  MeshFunction hh(d);
  for (std::int64_t i = 0; i < d.cells(0); ++i)
    for (std::int64_t j = 0; j < d.cells(1); ++j) hh(i, j) = hI[static_cast<std::size_t>(i)] * hJ[static_cast<std::size_t>(j)];
  CHECK(std::abs(rectangle_mean(hh, R)) < 1e-15);
  CHECK_THROWS_AS(oscillation(x2, make_rectangle(7, 0, 0, 0)), GeometryError);
}

TEST_CASE("property: oscillation is invariant under constants") {
  Rng rng(9);
  const auto d = BoxDomain::square(1.0, 5);
  std::normal_distribution<double> N(0.0, 10.0);
  for (int t = 0; t < 50; ++t) {
    const auto b = testing::random_mesh(rng, d);
    const Complex c(N(rng), N(rng));
    const auto bc = b + MeshFunction::sample(d, [&](double, double) { return c; });
    const auto R = make_rectangle(std::uniform_int_distribution<int>(0, 3)(rng), 0, std::uniform_int_distribution<int>(0, 3)(rng), 0);
    CHECK(std::abs(oscillation(bc, R) - oscillation(b, R)) < 1e-12);
  }
}

TEST_CASE("reflection for the tensor Hilbert kernel") {
  const auto K = tensor_hilbert();
  const auto d = BoxDomain::square(32.0, 8);
  const auto Rt = reflect_rectangle(d, make_rectangle(5, 0, 5, 0), 8.0, K);
  CHECK(left_end(d, Rt.I) == 16.0);
  CHECK(left_end(d, Rt.J) == 16.0);
  CHECK(length(d, Rt.I) == 1.0);
  // side 1/2 at the origin with A = 4: the reflected center sits 4 to the right
  const auto R2 = make_rectangle(6, 0, 6, 0);
  const auto Rt2 = reflect_rectangle(d, R2, 4.0, K);
  CHECK(center(d, Rt2.I) == doctest::Approx(center(d, R2.I) + 4.0));
  CHECK(left_end(d, Rt2.I) - (left_end(d, R2.I) + length(d, R2.I)) == doctest::Approx(7.0 * length(d, R2.I)));
  CHECK_THROWS_AS(reflect_rectangle(d, make_rectangle(1, 0, 1, 0), 8.0, K), GeometryError);
  CHECK_THROWS(reflect_rectangle(d, make_rectangle(5, 0, 5, 0), 2.0, K));
}

TEST_CASE("exponent profile derived quantities") {
  const ExponentProfile p{2, 3, 4, 3};
  CHECK(p.relation(0) == Relation::less);
  CHECK(p.relation(1) == Relation::equal);
  CHECK(p.alpha(0) == doctest::Approx(0.25));
  CHECK(p.alpha(1) == 0.0);
  const ExponentProfile g{4, 2, 2, 2};
  CHECK(g.r(0) == doctest::Approx(4.0));
  CHECK(std::isinf(g.r(1)));
  CHECK(1.0 / 3.0 + 1.0 / conjugate(3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS((ExponentProfile{1.0, 2, 2, 2}.validate()), InvalidInput);
}

TEST_CASE("mesh CSV round trip keeps every bit") {
  Rng rng(3);
  const BoxDomain d{{-1.5, 0.25}, {2.0, 0.5}, {3, 2}};
  const auto f = testing::random_mesh(rng, d);
  std::stringstream ss;
  write_mesh_csv(ss, f);
  const auto g = read_mesh_csv(ss);
  CHECK(g.domain() == d);
  CHECK(max_abs_diff(f, g) == 0.0);

  std::stringstream plain("2,2,0,0,1,1\n1,2\n3,4.5\n");
  const auto h = read_mesh_csv(plain);
  CHECK(h(1, 1) == Complex(4.5, 0.0));
  std::stringstream short_rows("axis1_cells,axis2_cells,origin1,origin2,extent1,extent2\n2,2,0,0,1,1\n1,2\n");
  CHECK_THROWS_AS(read_mesh_csv(short_rows), InvalidInput);
  std::stringstream junk("2,2,0,0,1,1\n1,x\n3,4\n");
  CHECK_THROWS_AS(read_mesh_csv(junk), InvalidInput);
  std::stringstream not_pow2("3,2,0,0,1,1\n1,2\n3,4\n5,6\n");
  CHECK_THROWS_AS(read_mesh_csv(not_pow2), InvalidInput);
}

TEST_CASE("parallel mixed norm matches the serial reference bit for bit") {
  Rng rng(21);
  const auto d = BoxDomain::square(1.0, 7);
  for (int t = 0; t < 5; ++t) {
    const auto f = testing::random_mesh(rng, d);
    for (const auto& spec : {MixedNormSpec{0, 2.0, 3.0}, MixedNormSpec{1, 1.5, 4.0}}) {
      CHECK(mixed_norm(f, spec) == reference::mixed_norm(f, spec));
    }
  }
}
