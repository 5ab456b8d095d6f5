// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "bpcl/awf.hpp"
#include "bpcl/dyadic.hpp"
#include "bpcl/harness.hpp"
#include "bpcl/modelops.hpp"
#include "bpcl/norms.hpp"
#include "bpcl/sio.hpp"
#include "bpcl/sweeps.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bpcl;
using testing::Rng;

namespace {

constexpr std::uint64_t kSeed = 7;
const KernelSpec K = tensor_hilbert();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

const Bands& frozen() {
  static const Bands b = Bands::load(std::string(BPCL_ORACLE_DIR) + "/bands.json");
  return b;
}

void require_group(Outcome& o, const std::string& id) {
  for (const auto& v : check_group(frozen(), id, kSeed)) {
    std::ostringstream w;
    w << v.name << " measured [" << v.measured.min << ", " << v.measured.max << "] band [" << v.lower.value_or(0.0)
      << ", " << v.upper.value_or(-1.0) << "]";
    o.require(v.pass, w.str());
    o.detail << v.name << " max " << v.measured.max << " / " << v.upper.value_or(-1.0) << "; ";
  }
}

// 1. Haar orthonormality and martingale reconstruction at L = 6.
void haar_exactness(Outcome& o) {
  Rng rng(kSeed);
  std::uniform_int_distribution<int> ext(-2, 3);
  double worst_gram = 0.0, worst_rec = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double extent = std::ldexp(1.0, ext(rng));
    const double origin = std::uniform_real_distribution<double>(-4.0, 4.0)(rng);
    const auto d = BoxDomain::square(extent, 6, origin);
    const auto f = testing::random_mesh(rng, d);
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<HaarFunction> hs{{{axis, 0, 0}, HaarKind::noncancellative}};
      for (int k = 0; k < 6; ++k)
        for (std::int64_t m = 0; m < (1 << k); ++m) hs.push_back({{axis, k, m}, HaarKind::cancellative});
      std::vector<std::vector<double>> vals;
      for (const auto& h : hs) vals.push_back(haar_values(d, h));
      for (std::size_t a = 0; a < hs.size(); ++a)
        for (std::size_t b = a; b < hs.size(); ++b) {
          double ip = 0.0;
          for (std::size_t i = 0; i < vals[a].size(); ++i) ip += vals[a][i] * vals[b][i] * d.width(axis);
          worst_gram = std::max(worst_gram, std::abs(ip - (a == b ? 1.0 : 0.0)));
        }
      worst_rec = std::max(worst_rec, max_abs_diff(martingale_reconstruct(f, axis), f));
    }
    worst_rec = std::max(worst_rec, max_abs_diff(martingale_reconstruct(f), f));
  }
  o.require(worst_gram <= 1e-12, "Kronecker defect");
  o.require(worst_rec <= 1e-12, "reconstruction error");
  o.detail << "Kronecker defect " << worst_gram << ", reconstruction error " << worst_rec;
}

MeshFunction constant(const BoxDomain& d, Complex c) {
  return MeshFunction::sample(d, [c](double, double) { return c; });
}

bool zero_off(const MeshFunction& f, const DyadicRectangle& R) {
  const auto in = indicator(f.domain(), R);
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (in.values()[i] == Complex{} && f.values()[i] != Complex{}) return false;
  return true;
}

// 2. Factorization identity, supports and mean of ftilde over 50 random (f, R), A = 8.
void awf_identity(Outcome& o) {
  const auto d = BoxDomain::square(32.0, 8);
  Rng rng(kSeed);
  AwfConfig cfg;
  double worst_res = 0.0, worst_mean = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto R = random_inputs::random_reflectable(rng, d, K, cfg.A, 5, 8);
    const auto f = random_inputs::mean_zero_on(rng, d, R);
    const auto a = awf_decompose(K, f, R, cfg);
    const double rel = max_abs_diff(awf_reconstruct(a), f) / f.sup();
    worst_res = std::max({worst_res, rel, a.diag.residual});
    worst_mean = std::max(worst_mean, std::abs(a.ftilde.integral()) / f.l1());
    o.require(max_abs_diff(a.g1, indicator(d, a.Rt)) == 0.0 && max_abs_diff(a.g2, indicator(d, R)) == 0.0,
              "g1 = 1_Rt and g2 = 1_R");
    o.require(zero_off(a.h1, R) && zero_off(a.h2, a.Rt) && zero_off(a.ftilde, R), "support conditions");
  }
  o.require(worst_res <= 1e-8, "reconstruction residual");
  o.require(worst_mean <= 1e-10, "mean of ftilde");
  o.detail << "residual " << worst_res << ", |int ftilde| / int |f| " << worst_mean;
}

// 3. rho(16) / rho(8) averaged over 20 random f.
void awf_decay(Outcome& o) {
  const auto d = BoxDomain::square(64.0, 8);
  const auto R = make_rectangle(6, 0, 6, 0);
  Rng rng(kSeed);
  AwfConfig c8, c16;
  c16.A = 16.0;
  double sum = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = random_inputs::mean_zero_on(rng, d, R);
    sum += awf_decompose(K, f, R, c16).diag.rho / awf_decompose(K, f, R, c8).diag.rho;
  }
  o.require(sum / 20.0 <= 0.67, "mean ratio");
  o.detail << "mean rho(16)/rho(8) " << sum / 20.0;
}

// 4. Oscillation certificate in its frozen band; constant symbols give zero on both sides.
void osc_certificate(Outcome& o) {
  require_group(o, "awf.osc_certificate");
  const auto d = BoxDomain::square(32.0, 8);
  Rng rng(kSeed);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto R = random_inputs::random_reflectable(rng, d, K, 8.0, 5, 7);
    const Complex c(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
    const auto cert = osc_lower_bound_certificate(constant(d, c), K, R, AwfConfig{});
    worst = std::max({worst, cert.lhs, cert.rhs});
  }
  o.require(worst <= 1e-12, "constant symbol");
  o.detail << "constant symbols: max side " << worst;
}

// 5. Stopping collections: zero means, sparseness and pointwise domination.
void stopping(Outcome& o) {
  Rng rng(kSeed);
  double worst_mean = 0.0, worst_sparse = 0.0;
  for (int t = 0; t < 100; ++t) {
    CubeField f = t % 2 == 0 ? CubeField::from_line(random_inputs::line_function(rng, LineDomain{0.0, 1.0, 10}, t))
                             : CubeField::from_mesh(random_inputs::test_function(rng, BoxDomain::square(1.0, 6), t));
    Complex m = 0.0;
    for (auto z : f.values) m += z;
    m /= static_cast<double>(f.values.size());
    for (auto& z : f.values) z -= m;
    const auto S = sparse_stopping(f);
    for (std::size_t n = 0; n < S.nodes.size(); ++n) {
      const auto& P = S.nodes[n];
      const auto piece = S.piece(n);
      Complex integral = 0.0;
      for (auto z : piece) integral += z;
      const double mean = std::abs(integral) / (static_cast<double>(cube_cells(S.field.grid, P.cube).size()) *
                                                std::max(1.0, P.piece_sup));
      worst_mean = std::max(worst_mean, mean);
      worst_sparse = std::max(worst_sparse, P.measure / 2.0 - P.e_measure);
    }
  }
  o.require(worst_mean <= 1e-10, "zero means");
  o.require(worst_sparse <= 0.0, "|E_P| >= |P|/2");
  o.detail << "mean defect " << worst_mean << ", sparseness slack " << -worst_sparse << "; ";
  require_group(o, "dyadic.sparse_domination");
}

// 6. Model operators bounded within frozen envelopes.
void model_bounded(Outcome& o) {
  for (const char* id : {"modelops.bounded.shift", "modelops.bounded.partial_paraproduct", "modelops.bounded.full_paraproduct"})
    for (const auto& v : check_group(frozen(), id, kSeed)) {
      o.require(v.pass && v.measured.count == 50, v.name);
      if (!v.pass) o.detail << v.name << " max " << v.measured.max << " / " << v.upper.value_or(-1.0) << "; ";
    }
  o.detail << "3 kinds, (p1,p2) in {(2,2),(2,3),(3,2)}, 50 trials per cell";
}

// 7. Commutator with a model operator: frozen Holder constant, zero for constant symbols.
void model_commutator_bound(Outcome& o) {
  require_group(o, "modelops.commutator_holder");
  const auto d = BoxDomain::square(1.0, 6);
  Rng rng(kSeed);
  bool zero = true;
  for (int t = 0; t < 10; ++t) {
    const auto S = ModelOperator::generate(random_inputs::random_small_model(rng), d);
    const auto f = testing::random_mesh(rng, d);
    zero = zero && model_commutator(constant(d, Complex(2.0, -1.0)), S, f).is_zero();
  }
  o.require(zero, "constant symbol");
  o.detail << "constant symbols give zero: " << (zero ? "yes" : "no");
}

// 8. Two-sided reports for every cell and canonical symbol.
void nine_cells(Outcome& o) {
  const auto d = BoxDomain::square(1.0, 7);
  HarnessBudgets bud;
  int reports = 0, open = 0;
  for (const auto& key : case_keys()) {
    const auto pr = representative_profile(key);
    const auto info = classify_case(pr);
    for (const auto& sym : canonical_symbols()) {
      const auto r = two_sided_report(make_symbol(sym, d), K, pr, bud, kSeed, &frozen(), sym.at("kind"));
      ++reports;
      const auto j = r.to_json();
      for (const auto& c : r.checks) {
        std::ostringstream w;
        w << key << " " << sym.at("kind").get<std::string>() << " " << c.name << " = " << c.value;
        o.require(c.pass, w.str());
      }
      o.require(r.pass, key + " " + sym.at("kind").get<std::string>());
      if (info.open_gap) {
        ++open;
        o.require(j.at("open_gap") == true && j.at("one_sided") == true, key + " open label");
        for (const auto& c : r.checks) o.require(c.name != "off_over_upper", key + " checked two-sided");
      } else {
        o.require(j.at("open_gap") == false, key + " labeled open");
      }
    }
  }
  o.require(open == 10, "two open cells");
  o.detail << reports << " reports, " << open / 5 << " open cells";
}

// 9. Representation of the commutator pairing, and the fractional bound.
void representation(Outcome& o) {
  const auto d = BoxDomain::square(4.0, 5);
  Rng rng(kSeed);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto b = random_inputs::one_axis_symbol(rng, d, 0, 0.25 + 0.75 * std::uniform_real_distribution<double>()(rng));
    const int j1 = std::uniform_int_distribution<int>(0, 1)(rng), j2 = std::uniform_int_distribution<int>(2, 3)(rng);
    const auto f = pointwise(testing::random_mesh(rng, d), indicator(d, make_rectangle(1, 0, 2, j1)));
    const auto g = pointwise(testing::random_mesh(rng, d), indicator(d, make_rectangle(1, 1, 2, j2)));
    worst = std::max(worst, testing::rel_err(journe_commutator_form(b, K, f, g), commutator_form(b, K, f, g)));
  }
  o.require(worst <= 1e-6, "representation");
  o.detail << "max relative difference " << worst << "; ";
  require_group(o, "sio.fractional_bound");
}

// 10. Model operators against the naive loop; alternating maximization against sign enumeration.
void oracles(Outcome& o) {
  Rng rng(kSeed);
  const auto dm = BoxDomain::square(1.0, 4);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto S = ModelOperator::generate(random_inputs::random_small_model(rng), dm);
    const auto f = testing::random_mesh(rng, dm);
    const auto slow = testing::naive_apply(S, f);
    worst = std::max(worst, max_abs_diff(apply_model(S, f), slow) / std::max(1.0, slow.sup()));
  }
  o.require(worst <= 1e-12, "apply_model");
  o.detail << "apply_model vs naive " << worst << "; ";

  // symbols increasing in both coordinates: (b(x) - b(y)) K(x, y) keeps one phase on R~ x R
  const auto d = BoxDomain::square(32.0, 6);
  OffSupportConfig cfg;
  double gap = 0.0;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto R = random_inputs::random_reflectable(rng, d, K, cfg.A, 5, 5);
    const auto Rt = reflect_rectangle(d, R, cfg.A, K);
    const double e1 = 0.3 + 1.5 * U(rng), e2 = 0.3 + 1.5 * U(rng), w = U(rng);
    const Complex lam = std::polar(0.5 + U(rng), 2.0 * kPi * U(rng));
    const auto b = MeshFunction::sample(
        d, [&](double x1, double x2) { return lam * (w * std::pow(x1, e1) + (1.0 - w) * std::pow(x2, e2)); });
    const auto cR = cells_of(d, R), cT = cells_of(d, Rt);
    if (cR.size() != 4 || cT.size() != 4) {
      o.require(false, "rectangles are not 2 x 2");
      return;
    }
    double best = 0.0;
    for (int sf = 0; sf < 16; ++sf)
      for (int sg = 0; sg < 16; ++sg) {
        MeshFunction f(d), g(d);
        for (int k = 0; k < 4; ++k) {
          f(cR[k].i1, cR[k].i2) = (sf >> k) & 1 ? 1.0 : -1.0;
          g(cT[k].i1, cT[k].i2) = (sg >> k) & 1 ? 1.0 : -1.0;
        }
        best = std::max(best, std::abs(commutator_form(b, K, f, g)));
      }
    OffSupportConfig one = cfg;
    one.rectangles = {R};
    const double alt = offsupport_norm(b, K, {}, one).value * offsupport_normalization(d, R, {});
    gap = std::max(gap, testing::rel_err(alt, best));
  }
  o.require(gap <= 1e-8, "alternating vs enumeration");
  o.detail << "alternating vs sign enumeration " << gap;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"haar and martingale exactness", haar_exactness},
      {"factorization identity", awf_identity},
      {"factorization residual decay", awf_decay},
      {"oscillation lower bound", osc_certificate},
      {"stopping-time collections", stopping},
      {"model operator boundedness", model_bounded},
      {"model commutator upper bound", model_commutator_bound},
      {"nine-cell report table", nine_cells},
      {"commutator representation", representation},
      {"oracle equivalence", oracles},
  };
  int failed = 0, n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2d  %-32s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), sec, o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
