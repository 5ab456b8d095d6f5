#include "bpcl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bpcl/dyadic.hpp"
#include "bpcl/io.hpp"

namespace bpcl {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix(splitmix(seed ^ splitmix(a)) ^ splitmix(b + 0x632be59bd9b4e019ULL));
}

const char* rel_key(Relation r) {
  switch (r) {
    case Relation::less:
      return "lt";
    case Relation::equal:
      return "eq";
    case Relation::greater:
      return "gt";
  }
  return "eq";
}

const char* rel_sym(Relation r) {
  switch (r) {
    case Relation::less:
      return "<";
    case Relation::equal:
      return "=";
    case Relation::greater:
      return ">";
  }
  return "=";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

FunctionalSpec inf_const_spec(int outer_axis, double p_outer, double p_inner) {
  FunctionalSpec f;
  f.kind = FunctionalKind::inf_const;
  f.mixed = {outer_axis, p_outer, p_inner};
  auto e = [](double p) { return p == kInf ? std::string("inf") : fmt(p); };
  const std::string xo = outer_axis == 0 ? "x1" : "x2", xi = outer_axis == 0 ? "x2" : "x1";
  f.name = "inf_c ||b-c||_{L^" + e(p_outer) + "_" + xo + " L^" + e(p_inner) + "_" + xi + "}";
  return f;
}

FunctionalSpec holder_spec(int axis, double alpha) {
  FunctionalSpec f;
  f.kind = FunctionalKind::holder;
  f.axis = axis;
  f.alpha = alpha;
  f.name = std::string("holder_") + (axis == 0 ? "x1" : "x2") + "(alpha=" + fmt(alpha) + ")";
  return f;
}

double slice_oscillation(const MeshFunction& b, int axis, std::int64_t slice) {
  const auto n = axis == 0 ? b.n2() : b.n1();
  std::vector<Complex> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = axis == 0 ? b(slice, i) : b(i, slice);
  const Complex m = pairwise_sum(v) / static_cast<double>(n);
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i] - m);
  return pairwise_sum(a) / static_cast<double>(n);
}

bool is_constant(const MeshFunction& b) {
  const auto& v = b.values();
  return std::all_of(v.begin(), v.end(), [&](Complex z) { return z == v.front(); });
}

double zero_tolerance(const MeshFunction& b) { return 1e-12 * (1.0 + b.sup()); }

}  // namespace

std::string mode_name(ConstancyMode m) {
  switch (m) {
    case ConstancyMode::none:
      return "none";
    case ConstancyMode::global:
      return "global";
    case ConstancyMode::x1_slices:
      return "x1_slices";
    case ConstancyMode::x2_slices:
      return "x2_slices";
  }
  return "none";
}

CaseInfo classify_case(const ExponentProfile& profile) {
  profile.validate();
  CaseInfo c;
  c.relation = {profile.relation(0), profile.relation(1)};
  const Relation r1 = c.relation[0], r2 = c.relation[1];
  c.key = std::string(rel_key(r1)) + "_" + rel_key(r2);
  c.label = std::string("p1") + rel_sym(r1) + "q1,p2" + rel_sym(r2) + "q2";
  using R = Relation;
  FunctionalSpec zero;
  zero.name = "zero";
  if ((r1 == R::less && r2 == R::less) || (r1 == R::greater && r2 == R::less) ||
      (r1 == R::less && r2 == R::greater)) {
    c.constancy = ConstancyMode::global;
    c.statement = "b = constant, N = 0";
    c.lower = c.upper = zero;
    c.equivalence = true;
  } else if (r1 == R::equal && r2 == R::less) {
    c.constancy = ConstancyMode::x2_slices;
    c.statement = "b(., x2) = constant, N ~ Holder of b(x1, .) in x2";
    c.lower = c.upper = holder_spec(1, profile.alpha(1));
    c.equivalence = true;
  } else if (r1 == R::less && r2 == R::equal) {
    c.constancy = ConstancyMode::x1_slices;
    c.statement = "b(x1, .) = constant, N ~ Holder of b(., x2) in x1";
    c.lower = c.upper = holder_spec(0, profile.alpha(0));
    c.equivalence = true;
  } else if (r1 == R::equal && r2 == R::equal) {
    c.statement = "N ~ little bmo";
    c.lower.kind = FunctionalKind::little_bmo;
    c.lower.name = "little_bmo";
    c.upper = c.lower;
    c.equivalence = true;
  } else if (r1 == R::equal && r2 == R::greater) {
    c.statement = "N ~ inf_c ||b-c||_{L^inf_x1 L^r2_x2}";
    c.lower = c.upper = inf_const_spec(0, kInf, profile.r(1));
    c.equivalence = true;
    c.sigma = true;
  } else if (r1 == R::greater && r2 == R::equal) {
    c.statement = "inf_c ||b-c||_{L^inf_x2 L^r1_x1} <~ N <~ inf_c ||b-c||_{L^r1_x1 L^inf_x2}";
    c.lower = inf_const_spec(1, kInf, profile.r(0));
    c.upper = inf_const_spec(0, profile.r(0), kInf);
    c.open_gap = true;
    c.sigma = true;
  } else {
    c.statement = "double sparse oscillation <~ N <~ inf_c ||b-c||_{L^r1_x1 L^r2_x2}";
    c.lower.kind = FunctionalKind::double_sparse;
    c.lower.r = {profile.r(0), profile.r(1)};
    c.lower.name = "double_sparse_osc(r1=" + fmt(profile.r(0)) + ",r2=" + fmt(profile.r(1)) + ")";
    c.upper = inf_const_spec(0, profile.r(0), profile.r(1));
    c.open_gap = true;
    c.sigma = true;
  }
  return c;
}

std::vector<std::string> case_keys() {
  std::vector<std::string> out;
  for (const char* r2 : {"lt", "eq", "gt"})
    for (const char* r1 : {"lt", "eq", "gt"}) out.push_back(std::string(r1) + "_" + r2);
  return out;
}

ExponentProfile representative_profile(const std::string& key) {
  auto pick = [&](const std::string& r, double& p, double& q) {
    if (r == "lt") {
      p = 2.0;
      q = 4.0;
    } else if (r == "eq") {
      p = q = 2.0;
    } else if (r == "gt") {
      p = 4.0;
      q = 2.0;
    } else {
      throw InvalidInput("unknown case key: " + key);
    }
  };
  if (key.size() != 5 || key[2] != '_') throw InvalidInput("unknown case key: " + key);
  ExponentProfile pr;
  pick(key.substr(0, 2), pr.p1, pr.q1);
  pick(key.substr(3, 2), pr.p2, pr.q2);
  return pr;
}

double constancy_defect(const MeshFunction& b, ConstancyMode mode) {
  switch (mode) {
    case ConstancyMode::none:
      return 0.0;
    case ConstancyMode::global:
      return oscillation(b, DyadicRectangle{});
    case ConstancyMode::x1_slices:
    case ConstancyMode::x2_slices: {
      const int axis = mode == ConstancyMode::x1_slices ? 0 : 1;
      const auto n = axis == 0 ? b.n1() : b.n2();
      double m = 0.0;
      for (std::int64_t s = 0; s < n; ++s) m = std::max(m, slice_oscillation(b, axis, s));
      return m;
    }
  }
  return 0.0;
}

double double_sparse_sup(const MeshFunction& b, double r1, double r2, int candidates, std::uint64_t seed) {
  const auto& d = b.domain();
  std::array<std::vector<SparseCollection>, 2> coll;
  for (int axis = 0; axis < 2; ++axis) {
    const LineDomain line = axis_line(d, axis);
    auto add = [&](LineFunction u) {
      Complex m = pairwise_sum(u.values) / static_cast<double>(u.values.size());
      double before = 0.0, after = 0.0;
      for (auto& z : u.values) {
        before = std::max(before, std::abs(z));
        z -= m;
        after = std::max(after, std::abs(z));
      }
      // a constant profile leaves only rounding noise, which is not mean-zero to any relative tolerance
      if (after <= 1e-12 * before)
        for (auto& z : u.values) z = 0.0;
      coll[static_cast<std::size_t>(axis)].push_back(sparse_stopping(CubeField::from_line(u), Cube{}, 1e-8));
    };
    add(LineFunction(line));
    LineFunction prof(line);
    const auto n = axis == 0 ? b.n1() : b.n2();
    const auto other = axis == 0 ? b.n2() : b.n1();
    for (std::int64_t i = 0; i < n; ++i) {
      Complex s = 0.0;
      for (std::int64_t j = 0; j < other; ++j) s += axis == 0 ? b(i, j) : b(j, i);
      prof.values[static_cast<std::size_t>(i)] = s / static_cast<double>(other);
    }
    add(prof);
    std::mt19937_64 rng(mix(seed, 0xd5, static_cast<std::uint64_t>(axis)));
    std::normal_distribution<double> N(0.0, 1.0);
    for (int c = 0; c < candidates; ++c) {
      LineFunction u(line);
      for (auto& z : u.values) z = N(rng) * std::exp(2.0 * N(rng));
      add(u);
    }
  }
  const auto& C1 = coll[0];
  const auto& C2 = coll[1];
  struct Best {
    double value = -1.0;
    std::vector<double> l1, l2;
    std::size_t a = 0, c = 0;
  };
  std::vector<Best> per(C1.size() * C2.size());
  const auto npairs = static_cast<std::int64_t>(per.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t pi = 0; pi < npairs; ++pi) {
    const auto a = static_cast<std::size_t>(pi) / C2.size(), c = static_cast<std::size_t>(pi) % C2.size();
    const auto I = sparse_intervals(C1[a], 0), J = sparse_intervals(C2[c], 1);
    std::vector<double> w(I.size() * J.size());
    for (std::size_t i = 0; i < I.size(); ++i)
      for (std::size_t j = 0; j < J.size(); ++j)
        w[i * J.size() + j] = C1[a].nodes[i].measure * C2[c].nodes[j].measure * oscillation(b, DyadicRectangle{I[i], J[j]});
    std::vector<double> l2 = normalized_lambda(C2[c], std::vector<double>(J.size(), 1.0), r2), l1;
    for (int it = 0; it < 6; ++it) {
      std::vector<double> c1(I.size(), 0.0);
      for (std::size_t i = 0; i < I.size(); ++i)
        for (std::size_t j = 0; j < J.size(); ++j) c1[i] += l2[j] * w[i * J.size() + j];
      for (auto& x : c1) x = std::pow(x, r1 - 1.0);
      l1 = normalized_lambda(C1[a], c1, r1);
      std::vector<double> c2(J.size(), 0.0);
      for (std::size_t i = 0; i < I.size(); ++i)
        for (std::size_t j = 0; j < J.size(); ++j) c2[j] += l1[i] * w[i * J.size() + j];
      for (auto& x : c2) x = std::pow(x, r2 - 1.0);
      auto next = normalized_lambda(C2[c], c2, r2);
      if (std::all_of(next.begin(), next.end(), [](double x) { return x == 0.0; })) break;
      l2 = std::move(next);
    }
    if (l1.empty()) l1.assign(I.size(), 0.0);
    double v = 0.0;
    for (std::size_t i = 0; i < I.size(); ++i)
      for (std::size_t j = 0; j < J.size(); ++j) v += l1[i] * l2[j] * w[i * J.size() + j];
    per[static_cast<std::size_t>(pi)] = Best{v, std::move(l1), std::move(l2), a, c};
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < per.size(); ++i)
    if (per[i].value > per[best].value) best = i;
  const auto& B = per[best];
  return double_sparse_osc_functional(b, C1[B.a], C2[B.c], B.l1, B.l2, r1, r2);
}

double evaluate_functional(const MeshFunction& b, const FunctionalSpec& f, const HarnessBudgets& budgets,
                           std::uint64_t seed) {
  switch (f.kind) {
    case FunctionalKind::zero:
      return 0.0;
    case FunctionalKind::little_bmo:
      return little_bmo(b, budgets.rect_depth).value;
    case FunctionalKind::holder:
      return holder_seminorm(b, f.alpha, f.axis);
    case FunctionalKind::inf_const:
      return inf_const_mixed_norm(b, f.mixed).value;
    case FunctionalKind::double_sparse:
      return double_sparse_sup(b, f.r[0], f.r[1], budgets.sparse_candidates, seed);
  }
  return 0.0;
}

ScalingWitness scaling_witness(const MeshFunction& b, const ExponentProfile& profile, int axis, double o_value) {
  if (axis != 0 && axis != 1) throw InvalidInput("axis must be 0 or 1");
  profile.validate();
  const auto& d = b.domain();
  ScalingWitness w;
  w.axis = axis;
  w.exponent = profile.gap(axis);
  w.o_value = o_value;
  const int other = 1 - axis;
  const auto n = d.cells(axis);
  const std::int64_t cell = (n * 5) / 16;
  const double tol = zero_tolerance(b);
  std::vector<double> xs, ys;
  for (int k = 0; k < d.depth[static_cast<std::size_t>(axis)]; ++k) {
    const DyadicInterval P = interval_of_cell(d, axis, k, cell);
    const DyadicInterval F{other, 0, 0};
    const DyadicRectangle R = axis == 0 ? DyadicRectangle{P, F} : DyadicRectangle{F, P};
    ScalingRow row;
    row.level = k;
    row.ell = length(d, P);
    row.osc = oscillation(b, R);
    const double weight = std::pow(row.ell, w.exponent) * std::pow(d.extent[static_cast<std::size_t>(other)], profile.gap(other));
    row.scaled = row.osc / weight;
    row.bound = o_value * weight;
    if (row.osc > tol) {
      xs.push_back(std::log(row.ell));
      ys.push_back(std::log(row.osc));
    }
    w.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    const double n_pts = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n_pts;
    my /= n_pts;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    w.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    constexpr double margin = 0.05;
    if (w.exponent > 0.0) w.divergent = w.slope < w.exponent - margin;
    if (w.exponent < 0.0) w.divergent = w.slope > w.exponent + margin;
  }
  return w;
}

ScalingWitness lebesgue_shrink_test(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                    const OffSupportConfig& cfg) {
  profile.validate();
  if (profile.relation(1) != Relation::less) throw PreconditionError("the shrinking test needs p2 < q2");
  const double O = offsupport_norm(b, K, profile, cfg).value;
  return scaling_witness(b, profile, 1, O);
}

double model_proxy(const MeshFunction& b, const ExponentProfile& profile, int trials, std::uint64_t seed) {
  profile.validate();
  if (is_constant(b)) return 0.0;
  const auto& d = b.domain();
  std::vector<double> ratio(static_cast<std::size_t>(std::max(trials, 0)), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(mix(seed, 0x3a, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<int> bit(0, 1);
    ModelOperatorSpec s;
    s.kind = static_cast<ModelKind>(t % 3);
    if (s.kind == ModelKind::shift) {
      for (auto& c : s.complexity) c = bit(rng);
    } else if (s.kind == ModelKind::partial_paraproduct) {
      s.para_axis = bit(rng);
      s.adjoint = bit(rng) == 1;
      const int free_axis = 1 - s.para_axis;
      s.complexity[static_cast<std::size_t>(2 * free_axis)] = bit(rng);
      s.complexity[static_cast<std::size_t>(2 * free_axis + 1)] = bit(rng);
    } else {
      s.full_variant = std::uniform_int_distribution<int>(1, 4)(rng);
    }
    s.seed = rng();
    const auto S = ModelOperator::generate(s, d);
    MeshFunction f(d);
    std::normal_distribution<double> N(0.0, 1.0);
    if (t % 2 == 0) {
      for (auto& z : f.values()) z = Complex(N(rng), N(rng));
    } else {
      const int k1 = std::uniform_int_distribution<int>(0, d.depth[0])(rng);
      const int k2 = std::uniform_int_distribution<int>(0, d.depth[1])(rng);
      const auto m1 = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << k1) - 1)(rng);
      const auto m2 = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t{1} << k2) - 1)(rng);
      f = Complex(std::polar(1.0, 2.0 * kPi * std::uniform_real_distribution<double>(0.0, 1.0)(rng))) *
          indicator(d, make_rectangle(k1, m1, k2, m2));
    }
    const double den = mixed_norm(f, profile.p1, profile.p2);
    ratio[static_cast<std::size_t>(t)] = den > 0.0 ? mixed_norm(model_commutator(b, S, f), profile.q1, profile.q2) / den : 0.0;
  }
  double m = 0.0;
  for (double r : ratio) m = std::max(m, r);
  return m;
}

double offsupport_proxy(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                        const CaseInfo& info, const HarnessBudgets& budgets, std::uint64_t seed) {
  OffSupportConfig cfg;
  cfg.A = budgets.A;
  cfg.max_rectangles = budgets.max_rectangles;
  cfg.seed = mix(seed, 0x0f);
  const auto plain = offsupport_norm(b, K, profile, cfg);
  if (!info.sigma) return plain.value;
  const auto& d = b.domain();
  // Bases: the best single rectangles of the plain scan (first in scan order on ties).
  std::vector<std::size_t> order(plain.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return plain.values[x] > plain.values[y]; });
  order.resize(std::min(order.size(), static_cast<std::size_t>(std::max(budgets.sigma_bases, 1))));
  std::vector<DyadicRectangle> bases;
  for (auto i : order) bases.push_back(plain.sampled[i]);
  std::vector<SigmaFamily> families;
  for (std::size_t i = 0; i < bases.size(); ++i)
    for (int axis = 0; axis < 2; ++axis) {
      if (info.relation[static_cast<std::size_t>(axis)] != Relation::greater) continue;
      auto fams = sigma_families(d, K, bases[i].I, bases[i].J, axis, budgets.sigma_families, budgets.A,
                                 mix(seed, 0x51, i * 2 + static_cast<std::size_t>(axis)));
      for (auto& f : fams) families.push_back(std::move(f));
    }
  return offsupport_norm_sigma(b, K, profile, families, cfg).value;
}

Bands Bands::load(const std::string& path) { return Bands(read_json(path)); }

const nlohmann::json* Bands::find(const std::string& name) const {
  if (!data_.contains("bands")) return nullptr;
  const auto& b = data_.at("bands");
  auto it = b.find(name);
  return it == b.end() ? nullptr : &*it;
}

bool Bands::has(const std::string& name) const { return find(name) != nullptr; }

std::optional<double> Bands::upper(const std::string& name) const {
  const auto* j = find(name);
  if (!j || !j->contains("upper") || !j->at("upper").is_number()) return std::nullopt;
  return j->at("upper").get<double>();
}

std::optional<double> Bands::lower(const std::string& name) const {
  const auto* j = find(name);
  if (!j || !j->contains("lower") || !j->at("lower").is_number()) return std::nullopt;
  return j->at("lower").get<double>();
}

nlohmann::json CaseReport::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
  nlohmann::json checks_j = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"name", c.name}, {"value", num(c.value)}, {"asserted", c.asserted}, {"pass", c.pass}};
    j["band"] = c.band ? nlohmann::json(*c.band) : nlohmann::json(nullptr);
    checks_j.push_back(std::move(j));
  }
  nlohmann::json wit = nlohmann::json::array();
  for (const auto& w : witnesses) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : w.rows)
      rows.push_back({{"level", r.level}, {"ell", r.ell}, {"osc", r.osc}, {"scaled", r.scaled}});
    wit.push_back({{"axis", w.axis + 1},
                   {"exponent", w.exponent},
                   {"slope", w.slope},
                   {"divergent", w.divergent},
                   {"rows", rows}});
  }
  nlohmann::json j{{"case", info.label},
                   {"case_key", info.key},
                   {"statement", info.statement},
                   {"exponents", bpcl::to_json(profile)},
                   {"symbol", symbol},
                   {"constancy_mode", mode_name(info.constancy)},
                   {"constancy_defect", defect},
                   {"admissible", admissible},
                   {"lower", {{"name", info.lower.name}, {"value", lower}}},
                   {"upper", {{"name", info.upper.name}, {"value", upper}}},
                   {"n_hat_off", n_off},
                   {"n_hat_model", n_model},
                   {"equivalence", info.equivalence},
                   {"open_gap", info.open_gap},
                   {"one_sided", info.open_gap},
                   {"divergent", divergent},
                   {"witnesses", wit},
                   {"checks", checks_j},
                   {"pass", pass}};
  j["gap_ratio"] = gap_ratio ? num(*gap_ratio) : nlohmann::json(nullptr);
  return j;
}

CaseReport two_sided_report(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                            const HarnessBudgets& budgets, std::uint64_t seed, const Bands* bands,
                            const std::string& symbol_name) {
  CaseReport rep;
  rep.info = classify_case(profile);
  rep.profile = profile;
  rep.symbol = symbol_name;
  const double tol = zero_tolerance(b);
  rep.defect = constancy_defect(b, rep.info.constancy);
  rep.admissible = rep.defect <= tol;
  rep.lower = evaluate_functional(b, rep.info.lower, budgets, mix(seed, 0x10));
  rep.upper = rep.info.equivalence ? rep.lower : evaluate_functional(b, rep.info.upper, budgets, mix(seed, 0x11));
  rep.n_off = offsupport_proxy(b, K, profile, rep.info, budgets, mix(seed, 0x12));
  rep.n_model = model_proxy(b, profile, budgets.trials, mix(seed, 0x13));

  auto add = [&](const std::string& name, double value, std::optional<double> band, bool asserted, bool pass) {
    rep.checks.push_back(BandCheck{name, value, band, asserted, pass});
  };
  auto banded = [&](const std::string& check, double value) {
    const std::string name = "report." + rep.info.key + "." + check;
    const auto band = bands ? bands->upper(name) : std::nullopt;
    add(check, value, band, band.has_value(), !band || value <= *band);
  };
  auto ratio = [&](double num, double den) {
    if (den > tol) return num / den;
    return num <= tol ? 0.0 : kInf;
  };

  if (rep.info.constancy != ConstancyMode::none && !rep.admissible) {
    for (int axis = 0; axis < 2; ++axis) {
      if (rep.info.relation[static_cast<std::size_t>(axis)] == Relation::equal) continue;
      rep.witnesses.push_back(scaling_witness(b, profile, axis, rep.n_off));
      rep.divergent = rep.divergent || rep.witnesses.back().divergent;
    }
    add("divergence_witness", rep.defect, std::nullopt, true, rep.divergent);
  } else if (rep.info.constancy == ConstancyMode::global) {
    add("n_hat_off_zero", rep.n_off, 0.0, true, rep.n_off <= tol);
    add("n_hat_model_zero", rep.n_model, 0.0, true, rep.n_model <= tol);
  } else {
    banded("lower_over_off", ratio(rep.lower, rep.n_off));
    banded("model_over_upper", ratio(rep.n_model, rep.upper));
    if (rep.info.equivalence) banded("off_over_upper", ratio(rep.n_off, rep.upper));
  }
  if (rep.info.open_gap) rep.gap_ratio = ratio(rep.upper, rep.lower);
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const BandCheck& c) { return !c.asserted || c.pass; });
  return rep;
}

namespace {

Complex json_complex(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
  throw InvalidInput("expected a number or a [re, im] pair");
}

std::pair<std::string, std::string> split_kind(const std::string& kind) {
  const auto c = kind.find(':');
  if (c == std::string::npos) return {kind, ""};
  return {kind.substr(0, c), kind.substr(c + 1)};
}

}  // namespace

MeshFunction make_symbol(const nlohmann::json& symbol, const BoxDomain& d) {
  const std::string kind = symbol.at("kind").get<std::string>();
  const nlohmann::json params = symbol.value("params", nlohmann::json::object());
  const auto [head, tail] = split_kind(kind);
  if (kind == "constant") {
    const Complex c = params.contains("value") ? json_complex(params.at("value")) : Complex(1.0);
    MeshFunction b(d);
    for (auto& z : b.values()) z = c;
    return b;
  }
  if (head == "coord") {
    if (tail == "x1") return MeshFunction::sample(d, [](double x1, double) { return x1; });
    if (tail == "x2") return MeshFunction::sample(d, [](double, double x2) { return x2; });
    if (tail == "x1+x2") return MeshFunction::sample(d, [](double x1, double x2) { return x1 + x2; });
    throw InvalidInput("unknown coordinate symbol: " + kind);
  }
  if (head == "haar") {
    std::array<int, 2> lv{0, 0};
    if (params.contains("levels")) {
      const auto& l = params.at("levels");
      lv = l.is_array() ? l.get<std::array<int, 2>>() : std::array<int, 2>{l.get<int>(), l.get<int>()};
    }
    for (int a = 0; a < 2; ++a)
      if (lv[static_cast<std::size_t>(a)] < 0 || lv[static_cast<std::size_t>(a)] >= d.depth[static_cast<std::size_t>(a)])
        throw InvalidInput("haar symbol levels must lie below the mesh depth");
    MeshFunction b(d);
    auto sign = [&](int axis, std::int64_t cell) {
      const int shift = d.depth[static_cast<std::size_t>(axis)] - lv[static_cast<std::size_t>(axis)] - 1;
      return ((cell >> shift) & 1) ? -1.0 : 1.0;
    };
    for (std::int64_t i1 = 0; i1 < d.cells(0); ++i1)
      for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2) b(i1, i2) = sign(0, i1) * sign(1, i2);
    return b;
  }
  if (head == "csv") {
    // "csv:path" takes params.path; any other tail is the path itself
    const std::string path = tail.empty() || tail == "path" ? params.at("path").get<std::string>() : tail;
    auto b = read_mesh_csv(path);
    if (!(b.domain() == d)) throw InvalidInput("symbol CSV " + path + " does not match the configured domain");
    return b;
  }
  throw InvalidInput("unknown symbol kind: " + kind);
}

std::string symbol_label(const nlohmann::json& symbol) {
  const std::string kind = symbol.at("kind").get<std::string>();
  if (kind.rfind("haar", 0) == 0 && symbol.contains("params") && symbol.at("params").contains("levels"))
    return "haar:" + symbol.at("params").at("levels").dump();
  return kind;
}

std::vector<nlohmann::json> canonical_symbols() {
  const auto empty = nlohmann::json::object();
  return {{{"kind", "constant"}, {"params", {{"value", 1.0}}}},
          {{"kind", "coord:x1"}, {"params", empty}},
          {{"kind", "coord:x2"}, {"params", empty}},
          {{"kind", "coord:x1+x2"}, {"params", empty}},
          {{"kind", "haar:levels"}, {"params", {{"levels", {0, 0}}}}}};
}

KernelSpec make_kernel(const nlohmann::json& kernel) {
  const std::string name = kernel.value("name", std::string("tensor_hilbert"));
  const nlohmann::json params = kernel.value("params", nlohmann::json::object());
  if (name == "tensor_hilbert") return tensor_hilbert(params.value("amplitude", 1.0 / (kPi * kPi)));
  if (name == "zero") return zero_kernel();
  throw InvalidInput("unknown kernel: " + name);
}

RunConfig parse_run_config(const nlohmann::json& j);

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    return parse_run_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    const double extent = d.value("extent", 1.0);
    const int depth = d.value("depth", 7);
    const double origin = d.value("origin", 0.0);
    c.domain = BoxDomain::square(extent, depth, origin);
  }
  if (j.contains("kernel")) c.kernel = j.at("kernel");
  if (j.contains("symbol")) c.symbol = j.at("symbol");
  if (j.contains("exponents")) c.profile = profile_from_json(j.at("exponents"));
  if (j.contains("awf")) c.A = j.at("awf").value("A", 8.0);
  c.budgets.A = c.A;
  if (j.contains("budgets")) {
    const auto& b = j.at("budgets");
    c.budgets.rect_depth = b.value("rect_depth", c.budgets.rect_depth);
    c.budgets.trials = b.value("trials", c.budgets.trials);
    c.budgets.max_rectangles = b.value("max_rectangles", c.budgets.max_rectangles);
    c.budgets.sigma_bases = b.value("sigma_bases", c.budgets.sigma_bases);
    c.budgets.sigma_families = b.value("sigma_families", c.budgets.sigma_families);
    c.budgets.sparse_candidates = b.value("sparse_candidates", c.budgets.sparse_candidates);
  }
  c.domain.validate();
  make_kernel(c.kernel);
  return c;
}

nlohmann::json RunConfig::to_json() const {
  return {{"domain", {{"extent", domain.extent[0]}, {"depth", domain.depth[0]}, {"origin", domain.origin[0]}}},
          {"kernel", kernel},
          {"symbol", symbol},
          {"exponents", bpcl::to_json(profile)},
          {"awf", {{"A", A}}},
          {"budgets",
           {{"rect_depth", budgets.rect_depth},
            {"trials", budgets.trials},
            {"max_rectangles", budgets.max_rectangles},
            {"sigma_bases", budgets.sigma_bases},
            {"sigma_families", budgets.sigma_families},
            {"sparse_candidates", budgets.sparse_candidates}}}};
}

}  // namespace bpcl
