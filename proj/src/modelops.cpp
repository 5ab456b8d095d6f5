#include "bpcl/modelops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

namespace bpcl {

std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::shift:
      return "shift";
    case ModelKind::partial_paraproduct:
      return "partial_paraproduct";
    case ModelKind::full_paraproduct:
      return "full_paraproduct";
  }
  return "shift";
}

ModelKind parse_kind(const std::string& s) {
  if (s == "shift") return ModelKind::shift;
  if (s == "partial_paraproduct" || s == "partial") return ModelKind::partial_paraproduct;
  if (s == "full_paraproduct" || s == "full") return ModelKind::full_paraproduct;
  throw InvalidInput("unknown model operator kind: " + s);
}

SlotBases slot_bases(const ModelOperatorSpec& s) {
  SlotBases b;
  switch (s.kind) {
    case ModelKind::shift:
      break;
    case ModelKind::partial_paraproduct: {
      if (s.para_axis != 0 && s.para_axis != 1) throw InvalidInput("paraproduct axis must be 0 or 1");
      auto& slot = s.adjoint ? b.out : b.in;
      slot[static_cast<std::size_t>(s.para_axis)] = Basis::average;
      break;
    }
    case ModelKind::full_paraproduct:
      switch (s.full_variant) {
        case 1:
          b.in = {Basis::average, Basis::average};
          break;
        case 2:
          b.out = {Basis::average, Basis::average};
          break;
        case 3:
          b.in = {Basis::haar, Basis::average};
          b.out = {Basis::average, Basis::haar};
          break;
        case 4:
          b.in = {Basis::average, Basis::haar};
          b.out = {Basis::haar, Basis::average};
          break;
        default:
          throw InvalidInput("full paraproduct variant must be 1..4");
      }
      break;
  }
  return b;
}

namespace {

DyadicInterval from_heap(int axis, std::int64_t id) {
  const int level = std::bit_width(static_cast<std::uint64_t>(id + 1)) - 1;
  return {axis, level, id + 1 - (std::int64_t{1} << level)};
}

struct AxisShape {
  int ci = 0, co = 0;  // input / output generations
};

std::array<AxisShape, 2> shapes(const ModelOperatorSpec& s) {
  for (int c : s.complexity)
    if (c < 0) throw InvalidInput("complexity entries must be nonnegative");
  const auto b = slot_bases(s);
  std::array<AxisShape, 2> a{AxisShape{s.complexity[0], s.complexity[1]}, AxisShape{s.complexity[2], s.complexity[3]}};
  for (int ax = 0; ax < 2; ++ax)
    if ((b.in[static_cast<std::size_t>(ax)] != Basis::haar || b.out[static_cast<std::size_t>(ax)] != Basis::haar) &&
        (a[static_cast<std::size_t>(ax)].ci != 0 || a[static_cast<std::size_t>(ax)].co != 0))
      throw InvalidInput("paraproduct axes carry complexity 0");
  return a;
}

}  // namespace

void ModelOperator::setup() {
  domain_.validate();
  if (!(spec_.normalization > 0.0)) throw InvalidInput("normalization must be positive");
  const auto sh = shapes(spec_);
  for (int ax = 0; ax < 2; ++ax) {
    const auto& a = sh[static_cast<std::size_t>(ax)];
    kmax_[static_cast<std::size_t>(ax)] = domain_.depth[static_cast<std::size_t>(ax)] - 1 - std::max(a.ci, a.co);
    if (kmax_[static_cast<std::size_t>(ax)] < 0) throw GeometryError("complexity exceeds the mesh depth");
    count_[static_cast<std::size_t>(ax)] = heap_size(kmax_[static_cast<std::size_t>(ax)]);
    pairs_[static_cast<std::size_t>(ax)] = std::int64_t{1} << (a.ci + a.co);
  }
}

std::size_t ModelOperator::table_size(const ModelOperatorSpec& spec, const BoxDomain& d) {
  ModelOperator m;
  m.spec_ = spec;
  m.domain_ = d;
  m.setup();
  return static_cast<std::size_t>(m.count_[0] * m.count_[1] * m.pairs_[0] * m.pairs_[1]);
}

ModelEntry ModelOperator::entry(std::size_t idx) const {
  const auto sh = shapes(spec_);
  auto rest = static_cast<std::int64_t>(idx);
  const std::int64_t p1 = rest % pairs_[1];
  rest /= pairs_[1];
  const std::int64_t p0 = rest % pairs_[0];
  rest /= pairs_[0];
  const std::int64_t idV = rest % count_[1];
  const std::int64_t idK = rest / count_[1];
  ModelEntry e;
  e.index = idx;
  e.K = from_heap(0, idK);
  e.V = from_heap(1, idV);
  auto sub = [](const DyadicInterval& Q, int gen, std::int64_t local) {
    return DyadicInterval{Q.axis, Q.level + gen, (Q.index << gen) + local};
  };
  e.I1 = sub(e.K, sh[0].ci, p0 >> sh[0].co);
  e.I2 = sub(e.K, sh[0].co, p0 & ((std::int64_t{1} << sh[0].co) - 1));
  e.J1 = sub(e.V, sh[1].ci, p1 >> sh[1].co);
  e.J2 = sub(e.V, sh[1].co, p1 & ((std::int64_t{1} << sh[1].co) - 1));
  return e;
}

void ModelOperator::for_each_entry(const std::function<void(const ModelEntry&)>& fn) const {
  for (std::size_t i = 0; i < alpha_.size(); ++i) fn(entry(i));
}

ModelOperator::ModelOperator(const ModelOperatorSpec& spec, const BoxDomain& d, std::vector<Complex> coefficients)
    : spec_(spec), domain_(d), alpha_(std::move(coefficients)) {
  setup();
  if (alpha_.size() != table_size(spec_, domain_)) throw ValidationError("coefficient table has the wrong size");
  validate();
}

double dyadic_sequence_bmo(std::span<const Complex> alpha, double extent, int depth) {
  if (static_cast<std::int64_t>(alpha.size()) != heap_size(depth)) throw InvalidInput("sequence size mismatch");
  std::vector<double> sub(alpha.size());
  double best = 0.0;
  for (int k = depth; k >= 0; --k)
    for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
      const auto id = static_cast<std::size_t>(heap_id(k, m));
      double s = std::norm(alpha[id]);
      if (k < depth)
        s += sub[static_cast<std::size_t>(heap_id(k + 1, 2 * m))] + sub[static_cast<std::size_t>(heap_id(k + 1, 2 * m + 1))];
      sub[id] = s;
      best = std::max(best, std::sqrt(s / (extent * std::ldexp(1.0, -k))));
    }
  return best;
}

double dyadic_sequence_square_l1(std::span<const Complex> beta, double extent, int depth) {
  if (static_cast<std::int64_t>(beta.size()) != heap_size(depth)) throw InvalidInput("sequence size mismatch");
  const std::int64_t n = std::int64_t{1} << depth;
  const double w = extent / static_cast<double>(n);
  std::vector<double> cells(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k <= depth; ++k)
      s += std::norm(beta[static_cast<std::size_t>(heap_id(k, i >> (depth - k)))]) / (extent * std::ldexp(1.0, -k));
    cells[static_cast<std::size_t>(i)] = std::sqrt(s) * w;
  }
  return pairwise_sum(cells);
}

namespace {

double interval_len(const BoxDomain& d, const DyadicInterval& I) { return length(d, I); }

}  // namespace

void ModelOperator::validate() const {
  const double tol = 1.0 + 1e-12;
  const auto& d = domain_;
  for (const auto& a : alpha_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ValidationError("non-finite coefficient");
  switch (spec_.kind) {
    case ModelKind::shift:
      for (std::size_t i = 0; i < alpha_.size(); ++i) {
        const auto e = entry(i);
        const double bound = spec_.normalization *
                             std::sqrt(interval_len(d, e.I1) * interval_len(d, e.I2) * interval_len(d, e.J1) *
                                       interval_len(d, e.J2)) /
                             (interval_len(d, e.K) * interval_len(d, e.V));
        if (std::abs(alpha_[i]) > bound * tol) {
          std::ostringstream os;
          os << "shift coefficient " << i << " has size " << std::abs(alpha_[i]) << " above " << bound;
          throw ValidationError(os.str());
        }
      }
      break;
    case ModelKind::partial_paraproduct: {
      // Columns run over the paraproduct axis with the other indices fixed.
      const int pa = spec_.para_axis, oa = 1 - pa;
      const std::int64_t ncol = count_[static_cast<std::size_t>(oa)] * pairs_[static_cast<std::size_t>(oa)];
      std::vector<Complex> col(static_cast<std::size_t>(count_[static_cast<std::size_t>(pa)]));
      for (std::int64_t c = 0; c < ncol; ++c) {
        const std::int64_t idO = c / pairs_[static_cast<std::size_t>(oa)];
        const std::int64_t pO = c % pairs_[static_cast<std::size_t>(oa)];
        std::size_t first = 0;
        for (std::int64_t idP = 0; idP < count_[static_cast<std::size_t>(pa)]; ++idP) {
          const std::int64_t idK = pa == 0 ? idP : idO, idV = pa == 0 ? idO : idP;
          const std::int64_t p0 = pa == 0 ? 0 : pO, p1 = pa == 0 ? pO : 0;
          const auto idx = static_cast<std::size_t>(((idK * count_[1] + idV) * pairs_[0] + p0) * pairs_[1] + p1);
          col[static_cast<std::size_t>(idP)] = alpha_[idx];
          if (idP == 0) first = idx;
        }
        const auto e = entry(first);
        const double bound = pa == 0 ? std::sqrt(interval_len(d, e.J1) * interval_len(d, e.J2)) / interval_len(d, e.V)
                                     : std::sqrt(interval_len(d, e.I1) * interval_len(d, e.I2)) / interval_len(d, e.K);
        const double bmo = dyadic_sequence_bmo(col, d.extent[static_cast<std::size_t>(pa)], kmax_[static_cast<std::size_t>(pa)]);
        if (bmo > spec_.normalization * bound * tol) {
          std::ostringstream os;
          os << "paraproduct column " << c << " has BMO norm " << bmo << " above " << spec_.normalization * bound;
          throw ValidationError(os.str());
        }
      }
      break;
    }
    case ModelKind::full_paraproduct:
      for (std::size_t i = 0; i < alpha_.size(); ++i)
        if (std::abs(alpha_[i]) > spec_.normalization * tol) {
          std::ostringstream os;
          os << "full paraproduct coefficient " << i << " exceeds the declared bound " << spec_.normalization;
          throw ValidationError(os.str());
        }
      break;
  }
}

ModelOperator ModelOperator::generate(const ModelOperatorSpec& spec, const BoxDomain& d) {
  ModelOperator m;
  m.spec_ = spec;
  m.domain_ = d;
  m.setup();
  m.alpha_.assign(table_size(spec, d), Complex{});
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto disk = [&](double radius) {
    const double r = radius * std::sqrt(U(rng));
    const double t = 2.0 * kPi * U(rng);
    return Complex(r * std::cos(t), r * std::sin(t));
  };
  switch (spec.kind) {
    case ModelKind::shift:
      for (std::size_t i = 0; i < m.alpha_.size(); ++i) {
        const auto e = m.entry(i);
        const double bound = spec.normalization *
                             std::sqrt(length(d, e.I1) * length(d, e.I2) * length(d, e.J1) * length(d, e.J2)) /
                             (length(d, e.K) * length(d, e.V));
        m.alpha_[i] = disk(bound);
      }
      break;
    case ModelKind::partial_paraproduct: {
      const int pa = spec.para_axis, oa = 1 - pa;
      const int kmax = m.kmax_[static_cast<std::size_t>(pa)];
      const LineDomain line{d.origin[static_cast<std::size_t>(pa)], d.extent[static_cast<std::size_t>(pa)], kmax + 1};
      const std::int64_t ncol = m.count_[static_cast<std::size_t>(oa)] * m.pairs_[static_cast<std::size_t>(oa)];
      for (std::int64_t c = 0; c < ncol; ++c) {
        // Haar coefficients of a bounded function, rescaled to a certified BMO level.
        std::vector<Complex> phi(static_cast<std::size_t>(line.cells()));
        for (auto& v : phi) v = disk(1.0);
        auto beta = tree_analysis_1d(phi, line.width(), line.depth, Basis::haar);
        beta.resize(static_cast<std::size_t>(heap_size(kmax)));
        const double bmo = dyadic_sequence_bmo(beta, line.extent, kmax);
        const std::int64_t idO = c / m.pairs_[static_cast<std::size_t>(oa)];
        const std::int64_t pO = c % m.pairs_[static_cast<std::size_t>(oa)];
        auto flat = [&](std::int64_t idP) {
          const std::int64_t idK = pa == 0 ? idP : idO, idV = pa == 0 ? idO : idP;
          const std::int64_t p0 = pa == 0 ? 0 : pO, p1 = pa == 0 ? pO : 0;
          return static_cast<std::size_t>(((idK * m.count_[1] + idV) * m.pairs_[0] + p0) * m.pairs_[1] + p1);
        };
        const auto e = m.entry(flat(0));
        const double bound = pa == 0 ? std::sqrt(length(d, e.J1) * length(d, e.J2)) / length(d, e.V)
                                     : std::sqrt(length(d, e.I1) * length(d, e.I2)) / length(d, e.K);
        const double target = spec.normalization * bound * (0.5 + 0.5 * U(rng));
        const double scale = bmo > 0.0 ? target / bmo : 0.0;
        for (std::int64_t idP = 0; idP < m.count_[static_cast<std::size_t>(pa)]; ++idP)
          m.alpha_[flat(idP)] = beta[static_cast<std::size_t>(idP)] * scale;
      }
      break;
    }
    case ModelKind::full_paraproduct: {
      // Haar coefficients of a function bounded by 1: |<beta, h_K h_V>| <= |K x V|^{1/2} <= |box|^{1/2}.
      MeshFunction beta(d);
      for (auto& v : beta.values()) v = disk(1.0);
      const auto t = analyze(beta, Basis::haar, Basis::haar);
      const double scale = spec.normalization / std::sqrt(d.extent[0] * d.extent[1]);
      for (std::size_t i = 0; i < m.alpha_.size(); ++i) {
        const auto e = m.entry(i);
        m.alpha_[i] = t.at(heap_id(e.K.level, e.K.index), heap_id(e.V.level, e.V.index)) * scale;
      }
      break;
    }
  }
  m.validate();
  return m;
}

MeshFunction apply_model(const ModelOperator& S, const MeshFunction& f) {
  const auto& d = S.domain();
  if (!(f.domain() == d)) throw InvalidInput("domain mismatch");
  const auto b = slot_bases(S.spec());
  const auto in = analyze(f, b.in[0], b.in[1]);
  DyadicTable out(d);
  const auto& c = S.spec().complexity;
  const int ci0 = c[0], co0 = c[1], ci1 = c[2], co1 = c[3];
  const std::int64_t nK = heap_size(S.max_level(0)), nV = heap_size(S.max_level(1));
  const std::int64_t P0 = std::int64_t{1} << (ci0 + co0), P1 = std::int64_t{1} << (ci1 + co1);
  const auto& alpha = S.coefficients();
  // Each K owns the output rows of its I2 intervals, so parallel writes are disjoint.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idK = 0; idK < nK; ++idK) {
    const auto K = from_heap(0, idK);
    for (std::int64_t idV = 0; idV < nV; ++idV) {
      const auto V = from_heap(1, idV);
      for (std::int64_t p0 = 0; p0 < P0; ++p0) {
        const std::int64_t i1 = heap_id(K.level + ci0, (K.index << ci0) + (p0 >> co0));
        const std::int64_t i2 = heap_id(K.level + co0, (K.index << co0) + (p0 & ((std::int64_t{1} << co0) - 1)));
        for (std::int64_t p1 = 0; p1 < P1; ++p1) {
          const std::int64_t j1 = heap_id(V.level + ci1, (V.index << ci1) + (p1 >> co1));
          const std::int64_t j2 = heap_id(V.level + co1, (V.index << co1) + (p1 & ((std::int64_t{1} << co1) - 1)));
          const auto idx = static_cast<std::size_t>(((idK * nV + idV) * P0 + p0) * P1 + p1);
          out.at(i2, j2) += alpha[idx] * in.at(i1, j1);
        }
      }
    }
  }
  return synthesize(out, b.out[0], b.out[1]);
}

MeshFunction model_commutator(const MeshFunction& b, const ModelOperator& S, const MeshFunction& f) {
  if (!(b.domain() == S.domain())) throw InvalidInput("domain mismatch");
  // Scalar multiples commute with S.
  const auto& v = b.values();
  if (std::all_of(v.begin(), v.end(), [&](const Complex& z) { return z == v.front(); })) return MeshFunction(b.domain());
  return pointwise(b, apply_model(S, f)) - apply_model(S, pointwise(b, f));
}

ProductDecomposition product_decompose(const MeshFunction& b, const MeshFunction& f, int axis) {
  const auto& d = f.domain();
  if (!(b.domain() == d)) throw InvalidInput("domain mismatch");
  if (axis != 0 && axis != 1) throw InvalidInput("axis must be 0 or 1");
  const int other = 1 - axis;
  const int L = d.depth[static_cast<std::size_t>(axis)];
  ProductDecomposition out{MeshFunction(d), MeshFunction(d), MeshFunction(d), MeshFunction(d)};
  const std::int64_t n = d.cells(axis);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    std::vector<Complex> bs(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      bs[static_cast<std::size_t>(i)] = axis == 0 ? b(i, j) : b(j, i);
      fs[static_cast<std::size_t>(i)] = axis == 0 ? f(i, j) : f(j, i);
    }
    const auto ab = tree_analysis_1d(bs, d.width(axis), L, Basis::average);
    const auto af = tree_analysis_1d(fs, d.width(axis), L, Basis::average);
    for (std::int64_t i = 0; i < n; ++i) {
      Complex a1 = 0.0, a2 = 0.0, a3 = 0.0;
      for (int k = 0; k < L; ++k) {
        const auto J = static_cast<std::size_t>(heap_id(k, i >> (L - k)));
        const auto P = static_cast<std::size_t>(heap_id(k + 1, i >> (L - k - 1)));
        const Complex db = ab[P] - ab[J], df = af[P] - af[J];
        a1 += db * df;
        a2 += db * af[J];
        a3 += ab[J] * df;
      }
      auto put = [&](MeshFunction& m, Complex z) { (axis == 0 ? m(i, j) : m(j, i)) = z; };
      put(out.A1, a1);
      put(out.A2, a2);
      put(out.A3, a3);
      put(out.top, ab[0] * af[0]);
    }
  }
  return out;
}

MeshFunction fractional_positive_op(const MeshFunction& f, double alpha, int axis) {
  const auto& d = f.domain();
  if (axis < 0) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidInput("fractional order must lie in (0, 2)");
    const auto cf = CubeField::from_mesh(f);
    const auto s = cube_sums(cube_abs(cf));
    const auto& g = cf.grid;
    CubeField out = cf;
    for (std::size_t c = 0; c < g.size(); ++c) {
      const auto i1 = static_cast<std::int64_t>(c) / g.side(), i2 = static_cast<std::int64_t>(c) % g.side();
      double acc = 0.0;
      for (int k = 0; k <= g.depth; ++k)
        acc += std::pow(g.length(k), alpha) * s.average({k, i1 >> (g.depth - k), i2 >> (g.depth - k)}).real();
      out.values[c] = acc;
    }
    return out.to_mesh();
  }
  if (axis > 1) throw InvalidInput("axis must be 0, 1, or negative for the product");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("fractional order must lie in (0, 1)");
  const int other = 1 - axis;
  MeshFunction out(d);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    LineFunction u(axis_line(d, axis));
    for (std::int64_t i = 0; i < d.cells(axis); ++i) u.values[static_cast<std::size_t>(i)] = axis == 0 ? f(i, j) : f(j, i);
    const auto a = fractional_positive_op(u, alpha);
    for (std::int64_t i = 0; i < d.cells(axis); ++i) (axis == 0 ? out(i, j) : out(j, i)) = a.values[static_cast<std::size_t>(i)];
  }
  return out;
}

LineFunction fractional_positive_op(const LineFunction& u, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("fractional order must lie in (0, 1)");
  const auto& d = u.domain;
  std::vector<Complex> a(u.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(u.values[i]);
  const auto avg = tree_analysis_1d(a, d.width(), d.depth, Basis::average);
  LineFunction out(d);
  for (std::int64_t i = 0; i < d.cells(); ++i) {
    double acc = 0.0;
    for (int k = 0; k <= d.depth; ++k)
      acc += std::pow(d.extent * std::ldexp(1.0, -k), alpha) *
             avg[static_cast<std::size_t>(heap_id(k, i >> (d.depth - k)))].real();
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

ModelCommutatorTerms commutator_decompose_model(const MeshFunction& b, const ModelOperator& S, const MeshFunction& f,
                                                const MeshFunction& g) {
  if (S.spec().kind != ModelKind::shift) throw InvalidInput("the labeled expansion is implemented for shifts");
  const auto& d = S.domain();
  if (!(b.domain() == d) || !(f.domain() == d) || !(g.domain() == d)) throw InvalidInput("domain mismatch");
  double scale = 1.0;
  for (const auto& z : b.values()) scale = std::max(scale, std::abs(z));
  for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2)
    for (std::int64_t i1 = 1; i1 < d.cells(0); ++i1)
      if (std::abs(b(i1, i2) - b(0, i2)) > 1e-12 * scale) {
        std::ostringstream os;
        os << "symbol varies in x1 on the x2-cell " << i2;
        throw HypothesisError(os.str());
      }

  const auto F = analyze(f, Basis::haar, Basis::haar);
  const auto G = analyze(g, Basis::haar, Basis::haar);
  const auto pg = product_decompose(b, g, 1);
  const auto pf = product_decompose(b, f, 1);
  const auto G1 = analyze(pg.A1, Basis::haar, Basis::haar), G2 = analyze(pg.A2, Basis::haar, Basis::haar);
  const auto F1 = analyze(pf.A1, Basis::haar, Basis::haar), F2 = analyze(pf.A2, Basis::haar, Basis::haar);
  std::vector<Complex> row(static_cast<std::size_t>(d.cells(1)));
  for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2) row[static_cast<std::size_t>(i2)] = b(0, i2);
  const auto bav = tree_analysis_1d(row, d.width(1), d.depth[1], Basis::average);

  std::vector<Complex> tg1, tg2, tf1, tf2, tc;
  const auto& alpha = S.coefficients();
  tg1.reserve(alpha.size());
  S.for_each_entry([&](const ModelEntry& e) {
    const auto i1 = heap_id(e.I1.level, e.I1.index), i2 = heap_id(e.I2.level, e.I2.index);
    const auto j1 = heap_id(e.J1.level, e.J1.index), j2 = heap_id(e.J2.level, e.J2.index);
    const Complex a = alpha[e.index];
    const Complex fh = F.at(i1, j1), gh = G.at(i2, j2);
    tg1.push_back(a * fh * G1.at(i2, j2));
    tg2.push_back(a * fh * G2.at(i2, j2));
    tf1.push_back(a * F1.at(i1, j1) * gh);
    tf2.push_back(a * F2.at(i1, j1) * gh);
    tc.push_back(a * (bav[static_cast<std::size_t>(j2)] - bav[static_cast<std::size_t>(j1)]) * fh * gh);
  });
  ModelCommutatorTerms t;
  t.g_side_A1 = pairwise_sum(tg1);
  t.g_side_A2 = pairwise_sum(tg2);
  t.f_side_A1 = pairwise_sum(tf1);
  t.f_side_A2 = pairwise_sum(tf2);
  t.core = pairwise_sum(tc);
  t.total = t.g_side_A1 + t.g_side_A2 - t.f_side_A1 - t.f_side_A2 + t.core;
  t.direct = pairing(model_commutator(b, S, f), g);
  const double mag = std::max({std::abs(t.direct), std::abs(t.g_side_A1) + std::abs(t.g_side_A2) +
                                                      std::abs(t.f_side_A1) + std::abs(t.f_side_A2) +
                                                      std::abs(t.core)});
  t.relative_error = mag > 0.0 ? std::abs(t.total - t.direct) / mag : 0.0;
  t.verified = t.relative_error <= 1e-10;
  return t;
}

}  // namespace bpcl
