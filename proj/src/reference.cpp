#include "bpcl/reference.hpp"

#include <cmath>

namespace bpcl::reference {

namespace {

Point cell_point(const BoxDomain& d, const Cell& c) { return {d.center(0, c.i1), d.center(1, c.i2)}; }

double seq_norm(const std::vector<double>& a, double p, double w) {
  if (p == kInf) {
    double m = 0.0;
    for (double x : a) m = std::max(m, x);
    return m;
  }
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = std::pow(a[i], p);
  return std::pow(pairwise_sum(t) * w, 1.0 / p);
}

}  // namespace

MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, std::span<const Cell> targets, Side side) {
  const auto& d = g.domain();
  const auto src = support_cells(g);
  MeshFunction out(d);
  const double area = d.cell_area();
  for (const auto& xc : targets) {
    const Point x = cell_point(d, xc);
    Complex s = 0.0;
    for (const auto& yc : src) {
      if (xc.i1 == yc.i1 || xc.i2 == yc.i2) throw PreconditionError("support overlap");
      const Point y = cell_point(d, yc);
      s += (side == Side::forward ? K(x, y) : K(y, x)) * g(yc.i1, yc.i2);
    }
    out(xc.i1, xc.i2) = s * area;
  }
  return out;
}

Complex commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f, const MeshFunction& g) {
  const auto& d = b.domain();
  const auto ys = support_cells(f);
  const auto xs = support_cells(g);
  std::vector<Complex> rows(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Cell& xc = xs[t];
    const Point x = cell_point(d, xc);
    const Complex bx = b(xc.i1, xc.i2);
    Complex s = 0.0;
    for (const auto& yc : ys) {
      if (xc.i1 == yc.i1 || xc.i2 == yc.i2) throw PreconditionError("support overlap");
      s += (bx - b(yc.i1, yc.i2)) * K(x, cell_point(d, yc)) * f(yc.i1, yc.i2);
    }
    rows[t] = s * g(xc.i1, xc.i2);
  }
  const double area = d.cell_area();
  return pairwise_sum(rows) * (area * area);
}

double mixed_norm(const MeshFunction& f, const MixedNormSpec& spec) {
  const auto& d = f.domain();
  const int outer = spec.outer_axis, inner = 1 - outer;
  std::vector<double> inner_norms(static_cast<std::size_t>(d.cells(outer)));
  for (std::int64_t o = 0; o < d.cells(outer); ++o) {
    std::vector<double> slice(static_cast<std::size_t>(d.cells(inner)));
    for (std::int64_t i = 0; i < d.cells(inner); ++i)
      slice[static_cast<std::size_t>(i)] = std::abs(outer == 0 ? f(o, i) : f(i, o));
    inner_norms[static_cast<std::size_t>(o)] = seq_norm(slice, spec.p_inner, d.width(inner));
  }
  return seq_norm(inner_norms, spec.p_outer, d.width(outer));
}

RectangleSup little_bmo(const MeshFunction& b, int max_level) {
  const auto& d = b.domain();
  const int D1 = max_level < 0 ? d.depth[0] : std::min(max_level, d.depth[0]);
  const int D2 = max_level < 0 ? d.depth[1] : std::min(max_level, d.depth[1]);
  RectangleSup best;
  bool first = true;
  for (int k1 = 0; k1 <= D1; ++k1)
    for (int k2 = 0; k2 <= D2; ++k2)
      for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1)
        for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) {
          const auto R = make_rectangle(k1, m1, k2, m2);
          const double v = oscillation(b, R);
          if (first || v > best.value) {
            best.value = v;
            best.argmax = R;
            first = false;
          }
        }
  return best;
}

MeshFunction apply_model(const ModelOperator& S, const MeshFunction& f) {
  const auto& d = S.domain();
  if (!(f.domain() == d)) throw InvalidInput("domain mismatch");
  const auto b = slot_bases(S.spec());
  const auto in = analyze(f, b.in[0], b.in[1]);
  DyadicTable out(d);
  S.for_each_entry([&](const ModelEntry& e) {
    out.at(heap_id(e.I2.level, e.I2.index), heap_id(e.J2.level, e.J2.index)) +=
        S.coefficients()[e.index] * in.at(heap_id(e.I1.level, e.I1.index), heap_id(e.J1.level, e.J1.index));
  });
  return synthesize(out, b.out[0], b.out[1]);
}

}  // namespace bpcl::reference
