#include "bpcl/sio.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bpcl {

std::vector<Cell> cells_of(const BoxDomain& d, const DyadicRectangle& R) {
  check_rectangle(d, R);
  std::vector<Cell> out;
  for (auto i1 = cell_begin(d, R.I); i1 < cell_end(d, R.I); ++i1)
    for (auto i2 = cell_begin(d, R.J); i2 < cell_end(d, R.J); ++i2) out.push_back({i1, i2});
  return out;
}

std::vector<Cell> support_cells(const MeshFunction& f) {
  std::vector<Cell> out;
  for (std::int64_t i1 = 0; i1 < f.n1(); ++i1)
    for (std::int64_t i2 = 0; i2 < f.n2(); ++i2)
      if (f(i1, i2) != Complex{}) out.push_back({i1, i2});
  return out;
}

namespace {

// Throws unless every target cell avoids the support projections on both axes.
void require_separated(const BoxDomain& d, std::span<const Cell> support, std::span<const Cell> targets) {
  std::vector<char> s1(static_cast<std::size_t>(d.cells(0)), 0), s2(static_cast<std::size_t>(d.cells(1)), 0);
  for (const auto& c : support) {
    s1[static_cast<std::size_t>(c.i1)] = 1;
    s2[static_cast<std::size_t>(c.i2)] = 1;
  }
  for (const auto& c : targets) {
    if (c.i1 < 0 || c.i1 >= d.cells(0) || c.i2 < 0 || c.i2 >= d.cells(1))
      throw GeometryError("target cell outside the box");
    if (s1[static_cast<std::size_t>(c.i1)] || s2[static_cast<std::size_t>(c.i2)]) {
      std::ostringstream os;
      os << "support overlap: target cell (" << c.i1 << "," << c.i2 << ") shares a row or column with the support";
      throw PreconditionError(os.str());
    }
  }
}

Point cell_point(const BoxDomain& d, const Cell& c) { return {d.center(0, c.i1), d.center(1, c.i2)}; }

}  // namespace

MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, std::span<const Cell> targets, Side side) {
  const auto& d = g.domain();
  const auto src = support_cells(g);
  require_separated(d, src, targets);
  MeshFunction out(d);
  const double area = d.cell_area();
  const auto nt = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < nt; ++t) {
    const Cell& xc = targets[static_cast<std::size_t>(t)];
    const Point x = cell_point(d, xc);
    Complex s = 0.0;
    for (const auto& yc : src) {
      const Point y = cell_point(d, yc);
      s += (side == Side::forward ? K(x, y) : K(y, x)) * g(yc.i1, yc.i2);
    }
    out(xc.i1, xc.i2) = s * area;
  }
  return out;
}

MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, const DyadicRectangle& target, Side side) {
  const auto cells = cells_of(g.domain(), target);
  return apply_offsupport(K, g, cells, side);
}

Complex commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f, const MeshFunction& g) {
  const auto& d = b.domain();
  if (!(f.domain() == d) || !(g.domain() == d)) throw InvalidInput("domain mismatch");
  const auto ys = support_cells(f);
  const auto xs = support_cells(g);
  require_separated(d, ys, xs);
  std::vector<Complex> rows(xs.size());
  const auto nx = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < nx; ++t) {
    const Cell& xc = xs[static_cast<std::size_t>(t)];
    const Point x = cell_point(d, xc);
    const Complex bx = b(xc.i1, xc.i2);
    Complex s = 0.0;
    for (const auto& yc : ys) s += (bx - b(yc.i1, yc.i2)) * K(x, cell_point(d, yc)) * f(yc.i1, yc.i2);
    rows[static_cast<std::size_t>(t)] = s * g(xc.i1, xc.i2);
  }
  const double area = d.cell_area();
  return pairwise_sum(rows) * (area * area);
}

LineFunction truncated_pv_apply(const Kernel1d& K, const LineFunction& u, double epsilon) {
  const auto& d = u.domain;
  const double h = d.width();
  if (!(epsilon >= h * (1.0 - 1e-12))) throw InvalidInput("truncation below one cell width");
  const double cut = epsilon * (1.0 - 1e-12);
  LineFunction out(d);
  const auto n = d.cells();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = d.center(i);
    Complex s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const Complex uj = u.values[static_cast<std::size_t>(j)];
      if (uj == Complex{}) continue;
      const double y = d.center(j);
      if (std::abs(x - y) < cut) continue;
      s += K(x, y) * uj;
    }
    out.values[static_cast<std::size_t>(i)] = s * h;
  }
  return out;
}

Complex journe_commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f,
                               const MeshFunction& g, double epsilon) {
  const auto& d = b.domain();
  if (!(f.domain() == d) || !(g.domain() == d)) throw InvalidInput("domain mismatch");
  if (!K.tensor) throw InvalidInput("kernel has no tensor factorization");
  const auto n1 = d.cells(0), n2 = d.cells(1);
  std::vector<Complex> bx(static_cast<std::size_t>(n1));
  for (std::int64_t i1 = 0; i1 < n1; ++i1) {
    Complex m = 0.0;
    for (std::int64_t i2 = 0; i2 < n2; ++i2) m += b(i1, i2);
    m /= static_cast<double>(n2);
    double var = 0.0;
    for (std::int64_t i2 = 0; i2 < n2; ++i2) var += std::norm(b(i1, i2) - m);
    var /= static_cast<double>(n2);
    if (var > 1e-12) {
      std::ostringstream os;
      os << "symbol varies in x2 on the slice x1-cell " << i1 << " (variance " << var << ")";
      throw HypothesisError(os.str());
    }
    bx[static_cast<std::size_t>(i1)] = m;
  }
  const Kernel1d& k1 = K.tensor->first;
  const Kernel1d& k2 = K.tensor->second;
  const LineDomain line2 = axis_line(d, 1);
  const double eps = epsilon > 0.0 ? epsilon : d.width(1);
  const double h1 = d.width(0), h2 = d.width(1);

  // PV images of each x1-row of f.
  std::vector<LineFunction> tf(static_cast<std::size_t>(n1));
  std::vector<char> nonzero(static_cast<std::size_t>(n1), 0);
  for (std::int64_t y1 = 0; y1 < n1; ++y1) {
    LineFunction row(line2);
    for (std::int64_t i2 = 0; i2 < n2; ++i2) row.values[static_cast<std::size_t>(i2)] = f(y1, i2);
    if (std::any_of(row.values.begin(), row.values.end(), [](Complex z) { return z != Complex{}; })) {
      nonzero[static_cast<std::size_t>(y1)] = 1;
      tf[static_cast<std::size_t>(y1)] = truncated_pv_apply(k2, row, eps);
    }
  }
  std::vector<Complex> rows(static_cast<std::size_t>(n1));
#pragma omp parallel for schedule(static)
  for (std::int64_t x1 = 0; x1 < n1; ++x1) {
    Complex s = 0.0;
    for (std::int64_t y1 = 0; y1 < n1; ++y1) {
      if (y1 == x1 || !nonzero[static_cast<std::size_t>(y1)]) continue;
      const auto& t = tf[static_cast<std::size_t>(y1)].values;
      Complex inner = 0.0;
      for (std::int64_t i2 = 0; i2 < n2; ++i2) inner += g(x1, i2) * t[static_cast<std::size_t>(i2)];
      s += (bx[static_cast<std::size_t>(x1)] - bx[static_cast<std::size_t>(y1)]) *
           k1(d.center(0, x1), d.center(0, y1)) * inner;
    }
    rows[static_cast<std::size_t>(x1)] = s;
  }
  return pairwise_sum(rows) * (h1 * h1 * h2);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("fractional order must lie in (0, 1)");
}

}  // namespace

LineFunction fractional_integral(const LineFunction& u, double alpha) {
  check_alpha(alpha);
  const auto& d = u.domain;
  const double h = d.width();
  const double self = 2.0 * std::pow(0.5 * h, alpha) / alpha;
  LineFunction out(d);
  const auto n = d.cells();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Complex s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      s += std::pow(std::abs(static_cast<double>(i - j)) * h, alpha - 1.0) * u.values[static_cast<std::size_t>(j)];
    }
    out.values[static_cast<std::size_t>(i)] = s * h + self * u.values[static_cast<std::size_t>(i)];
  }
  return out;
}

Complex fractional_integral_at(const LineFunction& u, double alpha, double x) {
  check_alpha(alpha);
  const auto& d = u.domain;
  const double h = d.width();
  const auto n = d.cells();
  std::int64_t own = -1;
  const double rel = (x - d.origin) / h;
  if (rel >= 0.0 && rel < static_cast<double>(n)) own = static_cast<std::int64_t>(std::floor(rel));
  Complex s = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const Complex uj = u.values[static_cast<std::size_t>(j)];
    if (j == own) {
      const double a = d.origin + static_cast<double>(j) * h;
      s += uj * (std::pow(x - a, alpha) + std::pow(a + h - x, alpha)) / alpha;
    } else {
      s += uj * std::pow(std::abs(x - d.center(j)), alpha - 1.0) * h;
    }
  }
  return s;
}

Complex richardson(std::span<const Complex> sequence, int order) {
  if (sequence.empty()) throw InvalidInput("empty Richardson sequence");
  std::vector<Complex> col(sequence.begin(), sequence.end());
  for (std::size_t k = 1; k < col.size(); ++k) {
    const double factor = std::ldexp(1.0, order * static_cast<int>(k));
    for (std::size_t i = col.size() - 1; i >= k; --i) col[i] = col[i] + (col[i] - col[i - 1]) / (factor - 1.0);
  }
  return col.back();
}

RefinedForm commutator_form_refined(const PointFunction& b, const KernelSpec& K, const PointFunction& f,
                                    const DyadicRectangle& Rf, const PointFunction& g, const DyadicRectangle& Rg,
                                    const BoxDomain& base, const TruncationSchedule& schedule) {
  if (schedule.levels < 1) throw InvalidInput("at least one refinement level is required");
  RefinedForm out;
  for (int l = 0; l < schedule.levels; ++l) {
    BoxDomain d = base;
    d.depth = {base.depth[0] + l, base.depth[1] + l};
    const auto bm = MeshFunction::sample(d, b);
    const auto fm = pointwise(indicator(d, Rf), MeshFunction::sample(d, f));
    const auto gm = pointwise(indicator(d, Rg), MeshFunction::sample(d, g));
    out.levels.push_back(commutator_form(bm, K, fm, gm));
  }
  out.extrapolated = richardson(out.levels, 2);
  return out;
}

}  // namespace bpcl
