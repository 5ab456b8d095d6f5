#include "bpcl/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bpcl {

std::vector<double> haar_values(const BoxDomain& d, const HaarFunction& h) {
  const auto& I = h.interval;
  check_interval(d, I);
  if (h.kind == HaarKind::cancellative && I.level >= d.depth[I.axis])
    throw GeometryError("cancellative Haar function needs a level below the mesh depth");
  std::vector<double> v(static_cast<std::size_t>(d.cells(I.axis)), 0.0);
  const double s = 1.0 / std::sqrt(length(d, I));
  const auto b = cell_begin(d, I), e = cell_end(d, I), mid = (b + e) / 2;
  for (auto i = b; i < e; ++i)
    v[static_cast<std::size_t>(i)] = h.kind == HaarKind::noncancellative ? s : (i < mid ? s : -s);
  return v;
}

MeshFunction haar_product(const BoxDomain& d, const HaarFunction& h1, const HaarFunction& h2) {
  if (h1.interval.axis != 0 || h2.interval.axis != 1) throw InvalidInput("Haar factors must be on axes 0 and 1");
  const auto a = haar_values(d, h1), b = haar_values(d, h2);
  MeshFunction out(d);
  for (std::int64_t i1 = 0; i1 < d.cells(0); ++i1)
    for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2)
      out(i1, i2) = a[static_cast<std::size_t>(i1)] * b[static_cast<std::size_t>(i2)];
  return out;
}

std::vector<Complex> tree_analysis_1d(std::span<const Complex> u, double width, int depth, Basis basis) {
  const std::int64_t n = std::int64_t{1} << depth;
  if (static_cast<std::int64_t>(u.size()) != n) throw InvalidInput("tree transform size mismatch");
  std::vector<Complex> sums(static_cast<std::size_t>(heap_size(depth)));
  for (std::int64_t i = 0; i < n; ++i) sums[static_cast<std::size_t>(heap_id(depth, i))] = u[static_cast<std::size_t>(i)] * width;
  for (int k = depth - 1; k >= 0; --k)
    for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m)
      sums[static_cast<std::size_t>(heap_id(k, m))] =
          sums[static_cast<std::size_t>(heap_id(k + 1, 2 * m))] + sums[static_cast<std::size_t>(heap_id(k + 1, 2 * m + 1))];
  if (basis == Basis::indicator) return sums;
  std::vector<Complex> out(sums.size());
  for (int k = 0; k <= depth; ++k) {
    const double len = width * std::ldexp(1.0, depth - k);
    for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
      const auto id = static_cast<std::size_t>(heap_id(k, m));
      if (basis == Basis::average) {
        out[id] = sums[id] / len;
      } else if (k < depth) {
        out[id] = (sums[static_cast<std::size_t>(heap_id(k + 1, 2 * m))] -
                   sums[static_cast<std::size_t>(heap_id(k + 1, 2 * m + 1))]) /
                  std::sqrt(len);
      }
    }
  }
  return out;
}

std::vector<Complex> tree_synthesis_1d(std::span<const Complex> c, double width, int depth, Basis basis) {
  const std::int64_t n = std::int64_t{1} << depth;
  if (static_cast<std::int64_t>(c.size()) != heap_size(depth)) throw InvalidInput("tree synthesis size mismatch");
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Complex s = 0.0;
    for (int k = 0; k <= depth; ++k) {
      const Complex ck = c[static_cast<std::size_t>(heap_id(k, i >> (depth - k)))];
      if (ck == Complex{}) continue;
      const double len = width * std::ldexp(1.0, depth - k);
      switch (basis) {
        case Basis::indicator:
          s += ck;
          break;
        case Basis::average:
          s += ck / len;
          break;
        case Basis::haar:
          if (k < depth) s += (((i >> (depth - k - 1)) & 1) == 0 ? ck : -ck) / std::sqrt(len);
          break;
      }
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

DyadicTable analyze(const MeshFunction& f, Basis b1, Basis b2) {
  const auto& d = f.domain();
  DyadicTable t(d);
  const auto n1 = d.cells(0), n2 = d.cells(1);
  std::vector<Complex> rows(static_cast<std::size_t>(n1 * t.ids2));
#pragma omp parallel for schedule(static)
  for (std::int64_t i1 = 0; i1 < n1; ++i1) {
    std::vector<Complex> row(static_cast<std::size_t>(n2));
    for (std::int64_t i2 = 0; i2 < n2; ++i2) row[static_cast<std::size_t>(i2)] = f(i1, i2);
    const auto c = tree_analysis_1d(row, d.width(1), d.depth[1], b2);
    std::copy(c.begin(), c.end(), rows.begin() + i1 * t.ids2);
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t id2 = 0; id2 < t.ids2; ++id2) {
    std::vector<Complex> col(static_cast<std::size_t>(n1));
    for (std::int64_t i1 = 0; i1 < n1; ++i1) col[static_cast<std::size_t>(i1)] = rows[static_cast<std::size_t>(i1 * t.ids2 + id2)];
    const auto c = tree_analysis_1d(col, d.width(0), d.depth[0], b1);
    for (std::int64_t id1 = 0; id1 < t.ids1; ++id1) t.at(id1, id2) = c[static_cast<std::size_t>(id1)];
  }
  return t;
}

MeshFunction synthesize(const DyadicTable& t, Basis b1, Basis b2) {
  const auto& d = t.domain;
  const auto n1 = d.cells(0), n2 = d.cells(1);
  std::vector<Complex> partial(static_cast<std::size_t>(t.ids1 * n2));
#pragma omp parallel for schedule(static)
  for (std::int64_t id1 = 0; id1 < t.ids1; ++id1) {
    std::span<const Complex> row(t.data.data() + id1 * t.ids2, static_cast<std::size_t>(t.ids2));
    const auto v = tree_synthesis_1d(row, d.width(1), d.depth[1], b2);
    std::copy(v.begin(), v.end(), partial.begin() + id1 * n2);
  }
  MeshFunction out(d);
#pragma omp parallel for schedule(static)
  for (std::int64_t i2 = 0; i2 < n2; ++i2) {
    std::vector<Complex> col(static_cast<std::size_t>(t.ids1));
    for (std::int64_t id1 = 0; id1 < t.ids1; ++id1) col[static_cast<std::size_t>(id1)] = partial[static_cast<std::size_t>(id1 * n2 + i2)];
    const auto v = tree_synthesis_1d(col, d.width(0), d.depth[0], b1);
    for (std::int64_t i1 = 0; i1 < n1; ++i1) out(i1, i2) = v[static_cast<std::size_t>(i1)];
  }
  return out;
}

namespace {

// Terms (interval id, weight) expressing O_I g(x) = sum w <g>_P along one axis at cell i.
// expectation: <g>_I; difference: <g>_{child} - <g>_I.
struct AxisTerm {
  std::int64_t id;
  double w;
};

int axis_terms(int level, std::int64_t index, bool difference, int depth, std::int64_t cell, AxisTerm* out) {
  if (!difference) {
    out[0] = {heap_id(level, index), 1.0};
    return 1;
  }
  const std::int64_t childIndex = cell >> (depth - level - 1);
  out[0] = {heap_id(level + 1, childIndex), 1.0};
  out[1] = {heap_id(level, index), -1.0};
  return 2;
}

// Adds O_I O'_J f on the cells of I x J, using the table of rectangle averages.
void add_composite(const DyadicTable& avg, const DyadicInterval& I, bool dI, const DyadicInterval& J, bool dJ,
                   MeshFunction& out) {
  const auto& d = avg.domain;
  AxisTerm t1[2], t2[2];
  for (auto i1 = cell_begin(d, I); i1 < cell_end(d, I); ++i1) {
    const int c1 = axis_terms(I.level, I.index, dI, d.depth[0], i1, t1);
    for (auto i2 = cell_begin(d, J); i2 < cell_end(d, J); ++i2) {
      const int c2 = axis_terms(J.level, J.index, dJ, d.depth[1], i2, t2);
      Complex s = 0.0;
      for (int a = 0; a < c1; ++a)
        for (int b = 0; b < c2; ++b) s += t1[a].w * t2[b].w * avg.at(t1[a].id, t2[b].id);
      out(i1, i2) += s;
    }
  }
}

DyadicInterval full_interval(int axis) { return {axis, 0, 0}; }

}  // namespace

MeshFunction martingale_diff(const MeshFunction& f, const DyadicInterval& I) {
  const auto& d = f.domain();
  check_interval(d, I);
  if (I.level >= d.depth[I.axis]) throw GeometryError("martingale difference below the mesh depth");
  const auto avg = analyze(f, Basis::average, Basis::average);
  MeshFunction out(d);
  const int other = 1 - I.axis;
  // Full-depth intervals on the other axis act as the identity.
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    const DyadicInterval cellJ{other, d.depth[other], j};
    if (I.axis == 0)
      add_composite(avg, I, true, cellJ, false, out);
    else
      add_composite(avg, cellJ, false, I, true, out);
  }
  return out;
}

MeshFunction martingale_diff(const MeshFunction& f, const DyadicRectangle& R) {
  const auto& d = f.domain();
  check_rectangle(d, R);
  if (R.I.level >= d.depth[0] || R.J.level >= d.depth[1])
    throw GeometryError("martingale difference below the mesh depth");
  const auto avg = analyze(f, Basis::average, Basis::average);
  MeshFunction out(d);
  add_composite(avg, R.I, true, R.J, true, out);
  return out;
}

MeshFunction martingale_reconstruct(const MeshFunction& f, int axis) {
  const auto& d = f.domain();
  const auto avg = analyze(f, Basis::average, Basis::average);
  MeshFunction out(d);
  const int other = 1 - axis;
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    const DyadicInterval cellJ{other, d.depth[other], j};
    auto add = [&](const DyadicInterval& I, bool diff) {
      if (axis == 0)
        add_composite(avg, I, diff, cellJ, false, out);
      else
        add_composite(avg, cellJ, false, I, diff, out);
    };
    add(full_interval(axis), false);
    for (int k = 0; k < d.depth[axis]; ++k)
      for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) add({axis, k, m}, true);
  }
  return out;
}

MeshFunction martingale_reconstruct(const MeshFunction& f) {
  const auto& d = f.domain();
  const auto avg = analyze(f, Basis::average, Basis::average);
  MeshFunction out(d);
  // Each axis: the top expectation plus every difference.
  std::vector<std::pair<DyadicInterval, bool>> ops[2];
  for (int a = 0; a < 2; ++a) {
    ops[a].push_back({full_interval(a), false});
    for (int k = 0; k < d.depth[a]; ++k)
      for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) ops[a].push_back({{a, k, m}, true});
  }
  for (const auto& [I, dI] : ops[0])
    for (const auto& [J, dJ] : ops[1]) add_composite(avg, I, dI, J, dJ, out);
  return out;
}

MeshFunction square_function(const MeshFunction& f, SquareKind which) {
  const auto& d = f.domain();
  if (which == SquareKind::S) {
    auto t = analyze(f, Basis::haar, Basis::haar);
    for (int k1 = 0; k1 <= d.depth[0]; ++k1)
      for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1)
        for (int k2 = 0; k2 <= d.depth[1]; ++k2)
          for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) {
            auto& c = t.at(heap_id(k1, m1), heap_id(k2, m2));
            const double area = d.extent[0] * std::ldexp(1.0, -k1) * d.extent[1] * std::ldexp(1.0, -k2);
            c = std::norm(c) / area;
          }
    auto out = synthesize(t, Basis::indicator, Basis::indicator);
    for (auto& v : out.values()) v = std::sqrt(std::max(0.0, v.real()));
    return out;
  }
  const int axis = which == SquareKind::S1 ? 0 : 1;
  const int other = 1 - axis;
  MeshFunction out(d);
  const int L = d.depth[axis];
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    std::vector<Complex> slice(static_cast<std::size_t>(d.cells(axis)));
    for (std::int64_t i = 0; i < d.cells(axis); ++i) slice[static_cast<std::size_t>(i)] = axis == 0 ? f(i, j) : f(j, i);
    auto c = tree_analysis_1d(slice, d.width(axis), L, Basis::haar);
    for (int k = 0; k <= L; ++k)
      for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
        auto& v = c[static_cast<std::size_t>(heap_id(k, m))];
        v = std::norm(v) / (d.extent[axis] * std::ldexp(1.0, -k));
      }
    const auto s = tree_synthesis_1d(c, d.width(axis), L, Basis::indicator);
    for (std::int64_t i = 0; i < d.cells(axis); ++i) {
      const double v = std::sqrt(std::max(0.0, s[static_cast<std::size_t>(i)].real()));
      if (axis == 0)
        out(i, j) = v;
      else
        out(j, i) = v;
    }
  }
  return out;
}

namespace {

// One-axis fractional dyadic maximal function of |slice|.
std::vector<double> maximal_1d(std::span<const Complex> u, double width, int depth, double alpha) {
  std::vector<Complex> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = std::abs(u[i]);
  const auto avg = tree_analysis_1d(a, width, depth, Basis::average);
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double m = 0.0;
    for (int k = 0; k <= depth; ++k) {
      const double len = width * std::ldexp(1.0, depth - k);
      const double v = avg[static_cast<std::size_t>(heap_id(k, static_cast<std::int64_t>(i) >> (depth - k)))].real();
      m = std::max(m, (alpha == 0.0 ? 1.0 : std::pow(len, alpha)) * v);
    }
    out[i] = m;
  }
  return out;
}

void check_maximal_alpha(double alpha, double dim) {
  if (!(alpha >= 0.0 && alpha < dim)) throw InvalidInput("fractional maximal order must lie in [0, d)");
}

}  // namespace

MeshFunction maximal(const MeshFunction& f, const MaximalSpec& spec) {
  const auto& d = f.domain();
  MeshFunction out(d);
  auto along_axis = [&](int axis, double alpha) {
    const int other = 1 - axis;
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < d.cells(other); ++j) {
      std::vector<Complex> slice(static_cast<std::size_t>(d.cells(axis)));
      for (std::int64_t i = 0; i < d.cells(axis); ++i) slice[static_cast<std::size_t>(i)] = axis == 0 ? f(i, j) : f(j, i);
      const auto m = maximal_1d(slice, d.width(axis), d.depth[axis], alpha);
      for (std::int64_t i = 0; i < d.cells(axis); ++i) (axis == 0 ? out(i, j) : out(j, i)) = m[static_cast<std::size_t>(i)];
    }
  };
  switch (spec.kind) {
    case MaximalKind::M1:
      along_axis(0, 0.0);
      break;
    case MaximalKind::M2:
      along_axis(1, 0.0);
      break;
    case MaximalKind::strong: {
      MeshFunction a(d);
      for (std::size_t i = 0; i < a.values().size(); ++i) a.values()[i] = std::abs(f.values()[i]);
      const auto t = analyze(a, Basis::average, Basis::average);
#pragma omp parallel for schedule(static)
      for (std::int64_t i1 = 0; i1 < d.cells(0); ++i1)
        for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2) {
          double m = 0.0;
          for (int k1 = 0; k1 <= d.depth[0]; ++k1)
            for (int k2 = 0; k2 <= d.depth[1]; ++k2)
              m = std::max(m, t.at(heap_id(k1, i1 >> (d.depth[0] - k1)), heap_id(k2, i2 >> (d.depth[1] - k2))).real());
          out(i1, i2) = m;
        }
      break;
    }
    case MaximalKind::fractional:
      if (spec.axis) {
        check_maximal_alpha(spec.alpha, 1.0);
        along_axis(*spec.axis, spec.alpha);
      } else {
        check_maximal_alpha(spec.alpha, 2.0);
        return cube_maximal(CubeField::from_mesh(f), spec.alpha).to_mesh();
      }
      break;
  }
  return out;
}

CubeField CubeField::from_line(const LineFunction& u) {
  CubeField c;
  c.grid = {1, u.domain.depth, u.domain.extent, {u.domain.origin, 0.0}};
  c.values = u.values;
  return c;
}

CubeField CubeField::from_mesh(const MeshFunction& f) {
  const auto& d = f.domain();
  if (d.depth[0] != d.depth[1] || d.extent[0] != d.extent[1])
    throw InvalidInput("one-parameter cube view needs a square box with equal depths");
  CubeField c;
  c.grid = {2, d.depth[0], d.extent[0], d.origin};
  c.values = f.values();
  return c;
}

CubeField CubeField::from_slice(const MeshFunction& f, int axis, std::int64_t slice) {
  const auto& d = f.domain();
  LineFunction u(axis_line(d, axis));
  for (std::int64_t i = 0; i < d.cells(axis); ++i) u.values[static_cast<std::size_t>(i)] = axis == 0 ? f(i, slice) : f(slice, i);
  return from_line(u);
}

MeshFunction CubeField::to_mesh() const {
  if (grid.dim != 2) throw InvalidInput("not a two-dimensional cube field");
  BoxDomain d;
  d.origin = grid.origin;
  d.extent = {grid.extent, grid.extent};
  d.depth = {grid.depth, grid.depth};
  return MeshFunction(d, values);
}

LineFunction CubeField::to_line() const {
  if (grid.dim != 1) throw InvalidInput("not a one-dimensional cube field");
  return LineFunction({grid.origin[0], grid.extent, grid.depth}, values);
}

bool cube_contains_cell(const CubeGrid& g, const Cube& Q, std::size_t cell) {
  const int sh = g.depth - Q.level;
  if (g.dim == 1) return (static_cast<std::int64_t>(cell) >> sh) == Q.m1;
  const auto i1 = static_cast<std::int64_t>(cell) / g.side(), i2 = static_cast<std::int64_t>(cell) % g.side();
  return (i1 >> sh) == Q.m1 && (i2 >> sh) == Q.m2;
}

std::vector<std::size_t> cube_cells(const CubeGrid& g, const Cube& Q) {
  const int sh = g.depth - Q.level;
  const std::int64_t w = std::int64_t{1} << sh;
  std::vector<std::size_t> out;
  if (g.dim == 1) {
    for (std::int64_t i = Q.m1 * w; i < (Q.m1 + 1) * w; ++i) out.push_back(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i1 = Q.m1 * w; i1 < (Q.m1 + 1) * w; ++i1)
      for (std::int64_t i2 = Q.m2 * w; i2 < (Q.m2 + 1) * w; ++i2)
        out.push_back(static_cast<std::size_t>(i1 * g.side() + i2));
  }
  return out;
}

Complex CubeSums::sum(const Cube& Q) const {
  const std::int64_t per = std::int64_t{1} << Q.level;
  const std::int64_t idx = grid.dim == 1 ? Q.m1 : Q.m1 * per + Q.m2;
  return level_sums[static_cast<std::size_t>(Q.level)][static_cast<std::size_t>(idx)];
}

CubeSums cube_sums(const CubeField& f) {
  CubeSums s;
  s.grid = f.grid;
  const int L = f.grid.depth;
  s.level_sums.resize(static_cast<std::size_t>(L + 1));
  auto& fine = s.level_sums[static_cast<std::size_t>(L)];
  fine.resize(f.values.size());
  for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = f.values[i] * f.grid.cell_measure();
  for (int k = L - 1; k >= 0; --k) {
    const std::int64_t per = std::int64_t{1} << k;
    const auto& up = s.level_sums[static_cast<std::size_t>(k + 1)];
    auto& cur = s.level_sums[static_cast<std::size_t>(k)];
    if (f.grid.dim == 1) {
      cur.resize(static_cast<std::size_t>(per));
      for (std::int64_t m = 0; m < per; ++m)
        cur[static_cast<std::size_t>(m)] = up[static_cast<std::size_t>(2 * m)] + up[static_cast<std::size_t>(2 * m + 1)];
    } else {
      cur.resize(static_cast<std::size_t>(per * per));
      const std::int64_t pu = 2 * per;
      for (std::int64_t m1 = 0; m1 < per; ++m1)
        for (std::int64_t m2 = 0; m2 < per; ++m2) {
          const auto a = static_cast<std::size_t>((2 * m1) * pu + 2 * m2);
          const auto b = static_cast<std::size_t>((2 * m1 + 1) * pu + 2 * m2);
          cur[static_cast<std::size_t>(m1 * per + m2)] = (up[a] + up[a + 1]) + (up[b] + up[b + 1]);
        }
    }
  }
  return s;
}

CubeField cube_abs(const CubeField& f) {
  CubeField a = f;
  for (auto& v : a.values) v = std::abs(v);
  return a;
}

CubeField cube_maximal(const CubeField& f, double alpha) {
  check_maximal_alpha(alpha, static_cast<double>(f.grid.dim));
  const auto s = cube_sums(cube_abs(f));
  CubeField out = f;
  const auto& g = f.grid;
  const int L = g.depth;
  const auto n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    const std::int64_t i1 = g.dim == 1 ? c : c / g.side();
    const std::int64_t i2 = g.dim == 1 ? 0 : c % g.side();
    double m = 0.0;
    for (int k = 0; k <= L; ++k) {
      const Cube Q{k, i1 >> (L - k), g.dim == 1 ? 0 : i2 >> (L - k)};
      const double w = alpha == 0.0 ? 1.0 : std::pow(g.length(k), alpha);
      m = std::max(m, w * s.average(Q).real());
    }
    out.values[static_cast<std::size_t>(c)] = m;
  }
  return out;
}

LineFunction maximal(const LineFunction& u, double alpha) { return cube_maximal(CubeField::from_line(u), alpha).to_line(); }

std::vector<Complex> SparseCollection::piece(std::size_t node) const {
  const auto& g = field.grid;
  const auto& P = nodes[node];
  std::vector<Complex> out(g.size(), 0.0);
  for (auto c : cube_cells(g, P.cube)) {
    Complex v = field.values[c] - P.average;
    for (int ch : P.children)
      if (cube_contains_cell(g, nodes[static_cast<std::size_t>(ch)].cube, c)) {
        v = nodes[static_cast<std::size_t>(ch)].average - P.average;
        break;
      }
    out[c] = v;
  }
  return out;
}

bool SparseCollection::in_e_set(std::size_t node, std::size_t cell) const {
  const auto& P = nodes[node];
  if (!cube_contains_cell(field.grid, P.cube, cell)) return false;
  for (int ch : P.children)
    if (cube_contains_cell(field.grid, nodes[static_cast<std::size_t>(ch)].cube, cell)) return false;
  return true;
}

SparseCollection sparse_stopping(const CubeField& f, const Cube& root, double mean_tolerance) {
  const auto& g = f.grid;
  if (root.level < 0 || root.level > g.depth) throw GeometryError("root cube outside the mesh depth");
  for (std::size_t c = 0; c < f.values.size(); ++c)
    if (f.values[c] != Complex{} && !cube_contains_cell(g, root, c))
      throw PreconditionError("function is not supported in the root cube");
  const auto sums = cube_sums(f);
  const auto abs_sums = cube_sums(cube_abs(f));
  const double l1 = abs_sums.sum(root).real();
  if (std::abs(sums.sum(root)) > mean_tolerance * std::max(l1, 1e-300) && l1 > 0.0) {
    std::ostringstream os;
    os << "function mean " << std::abs(sums.sum(root)) << " exceeds tolerance";
    throw PreconditionError(os.str());
  }

  SparseCollection S;
  S.field = f;
  S.root = root;
  auto make_node = [&](const Cube& Q, int gen, int parent) {
    SparseNode n;
    n.cube = Q;
    n.generation = gen;
    n.parent = parent;
    n.measure = g.cube_measure(Q.level);
    n.avg_abs = abs_sums.average(Q).real();
    n.average = sums.average(Q);
    return n;
  };
  S.nodes.push_back(make_node(root, 0, -1));
  const int fan = g.dim == 1 ? 2 : 4;
  auto children_of = [&](const Cube& Q) {
    std::vector<Cube> out;
    for (int c = 0; c < fan; ++c) {
      if (g.dim == 1)
        out.push_back({Q.level + 1, 2 * Q.m1 + c, 0});
      else
        out.push_back({Q.level + 1, 2 * Q.m1 + c / 2, 2 * Q.m2 + c % 2});
    }
    return out;
  };
  for (std::size_t p = 0; p < S.nodes.size(); ++p) {
    const double threshold = 2.0 * S.nodes[p].avg_abs;
    const Cube P = S.nodes[p].cube;
    const int gen = S.nodes[p].generation;
    std::vector<Cube> stack;
    if (P.level < g.depth) {
      auto ch = children_of(P);
      stack.assign(ch.rbegin(), ch.rend());
    }
    while (!stack.empty()) {
      const Cube Q = stack.back();
      stack.pop_back();
      if (abs_sums.average(Q).real() > threshold) {
        S.nodes[p].children.push_back(static_cast<int>(S.nodes.size()));
        S.nodes.push_back(make_node(Q, gen + 1, static_cast<int>(p)));
      } else if (Q.level < g.depth) {
        auto ch = children_of(Q);
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
      }
    }
  }
  for (std::size_t p = 0; p < S.nodes.size(); ++p) {
    auto& n = S.nodes[p];
    double covered = 0.0;
    for (int ch : n.children) covered += S.nodes[static_cast<std::size_t>(ch)].measure;
    n.e_measure = n.measure - covered;
    const auto pc = S.piece(p);
    double m = 0.0;
    for (auto c : cube_cells(g, n.cube)) m = std::max(m, std::abs(pc[c]));
    n.piece_sup = m;
    S.generations = std::max(S.generations, n.generation + 1);
  }
  return S;
}

double sparse_domination_ratio(const SparseCollection& S, double s) {
  const auto& g = S.field.grid;
  const auto M = cube_maximal(S.field, 0.0);
  std::vector<double> lhs(g.size(), 0.0);
  for (const auto& n : S.nodes) {
    if (n.piece_sup == 0.0) continue;
    const double w = std::pow(n.piece_sup, s);
    for (auto c : cube_cells(g, n.cube)) lhs[c] += w;
  }
  double r = 0.0;
  for (std::size_t c = 0; c < lhs.size(); ++c) {
    if (lhs[c] == 0.0) continue;
    const double m = M.values[c].real();
    r = std::max(r, m > 0.0 ? lhs[c] / std::pow(m, s) : kInf);
  }
  return r;
}

}  // namespace bpcl
