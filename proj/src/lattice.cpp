#include "bpcl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpcl/kernels.hpp"

namespace bpcl {

BoxDomain BoxDomain::square(double extent, int depth, double origin) {
  BoxDomain d;
  d.origin = {origin, origin};
  d.extent = {extent, extent};
  d.depth = {depth, depth};
  d.validate();
  return d;
}

void BoxDomain::validate() const {
  for (int a = 0; a < 2; ++a) {
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a]) || !std::isfinite(origin[a]))
      throw InvalidInput("box extent must be positive and finite");
    if (depth[a] < 1 || depth[a] > 14) throw InvalidInput("mesh depth must lie in [1, 14]");
  }
}

double length(const BoxDomain& d, const DyadicInterval& I) {
  return d.extent[I.axis] * std::ldexp(1.0, -I.level);
}

double left_end(const BoxDomain& d, const DyadicInterval& I) {
  return d.origin[I.axis] + static_cast<double>(I.index) * length(d, I);
}

double center(const BoxDomain& d, const DyadicInterval& I) { return left_end(d, I) + 0.5 * length(d, I); }

void check_interval(const BoxDomain& d, const DyadicInterval& I) {
  if (I.axis < 0 || I.axis > 1) throw GeometryError("interval axis must be 0 or 1");
  if (I.level < 0 || I.level > d.depth[I.axis]) {
    std::ostringstream os;
    os << "interval level " << I.level << " outside [0, " << d.depth[I.axis] << "]";
    throw GeometryError(os.str());
  }
  if (I.index < 0 || I.index >= (std::int64_t{1} << I.level)) {
    std::ostringstream os;
    os << "interval index " << I.index << " outside the box at level " << I.level;
    throw GeometryError(os.str());
  }
}

std::int64_t cell_begin(const BoxDomain& d, const DyadicInterval& I) {
  return I.index << (d.depth[I.axis] - I.level);
}

std::int64_t cell_end(const BoxDomain& d, const DyadicInterval& I) {
  return (I.index + 1) << (d.depth[I.axis] - I.level);
}

DyadicInterval parent(const DyadicInterval& I) {
  if (I.level == 0) throw GeometryError("top interval has no parent");
  return {I.axis, I.level - 1, I.index >> 1};
}

DyadicInterval child(const DyadicInterval& I, int side) { return {I.axis, I.level + 1, 2 * I.index + side}; }

bool contains(const DyadicInterval& I, const DyadicInterval& J) {
  if (I.axis != J.axis || J.level < I.level) return false;
  return (J.index >> (J.level - I.level)) == I.index;
}

DyadicInterval interval_of_cell(const BoxDomain& d, int axis, int level, std::int64_t cell) {
  return {axis, level, cell >> (d.depth[axis] - level)};
}

DyadicRectangle make_rectangle(int level1, std::int64_t index1, int level2, std::int64_t index2) {
  return {{0, level1, index1}, {1, level2, index2}};
}

double measure(const BoxDomain& d, const DyadicRectangle& R) { return length(d, R.I) * length(d, R.J); }

Point center(const BoxDomain& d, const DyadicRectangle& R) { return {center(d, R.I), center(d, R.J)}; }

void check_rectangle(const BoxDomain& d, const DyadicRectangle& R) {
  if (R.I.axis != 0 || R.J.axis != 1) throw GeometryError("rectangle sides must be on axes 0 and 1");
  check_interval(d, R.I);
  check_interval(d, R.J);
}

std::string describe(const DyadicRectangle& R) {
  std::ostringstream os;
  os << "I(level " << R.I.level << ", index " << R.I.index << ") x J(level " << R.J.level << ", index "
     << R.J.index << ")";
  return os.str();
}

MeshFunction::MeshFunction(const BoxDomain& d) : domain_(d), values_(d.size()) { d.validate(); }

MeshFunction::MeshFunction(const BoxDomain& d, std::vector<Complex> values) : domain_(d), values_(std::move(values)) {
  d.validate();
  if (values_.size() != d.size()) throw InvalidInput("value count does not match the mesh");
}

Complex MeshFunction::integral() const { return pairwise_sum(values_) * domain_.cell_area(); }

double MeshFunction::l1() const {
  std::vector<double> a(values_.size());
  std::transform(values_.begin(), values_.end(), a.begin(), [](Complex z) { return std::abs(z); });
  return pairwise_sum(a) * domain_.cell_area();
}

double MeshFunction::sup() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

bool MeshFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex z) { return z == Complex{}; });
}

MeshFunction& MeshFunction::operator+=(const MeshFunction& o) {
  if (!(o.domain_ == domain_)) throw InvalidInput("domain mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

MeshFunction& MeshFunction::operator-=(const MeshFunction& o) {
  if (!(o.domain_ == domain_)) throw InvalidInput("domain mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

MeshFunction& MeshFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

MeshFunction operator+(MeshFunction a, const MeshFunction& b) { return a += b; }
MeshFunction operator-(MeshFunction a, const MeshFunction& b) { return a -= b; }
MeshFunction operator*(Complex c, MeshFunction a) { return a *= c; }

MeshFunction pointwise(const MeshFunction& a, const MeshFunction& b) {
  if (!(a.domain() == b.domain())) throw InvalidInput("domain mismatch");
  MeshFunction out(a.domain());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

MeshFunction indicator(const BoxDomain& d, const DyadicRectangle& R) {
  check_rectangle(d, R);
  MeshFunction out(d);
  for (auto i1 = cell_begin(d, R.I); i1 < cell_end(d, R.I); ++i1)
    for (auto i2 = cell_begin(d, R.J); i2 < cell_end(d, R.J); ++i2) out(i1, i2) = 1.0;
  return out;
}

MeshFunction restrict_to(const MeshFunction& f, const DyadicRectangle& R) {
  const auto& d = f.domain();
  check_rectangle(d, R);
  MeshFunction out(d);
  for (auto i1 = cell_begin(d, R.I); i1 < cell_end(d, R.I); ++i1)
    for (auto i2 = cell_begin(d, R.J); i2 < cell_end(d, R.J); ++i2) out(i1, i2) = f(i1, i2);
  return out;
}

Complex pairing(const MeshFunction& f, const MeshFunction& g) { return pointwise(f, g).integral(); }

double max_abs_diff(const MeshFunction& a, const MeshFunction& b) {
  if (!(a.domain() == b.domain())) throw InvalidInput("domain mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

void ExponentProfile::validate() const {
  for (double e : {p1, p2, q1, q2})
    if (!(e > 1.0) || !std::isfinite(e)) throw InvalidInput("exponents must lie in (1, inf)");
}

Relation ExponentProfile::relation(int axis) const {
  const double a = p(axis), b = q(axis);
  if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return Relation::equal;
  return a < b ? Relation::less : Relation::greater;
}

double ExponentProfile::alpha(int axis) const {
  return relation(axis) == Relation::less ? gap(axis) : 0.0;
}

double ExponentProfile::r(int axis) const {
  return relation(axis) == Relation::greater ? 1.0 / (-gap(axis)) : kInf;
}

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0)) throw InvalidInput("norm exponent must lie in [1, inf]");
}

// Norm of a strided sequence with quadrature weight w.
double seq_norm(const double* a, std::size_t n, double p, double w) {
  if (p == kInf) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, a[i]);
    return m;
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::pow(a[i], p);
  return std::pow(pairwise_sum(t) * w, 1.0 / p);
}

}  // namespace

double mixed_norm(const MeshFunction& f, double p1, double p2) { return mixed_norm(f, MixedNormSpec{0, p1, p2}); }

double mixed_norm(const MeshFunction& f, const MixedNormSpec& spec) {
  check_exponent(spec.p_outer);
  check_exponent(spec.p_inner);
  const auto& d = f.domain();
  const int outer = spec.outer_axis;
  const int inner = 1 - outer;
  const auto no = d.cells(outer), ni = d.cells(inner);
  std::vector<double> inner_norms(static_cast<std::size_t>(no));
  bool finite = true;
#pragma omp parallel for schedule(static) reduction(&& : finite)
  for (std::int64_t o = 0; o < no; ++o) {
    std::vector<double> slice(static_cast<std::size_t>(ni));
    for (std::int64_t i = 0; i < ni; ++i) {
      const Complex z = outer == 0 ? f(o, i) : f(i, o);
      finite = finite && std::isfinite(z.real()) && std::isfinite(z.imag());
      slice[static_cast<std::size_t>(i)] = std::abs(z);
    }
    inner_norms[static_cast<std::size_t>(o)] = seq_norm(slice.data(), slice.size(), spec.p_inner, d.width(inner));
  }
  if (!finite) throw InvalidInput("non-finite sample value in mixed norm");
  return seq_norm(inner_norms.data(), inner_norms.size(), spec.p_outer, d.width(outer));
}

Complex rectangle_mean(const MeshFunction& f, const DyadicRectangle& R) {
  const auto& d = f.domain();
  check_rectangle(d, R);
  const auto b1 = cell_begin(d, R.I), e1 = cell_end(d, R.I);
  const auto b2 = cell_begin(d, R.J), e2 = cell_end(d, R.J);
  std::vector<Complex> rows(static_cast<std::size_t>(e1 - b1));
  for (auto i1 = b1; i1 < e1; ++i1) {
    Complex s = 0.0;
    for (auto i2 = b2; i2 < e2; ++i2) s += f(i1, i2);
    rows[static_cast<std::size_t>(i1 - b1)] = s;
  }
  return pairwise_sum(rows) / static_cast<double>((e1 - b1) * (e2 - b2));
}

double oscillation(const MeshFunction& b, const DyadicRectangle& R) {
  const Complex m = rectangle_mean(b, R);
  const auto& d = b.domain();
  const auto b1 = cell_begin(d, R.I), e1 = cell_end(d, R.I);
  const auto b2 = cell_begin(d, R.J), e2 = cell_end(d, R.J);
  std::vector<double> rows(static_cast<std::size_t>(e1 - b1));
  for (auto i1 = b1; i1 < e1; ++i1) {
    double s = 0.0;
    for (auto i2 = b2; i2 < e2; ++i2) s += std::abs(b(i1, i2) - m);
    rows[static_cast<std::size_t>(i1 - b1)] = s;
  }
  return pairwise_sum(rows) / static_cast<double>((e1 - b1) * (e2 - b2));
}

DyadicRectangle reflect_rectangle(const BoxDomain& d, const DyadicRectangle& R, double A, const KernelSpec& K) {
  if (!(A >= 3.0)) throw InvalidInput("reflection parameter A must be at least 3");
  check_rectangle(d, R);
  const double l1 = length(d, R.I), l2 = length(d, R.J);
  const Point y = nondegenerate_witness(K, center(d, R), A * l1, A * l2);
  DyadicRectangle out = R;
  const double ls[2] = {l1, l2};
  DyadicInterval* sides[2] = {&out.I, &out.J};
  for (int a = 0; a < 2; ++a) {
    const double pos = (y[a] - d.origin[a]) / ls[a] - 0.5;
    const double idx = std::round(pos);
    if (std::abs(idx - pos) > 1e-9) throw InvalidInput("witness point is not aligned with the dyadic grid");
    if (idx < 0 || idx >= std::ldexp(1.0, sides[a]->level)) {
      std::ostringstream os;
      os << "reflected rectangle of " << describe(R) << " escapes the box on axis " << a;
      throw GeometryError(os.str());
    }
    sides[a]->index = static_cast<std::int64_t>(idx);
  }
  return out;
}

std::vector<DyadicRectangle> reflectable_rectangles(const BoxDomain& d, double A, const KernelSpec& K, int min_level,
                                                    int max_level) {
  std::vector<DyadicRectangle> out;
  for (int k1 = min_level; k1 <= std::min(max_level, d.depth[0]); ++k1)
    for (int k2 = min_level; k2 <= std::min(max_level, d.depth[1]); ++k2)
      for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1)
        for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) {
          const auto R = make_rectangle(k1, m1, k2, m2);
          try {
            reflect_rectangle(d, R, A, K);
            out.push_back(R);
          } catch (const GeometryError&) {
          }
        }
  return out;
}

void LineDomain::validate() const {
  if (!(extent > 0.0) || !std::isfinite(extent)) throw InvalidInput("line extent must be positive");
  if (depth < 1 || depth > 24) throw InvalidInput("line depth must lie in [1, 24]");
}

LineFunction::LineFunction(const LineDomain& d, std::vector<Complex> v) : domain(d), values(std::move(v)) {
  d.validate();
  if (values.size() != static_cast<std::size_t>(d.cells())) throw InvalidInput("value count does not match the line");
}

double lp_norm(const LineFunction& u, double p) {
  check_exponent(p);
  std::vector<double> a(u.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(u.values[i]);
  return seq_norm(a.data(), a.size(), p, u.domain.width());
}

LineDomain axis_line(const BoxDomain& d, int axis) { return {d.origin[axis], d.extent[axis], d.depth[axis]}; }

namespace {

template <class T>
T pairwise_impl(const T* v, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_impl(v, h) + pairwise_impl(v + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v.data(), v.size()); }
Complex pairwise_sum(std::span<const Complex> v) { return pairwise_impl(v.data(), v.size()); }

}  // namespace bpcl
