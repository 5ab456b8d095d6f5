#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bpcl/core.hpp"

namespace bpcl {

struct KernelSpec;

// Axes are 0-based in the C++ API (axis 0 is x1, axis 1 is x2).
struct BoxDomain {
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> depth{1, 1};

  static BoxDomain square(double extent, int depth, double origin = 0.0);

  void validate() const;
  std::int64_t cells(int axis) const { return std::int64_t{1} << depth[axis]; }
  double width(int axis) const { return extent[axis] / static_cast<double>(cells(axis)); }
  double center(int axis, std::int64_t i) const {
    return origin[axis] + (static_cast<double>(i) + 0.5) * width(axis);
  }
  std::size_t size() const { return static_cast<std::size_t>(cells(0) * cells(1)); }
  double cell_area() const { return width(0) * width(1); }
  bool operator==(const BoxDomain&) const = default;
};

struct DyadicInterval {
  int axis = 0;
  int level = 0;
  std::int64_t index = 0;
  bool operator==(const DyadicInterval&) const = default;
};

double length(const BoxDomain& d, const DyadicInterval& I);
double left_end(const BoxDomain& d, const DyadicInterval& I);
double center(const BoxDomain& d, const DyadicInterval& I);
// Throws GeometryError when I is not an in-box interval at depth <= mesh depth.
void check_interval(const BoxDomain& d, const DyadicInterval& I);
std::int64_t cell_begin(const BoxDomain& d, const DyadicInterval& I);
std::int64_t cell_end(const BoxDomain& d, const DyadicInterval& I);
DyadicInterval parent(const DyadicInterval& I);
DyadicInterval child(const DyadicInterval& I, int side);
// True when J is contained in I (same axis).
bool contains(const DyadicInterval& I, const DyadicInterval& J);
DyadicInterval interval_of_cell(const BoxDomain& d, int axis, int level, std::int64_t cell);

struct DyadicRectangle {
  DyadicInterval I{0, 0, 0};
  DyadicInterval J{1, 0, 0};
  bool operator==(const DyadicRectangle&) const = default;
};

DyadicRectangle make_rectangle(int level1, std::int64_t index1, int level2, std::int64_t index2);
double measure(const BoxDomain& d, const DyadicRectangle& R);
Point center(const BoxDomain& d, const DyadicRectangle& R);
void check_rectangle(const BoxDomain& d, const DyadicRectangle& R);
std::string describe(const DyadicRectangle& R);

class MeshFunction {
 public:
  MeshFunction() = default;
  explicit MeshFunction(const BoxDomain& d);
  MeshFunction(const BoxDomain& d, std::vector<Complex> values);

  template <class F>
  static MeshFunction sample(const BoxDomain& d, F&& fn) {
    MeshFunction out(d);
    for (std::int64_t i1 = 0; i1 < d.cells(0); ++i1)
      for (std::int64_t i2 = 0; i2 < d.cells(1); ++i2)
        out(i1, i2) = Complex(fn(d.center(0, i1), d.center(1, i2)));
    return out;
  }

  const BoxDomain& domain() const { return domain_; }
  std::int64_t n1() const { return domain_.cells(0); }
  std::int64_t n2() const { return domain_.cells(1); }
  std::size_t index(std::int64_t i1, std::int64_t i2) const {
    return static_cast<std::size_t>(i1 * n2() + i2);
  }
  const Complex& operator()(std::int64_t i1, std::int64_t i2) const { return values_[index(i1, i2)]; }
  Complex& operator()(std::int64_t i1, std::int64_t i2) { return values_[index(i1, i2)]; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }

  Complex integral() const;
  double l1() const;
  double sup() const;
  bool is_zero() const;

  MeshFunction& operator+=(const MeshFunction& o);
  MeshFunction& operator-=(const MeshFunction& o);
  MeshFunction& operator*=(Complex c);

 private:
  BoxDomain domain_;
  std::vector<Complex> values_;
};

MeshFunction operator+(MeshFunction a, const MeshFunction& b);
MeshFunction operator-(MeshFunction a, const MeshFunction& b);
MeshFunction operator*(Complex c, MeshFunction a);
MeshFunction pointwise(const MeshFunction& a, const MeshFunction& b);
MeshFunction indicator(const BoxDomain& d, const DyadicRectangle& R);
MeshFunction restrict_to(const MeshFunction& f, const DyadicRectangle& R);
// Bilinear pairing: integral of f*g (no conjugation).
Complex pairing(const MeshFunction& f, const MeshFunction& g);
double max_abs_diff(const MeshFunction& a, const MeshFunction& b);

enum class Relation { less, equal, greater };

struct ExponentProfile {
  double p1 = 2, p2 = 2, q1 = 2, q2 = 2;

  void validate() const;
  double p(int axis) const { return axis == 0 ? p1 : p2; }
  double q(int axis) const { return axis == 0 ? q1 : q2; }
  Relation relation(int axis) const;
  // 1/p - 1/q on one axis; positive exactly when p < q.
  double gap(int axis) const { return 1.0 / p(axis) - 1.0 / q(axis); }
  // Holder exponent (0 unless p < q).
  double alpha(int axis) const;
  // 1/r = 1/q - 1/p (infinity unless p > q).
  double r(int axis) const;
};

// Mixed norm with an explicit outer axis; inner norm taken over the other axis.
struct MixedNormSpec {
  int outer_axis = 0;
  double p_outer = 2;
  double p_inner = 2;
};

double mixed_norm(const MeshFunction& f, double p1, double p2);
double mixed_norm(const MeshFunction& f, const MixedNormSpec& spec);
Complex rectangle_mean(const MeshFunction& f, const DyadicRectangle& R);
double oscillation(const MeshFunction& b, const DyadicRectangle& R);
DyadicRectangle reflect_rectangle(const BoxDomain& d, const DyadicRectangle& R, double A, const KernelSpec& K);
// Rectangles R whose reflection fits in the box, with both levels in [min_level, max_level].
std::vector<DyadicRectangle> reflectable_rectangles(const BoxDomain& d, double A, const KernelSpec& K, int min_level,
                                                    int max_level);

// One-dimensional mesh (used by the 1d operators and one-parameter dyadic tools).
struct LineDomain {
  double origin = 0.0;
  double extent = 1.0;
  int depth = 1;

  void validate() const;
  std::int64_t cells() const { return std::int64_t{1} << depth; }
  double width() const { return extent / static_cast<double>(cells()); }
  double center(std::int64_t i) const { return origin + (static_cast<double>(i) + 0.5) * width(); }
  bool operator==(const LineDomain&) const = default;
};

struct LineFunction {
  LineDomain domain;
  std::vector<Complex> values;

  LineFunction() = default;
  explicit LineFunction(const LineDomain& d) : domain(d), values(static_cast<std::size_t>(d.cells())) {}
  LineFunction(const LineDomain& d, std::vector<Complex> v);
  template <class F>
  static LineFunction sample(const LineDomain& d, F&& fn) {
    LineFunction out(d);
    for (std::int64_t i = 0; i < d.cells(); ++i) out.values[static_cast<std::size_t>(i)] = Complex(fn(d.center(i)));
    return out;
  }
};

double lp_norm(const LineFunction& u, double p);
LineDomain axis_line(const BoxDomain& d, int axis);

double pairwise_sum(std::span<const double> v);
Complex pairwise_sum(std::span<const Complex> v);

}  // namespace bpcl
