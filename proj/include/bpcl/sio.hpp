#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bpcl/kernels.hpp"
#include "bpcl/lattice.hpp"

namespace bpcl {

struct Cell {
  std::int64_t i1 = 0;
  std::int64_t i2 = 0;
  bool operator==(const Cell&) const = default;
};

enum class Side { forward, adjoint };

std::vector<Cell> cells_of(const BoxDomain& d, const DyadicRectangle& R);
// Cells where f is nonzero, in row-major order.
std::vector<Cell> support_cells(const MeshFunction& f);

// T g on the target cells (K(x,y) for forward, K(y,x) for adjoint); zero elsewhere.
MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, std::span<const Cell> targets,
                              Side side = Side::forward);
MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, const DyadicRectangle& target,
                              Side side = Side::forward);

// Double quadrature of (b(x)-b(y)) K(x,y) f(y) g(x).
Complex commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f, const MeshFunction& g);

struct TruncationSchedule {
  double epsilon = -1.0;  // negative: one cell width
  int levels = 3;
};

LineFunction truncated_pv_apply(const Kernel1d& K, const LineFunction& u, double epsilon);

// Representation of the commutator pairing for b constant along x2, with the x2 pairing done by the
// truncated principal value of the second tensor factor.
Complex journe_commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f,
                               const MeshFunction& g, double epsilon = -1.0);

LineFunction fractional_integral(const LineFunction& u, double alpha);
Complex fractional_integral_at(const LineFunction& u, double alpha, double x);

// Richardson tableau for a sequence computed at h, h/2, h/4, ... with error expansion in h^order, h^(2 order), ...
Complex richardson(std::span<const Complex> sequence, int order = 2);

struct RefinedForm {
  std::vector<Complex> levels;
  Complex extrapolated;
};

using PointFunction = std::function<Complex(double, double)>;

// commutator_form on successively refined meshes of the same box, followed by Richardson extrapolation.
// f and g are sampled on their rectangles and vanish elsewhere.
RefinedForm commutator_form_refined(const PointFunction& b, const KernelSpec& K, const PointFunction& f,
                                    const DyadicRectangle& Rf, const PointFunction& g, const DyadicRectangle& Rg,
                                    const BoxDomain& base, const TruncationSchedule& schedule = {});

}  // namespace bpcl
