#pragma once

#include "bpcl/modelops.hpp"
#include "support.hpp"

namespace testing {

using namespace bpcl;

inline std::vector<double> basis_cells(const bpcl::BoxDomain& d, const bpcl::DyadicInterval& I, bpcl::Basis b) {
  if (b == Basis::haar) return testing::haar_cells(d, I.axis, I.level, I.index);
  std::vector<double> v(static_cast<std::size_t>(d.cells(I.axis)), 0.0);
  const std::int64_t w = d.cells(I.axis) >> I.level;
  const double val = b == Basis::average ? 1.0 / length(d, I) : 1.0;
  for (std::int64_t i = I.index * w; i < (I.index + 1) * w; ++i) v[static_cast<std::size_t>(i)] = val;
  return v;
}

// Entry by entry: alpha <f, phi_I1 phi_J1> psi_I2 psi_J2, with the slot bases of the kind.
inline bpcl::MeshFunction naive_apply(const bpcl::ModelOperator& S, const bpcl::MeshFunction& f) {
  const auto& d = S.domain();
  const auto sb = slot_bases(S.spec());
  MeshFunction out(d);
  S.for_each_entry([&](const ModelEntry& e) {
    const Complex a = S.coefficients()[e.index];
    if (a == Complex{}) return;
    const auto u1 = basis_cells(d, e.I1, sb.in[0]), u2 = basis_cells(d, e.J1, sb.in[1]);
    const auto v1 = basis_cells(d, e.I2, sb.out[0]), v2 = basis_cells(d, e.J2, sb.out[1]);
    Complex c = 0.0;
    for (std::int64_t i = 0; i < d.cells(0); ++i)
      for (std::int64_t j = 0; j < d.cells(1); ++j)
        c += f(i, j) * u1[static_cast<std::size_t>(i)] * u2[static_cast<std::size_t>(j)] * d.cell_area();
    for (std::int64_t i = 0; i < d.cells(0); ++i)
      for (std::int64_t j = 0; j < d.cells(1); ++j)
        out(i, j) += a * c * v1[static_cast<std::size_t>(i)] * v2[static_cast<std::size_t>(j)];
  });
  return out;
}

}  // namespace testing
