#pragma once

#include <span>

#include "bpcl/lattice.hpp"
#include "bpcl/modelops.hpp"
#include "bpcl/norms.hpp"
#include "bpcl/sio.hpp"

// Serial versions of the parallel kernels. They sum in the same order, so results agree bit for bit.
namespace bpcl::reference {

MeshFunction apply_offsupport(const KernelSpec& K, const MeshFunction& g, std::span<const Cell> targets,
                              Side side = Side::forward);
Complex commutator_form(const MeshFunction& b, const KernelSpec& K, const MeshFunction& f, const MeshFunction& g);
double mixed_norm(const MeshFunction& f, const MixedNormSpec& spec);
RectangleSup little_bmo(const MeshFunction& b, int max_level = -1);
MeshFunction apply_model(const ModelOperator& S, const MeshFunction& f);

}  // namespace bpcl::reference
