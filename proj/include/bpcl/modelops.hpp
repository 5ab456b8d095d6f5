#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bpcl/dyadic.hpp"
#include "bpcl/lattice.hpp"

namespace bpcl {

enum class ModelKind { shift, partial_paraproduct, full_paraproduct };

struct ModelOperatorSpec {
  ModelKind kind = ModelKind::shift;
  // Partial paraproducts: the axis carrying the paraproduct (0 is the i = 0 symmetry, 1 is j = 0).
  int para_axis = 0;
  // Partial paraproducts: the averaging slot sits on the output side.
  bool adjoint = false;
  // Full paraproducts: 1 <f>_{KxV} <g,h_K h_V>; 2 its transpose; 3 <f,h_K 1_V/|V|><g,1_K/|K| h_V>; 4 its transpose.
  int full_variant = 1;
  // (i1, i2, j1, j2): generations from the input/output Haar intervals up to K (axis 0) and V (axis 1).
  std::array<int, 4> complexity{0, 0, 0, 0};
  std::uint64_t seed = 0;
  double normalization = 1.0;
};

std::string kind_name(ModelKind k);
ModelKind parse_kind(const std::string& s);

// Analysis (input) and synthesis (output) basis on each axis.
struct SlotBases {
  std::array<Basis, 2> in{Basis::haar, Basis::haar};
  std::array<Basis, 2> out{Basis::haar, Basis::haar};
};
SlotBases slot_bases(const ModelOperatorSpec& s);

// One stored coefficient with its index data.
struct ModelEntry {
  DyadicInterval K, V, I1, I2, J1, J2;
  std::size_t index = 0;
};

class ModelOperator {
 public:
  ModelOperator() = default;
  // Validates the table against the size conditions of the kind; throws ValidationError.
  ModelOperator(const ModelOperatorSpec& spec, const BoxDomain& d, std::vector<Complex> coefficients);
  // Deterministic random admissible table drawn from spec.seed.
  static ModelOperator generate(const ModelOperatorSpec& spec, const BoxDomain& d);
  // Number of coefficients the index set of (spec, d) holds.
  static std::size_t table_size(const ModelOperatorSpec& spec, const BoxDomain& d);

  const ModelOperatorSpec& spec() const { return spec_; }
  const BoxDomain& domain() const { return domain_; }
  const std::vector<Complex>& coefficients() const { return alpha_; }
  // Deepest K (axis 0) / V (axis 1) level.
  int max_level(int axis) const { return kmax_[axis]; }

  void for_each_entry(const std::function<void(const ModelEntry&)>& fn) const;
  ModelEntry entry(std::size_t idx) const;

 private:
  void setup();
  void validate() const;

  ModelOperatorSpec spec_;
  BoxDomain domain_;
  std::vector<Complex> alpha_;
  std::array<int, 2> kmax_{-1, -1};
  std::array<std::int64_t, 2> pairs_{1, 1};  // index pairs per K / per V
  std::array<std::int64_t, 2> count_{0, 0};  // heap ids of K / V
};

MeshFunction apply_model(const ModelOperator& S, const MeshFunction& f);
// b (S f) - S (b f).
MeshFunction model_commutator(const MeshFunction& b, const ModelOperator& S, const MeshFunction& f);

// Certified column BMO of a one-axis sequence indexed by heap id at levels 0..depth.
double dyadic_sequence_bmo(std::span<const Complex> alpha, double extent, int depth);
// L1 norm of (sum |beta_Q|^2 1_Q / |Q|)^{1/2}.
double dyadic_sequence_square_l1(std::span<const Complex> beta, double extent, int depth);

struct ProductDecomposition {
  MeshFunction A1, A2, A3, top;
};
// b f = A1 + A2 + A3 + top along one axis (slice by slice).
ProductDecomposition product_decompose(const MeshFunction& b, const MeshFunction& f, int axis);

// sum over dyadic cubes of l(Q)^alpha <|f|>_Q 1_Q: along one axis, or on the square product when axis < 0.
MeshFunction fractional_positive_op(const MeshFunction& f, double alpha, int axis);
LineFunction fractional_positive_op(const LineFunction& u, double alpha);

struct ModelCommutatorTerms {
  Complex g_side_A1, g_side_A2;  // sum alpha <f,h1> <A_i(b,g),h2>
  Complex f_side_A1, f_side_A2;  // sum alpha <A_i(b,f),h1> <g,h2>
  Complex core;                  // sum alpha (<b>_{J2} - <b>_{J1}) <f,h1> <g,h2>
  Complex total;                 // g_side - f_side + core
  Complex direct;                // <[b,S] f, g>
  double relative_error = 0.0;
  bool verified = false;
};

// Requires a shift and b constant along axis 0 on each x2 slice.
ModelCommutatorTerms commutator_decompose_model(const MeshFunction& b, const ModelOperator& S, const MeshFunction& f,
                                                const MeshFunction& g);

}  // namespace bpcl
