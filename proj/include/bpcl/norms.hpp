#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpcl/dyadic.hpp"
#include "bpcl/kernels.hpp"
#include "bpcl/lattice.hpp"

namespace bpcl {

struct RectangleSup {
  double value = 0.0;
  DyadicRectangle argmax;
};

// Rectangles at levels <= max_level on each axis (negative: mesh depth).
RectangleSup little_bmo(const MeshFunction& b, int max_level = -1);

double holder_seminorm(const MeshFunction& b, double alpha, int axis);

struct InfConstResult {
  double value = 0.0;
  Complex argmin;
  int sweeps = 0;
};

// inf over complex c of the mixed norm of b - c; the objective is convex in c.
InfConstResult inf_const_mixed_norm(const MeshFunction& b, const MixedNormSpec& spec, double tolerance = 1e-8);

RectangleSup ap_characteristic(const MeshFunction& mu, double p);

struct WeightPair {
  MeshFunction mu, lambda;
  double p = 2.0;
  void validate() const;
  // (mu / lambda)^{1/p}
  MeshFunction nu() const;
};

RectangleSup bloom_bmo(const MeshFunction& b, const MeshFunction& nu);
// mu(R) = integral of mu over R.
double weight_measure(const MeshFunction& w, const DyadicRectangle& R);

struct OffSupportConfig {
  double A = 8.0;
  // Level range of R on both axes; min_level < 0 selects the smallest reflectable level.
  int min_level = -1;
  int max_level = -1;
  std::vector<DyadicRectangle> rectangles;  // explicit sample set; overrides the level range
  std::size_t max_rectangles = 0;           // 0: every candidate; otherwise a seeded subsample
  int max_iterations = 50;
  double stall_tolerance = 1e-10;
  int random_restarts = 4;
  std::uint64_t seed = 0;
};

// Bilinear sup over |f| <= 1 on R (the y slot) and |g| <= 1 on Rt (the x slot).
struct PairMaximum {
  double value = 0.0;  // |commutator_form| at the best pair
  MeshFunction f, g;
  std::vector<double> history;  // objective after every half-step of the winning start
  int iterations = 0;
  bool converged = false;  // stopped on the stall tolerance rather than the iteration cap
};

PairMaximum offsupport_pair(const MeshFunction& b, const KernelSpec& K, const DyadicRectangle& R,
                            const DyadicRectangle& Rt, const OffSupportConfig& cfg);

struct OffSupportResult {
  double value = 0.0;
  DyadicRectangle argmax;
  DyadicRectangle argmax_reflected;
  std::size_t rectangles = 0;
  bool hit_iteration_cap = false;
  std::vector<DyadicRectangle> sampled;  // scanned rectangles in scan order
  std::vector<double> values;            // normalized value per scanned rectangle
};

// |I|^{1/t1 + 1/s1'} |J|^{1/t2 + 1/s2'} with t = (p1,p2), s = (q1,q2).
double offsupport_normalization(const BoxDomain& d, const DyadicRectangle& R, const ExponentProfile& profile);
std::vector<DyadicRectangle> offsupport_rectangles(const BoxDomain& d, const KernelSpec& K, const OffSupportConfig& cfg);

OffSupportResult offsupport_norm(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                 const OffSupportConfig& cfg);
// Normalization mu(R)^{1/p} [lambda^{-p'/p}(Rt)]^{1/p'}.
OffSupportResult offsupport_norm_weighted(const MeshFunction& b, const KernelSpec& K, const WeightPair& w,
                                          const OffSupportConfig& cfg);

struct SigmaTerm {
  DyadicRectangle R;
  DyadicRectangle Rt;
  double f_bound = 1.0;  // sup of f_i (on R)
  double g_bound = 1.0;  // sup of g_i (on Rt)
};
using SigmaFamily = std::vector<SigmaTerm>;

struct SigmaResult {
  double value = 0.0;
  std::size_t best_family = 0;
  std::vector<double> per_family;
};

// Each term's phases are optimized independently, so the numerator is a sum of per-term maxima.
SigmaResult offsupport_norm_sigma(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                  const std::vector<SigmaFamily>& families, const OffSupportConfig& cfg);

// Family 0 is the singleton I x J. The others cross a sparse collection on sparse_axis (from stopping on a
// seeded mean-zero function on I or J) with the fixed interval of the other axis.
std::vector<SigmaFamily> sigma_families(const BoxDomain& d, const KernelSpec& K, const DyadicInterval& I,
                                        const DyadicInterval& J, int sparse_axis, int count, double A,
                                        std::uint64_t seed);

// Sparse collection on one axis, with the cube indices read as intervals of that axis.
std::vector<DyadicInterval> sparse_intervals(const SparseCollection& S, int axis);

// sum over I1 in S1, I2 in S2 of lambda1 lambda2 |I1||I2| osc(b, I1 x I2).
double double_sparse_osc_functional(const MeshFunction& b, const SparseCollection& S1, const SparseCollection& S2,
                                    const std::vector<double>& lambda1, const std::vector<double>& lambda2, double r1,
                                    double r2);
// lambda_Q proportional to a given profile, normalized so that sum |Q| lambda^{r'} = 1.
std::vector<double> normalized_lambda(const SparseCollection& S, const std::vector<double>& profile, double r);

struct SparseOscResult {
  double value = 0.0;
  std::size_t candidates = 0;
  std::string best;  // label of the winning candidate collection
};

// sup over candidate sparse collections of sum lambda_Q |Q| osc(b,Q) with Holder-extremal lambda.
SparseOscResult sparse_osc_sup(const CubeField& b, double r, int random_candidates = 8, std::uint64_t seed = 0);
// (sum_{Q in S} |Q| osc(b,Q)^r)^{1/r}: the value at the extremal lambda for one collection.
double sparse_osc_value(const CubeField& b, const std::vector<Cube>& cubes, double r);
double cube_oscillation(const CubeField& b, const Cube& Q);

}  // namespace bpcl
