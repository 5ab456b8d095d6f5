#pragma once

#include "bpcl/kernels.hpp"
#include "bpcl/lattice.hpp"

namespace bpcl {

struct AwfConfig {
  double A = 8.0;
  double rho_target = 0.5;
  // Division guard: min |T g| over the rectangle must exceed this fraction of max |T g|.
  double division_floor = 1e-3;
};

struct BootstrapReport {
  double A = 0.0;
  // |K(c_R, c_Rt)| * A^2 |R|
  double center_value = 0.0;
  // max over cell pairs of |K(x,y) - K(c_R,c_Rt)| * A^2 |R|, and the same divided by omega(1/A)
  double center_diff = 0.0;
  double center_diff_over_omega = 0.0;
  // The four integrals, each multiplied by A^2 (so comparability with A^-2 means these stay in a band).
  // min and max over the free variable.
  double int_over_R_min = 0.0, int_over_R_max = 0.0;
  double int_over_Rt_min = 0.0, int_over_Rt_max = 0.0;
  double abs_int_over_R_max = 0.0;
  double abs_int_over_Rt_max = 0.0;
};

BootstrapReport bootstrap_check(const KernelSpec& K, const BoxDomain& d, const DyadicRectangle& R, double A);

struct AwfDiagnostics {
  double residual = 0.0;        // max cellwise |f - reconstruction| / max |f|
  double integral_ftilde = 0.0; // |integral of ftilde|
  double l1_f = 0.0;
  double h1_ratio = 0.0;        // sup|h1| / (A^2 sup|f|)
  double h2_ratio = 0.0;        // sup|h2| / (A^2 <|f|>_R)
  double h2_ratio_sharp = 0.0;  // h2_ratio / omega(1/A)
  double ftilde_ratio = 0.0;    // sup|ftilde| / (omega(1/A) <|f|>_R)
  double rho = 0.0;             // sup|ftilde| / <|f|>_R
  double absorption = 0.0;      // sup|ftilde| |R| / integral |f|
};

struct AwfOutput {
  DyadicRectangle R;
  DyadicRectangle Rt;
  double A = 0.0;
  MeshFunction g1, g2, h1, h2, ftilde;
  MeshFunction Tg1, Tstar_h1, Tstar_g2, T_h2;
  AwfDiagnostics diag;
};

AwfOutput awf_decompose(const KernelSpec& K, const MeshFunction& f, const DyadicRectangle& R, const AwfConfig& cfg);
// [h1 T g1 - g1 T* h1] + [h2 T* g2 - g2 T h2] + ftilde
MeshFunction awf_reconstruct(const AwfOutput& out);

struct OscCertificate {
  DyadicRectangle R;
  DyadicRectangle Rt;
  double A = 0.0;
  double lhs = 0.0;  // |R| osc(b;R)
  double rhs = 0.0;  // |<[b,T]g1,h1>| + |<[b,T]h2,g2>|
  double ratio = 0.0;
  Complex pairing1;  // <[b,T]g1,h1>
  Complex pairing2;  // <[b,T]h2,g2>
  Complex integral_bf;
  Complex integral_b_ftilde;
  double f_scale = 0.0;  // sup of the recentred phase function before normalization
  double residual = 0.0;
  double rho = 0.0;
};

// Extremal test function for the oscillation of b on R: recentred phase of b - <b>_R, scaled to sup norm 1.
MeshFunction oscillation_extremal(const MeshFunction& b, const DyadicRectangle& R, double* scale = nullptr);

OscCertificate osc_lower_bound_certificate(const MeshFunction& b, const KernelSpec& K, const DyadicRectangle& R,
                                           const AwfConfig& cfg);

// Smallest level k with 2^k > 2A: the reflection of the level-k interval at index 0 then fits in the box.
int min_reflectable_level(double A);

}  // namespace bpcl
