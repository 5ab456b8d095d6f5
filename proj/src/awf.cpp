#include "bpcl/awf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpcl/sio.hpp"

namespace bpcl {

int min_reflectable_level(double A) {
  int k = 0;
  while (std::ldexp(1.0, k) <= 2.0 * A) ++k;
  return k;
}

BootstrapReport bootstrap_check(const KernelSpec& K, const BoxDomain& d, const DyadicRectangle& R, double A) {
  const auto Rt = reflect_rectangle(d, R, A, K);
  const Point cr = center(d, R), ct = center(d, Rt);
  const double mR = measure(d, R);
  const Complex kc = eval_kernel(K, cr, ct);
  const auto xs = cells_of(d, R), ys = cells_of(d, Rt);
  const double area = d.cell_area();
  const double a2 = A * A;

  BootstrapReport rep;
  rep.A = A;
  rep.center_value = std::abs(kc) * a2 * mR;
  std::vector<Complex> over_R(ys.size(), 0.0), over_Rt(xs.size(), 0.0);
  std::vector<double> abs_R(ys.size(), 0.0), abs_Rt(xs.size(), 0.0);
  double diff = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Point x{d.center(0, xs[i].i1), d.center(1, xs[i].i2)};
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Point y{d.center(0, ys[j].i1), d.center(1, ys[j].i2)};
      const Complex k = K(x, y);
      diff = std::max(diff, std::abs(k - kc));
      over_R[j] += k * area;
      abs_R[j] += std::abs(k) * area;
      over_Rt[i] += k * area;
      abs_Rt[i] += std::abs(k) * area;
    }
  }
  rep.center_diff = diff * a2 * mR;
  rep.center_diff_over_omega = rep.center_diff / K.omega(1.0 / A);
  auto minmax_abs = [&](const std::vector<Complex>& v, double& lo, double& hi) {
    lo = kInf;
    hi = 0.0;
    for (const auto& z : v) {
      lo = std::min(lo, std::abs(z) * a2);
      hi = std::max(hi, std::abs(z) * a2);
    }
  };
  minmax_abs(over_R, rep.int_over_R_min, rep.int_over_R_max);
  minmax_abs(over_Rt, rep.int_over_Rt_min, rep.int_over_Rt_max);
  for (double v : abs_R) rep.abs_int_over_R_max = std::max(rep.abs_int_over_R_max, v * a2);
  for (double v : abs_Rt) rep.abs_int_over_Rt_max = std::max(rep.abs_int_over_Rt_max, v * a2);
  return rep;
}

namespace {

void guard_division(const MeshFunction& t, const std::vector<Cell>& cells, double floor, const char* what) {
  double lo = kInf, hi = 0.0;
  for (const auto& c : cells) {
    const double a = std::abs(t(c.i1, c.i2));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!(lo > 0.0) || lo <= floor * hi) {
    std::ostringstream os;
    os << what << " is too close to zero (min " << lo << ", max " << hi << "); raise A";
    throw NumericalError(os.str());
  }
}

}  // namespace

AwfOutput awf_decompose(const KernelSpec& K, const MeshFunction& f, const DyadicRectangle& R, const AwfConfig& cfg) {
  if (!(cfg.A >= 3.0)) throw InvalidInput("A must be at least 3");
  const auto& d = f.domain();
  AwfOutput out;
  out.A = cfg.A;
  out.R = R;
  out.Rt = reflect_rectangle(d, R, cfg.A, K);
  const auto inR = indicator(d, R);
  for (std::size_t i = 0; i < f.values().size(); ++i)
    if (f.values()[i] != Complex{} && inR.values()[i] == Complex{})
      throw PreconditionError("f is not supported in R");
  const double l1 = f.l1();
  if (std::abs(f.integral()) > 1e-10 * l1) throw PreconditionError("f does not have zero mean");

  out.g1 = indicator(d, out.Rt);
  out.g2 = inR;
  out.h1 = out.h2 = out.ftilde = out.Tg1 = out.Tstar_h1 = out.Tstar_g2 = out.T_h2 = MeshFunction(d);
  out.diag.l1_f = l1;
  if (f.is_zero()) return out;

  const auto cR = cells_of(d, R), cRt = cells_of(d, out.Rt);
  out.Tg1 = apply_offsupport(K, out.g1, cR, Side::forward);
  guard_division(out.Tg1, cR, cfg.division_floor, "T g1 on R");
  for (const auto& c : cR) out.h1(c.i1, c.i2) = f(c.i1, c.i2) / out.Tg1(c.i1, c.i2);

  out.Tstar_h1 = apply_offsupport(K, out.h1, cRt, Side::adjoint);
  out.Tstar_g2 = apply_offsupport(K, out.g2, cRt, Side::adjoint);
  guard_division(out.Tstar_g2, cRt, cfg.division_floor, "T* g2 on the reflected rectangle");
  for (const auto& c : cRt) out.h2(c.i1, c.i2) = out.Tstar_h1(c.i1, c.i2) / out.Tstar_g2(c.i1, c.i2);

  out.T_h2 = apply_offsupport(K, out.h2, cR, Side::forward);
  for (const auto& c : cR) out.ftilde(c.i1, c.i2) = out.T_h2(c.i1, c.i2);

  const auto rec = awf_reconstruct(out);
  const double fs = f.sup();
  const double mR = measure(d, R);
  const double avg = l1 / mR;
  const double w = K.omega(1.0 / cfg.A);
  const double a2 = cfg.A * cfg.A;
  auto& g = out.diag;
  g.residual = max_abs_diff(rec, f) / fs;
  g.integral_ftilde = std::abs(out.ftilde.integral());
  g.h1_ratio = out.h1.sup() / (a2 * fs);
  g.h2_ratio = out.h2.sup() / (a2 * avg);
  g.h2_ratio_sharp = g.h2_ratio / w;
  g.rho = out.ftilde.sup() / avg;
  g.ftilde_ratio = g.rho / w;
  g.absorption = out.ftilde.sup() * mR / l1;
  return out;
}

MeshFunction awf_reconstruct(const AwfOutput& o) {
  MeshFunction r = pointwise(o.h1, o.Tg1);
  r -= pointwise(o.g1, o.Tstar_h1);
  r += pointwise(o.h2, o.Tstar_g2);
  r -= pointwise(o.g2, o.T_h2);
  r += o.ftilde;
  return r;
}

MeshFunction oscillation_extremal(const MeshFunction& b, const DyadicRectangle& R, double* scale) {
  const auto& d = b.domain();
  const Complex m = rectangle_mean(b, R);
  const auto cells = cells_of(d, R);
  MeshFunction phi(d);
  double dev = 0.0;
  for (const auto& c : cells) dev = std::max(dev, std::abs(b(c.i1, c.i2) - m));
  for (const auto& c : cells) {
    const Complex z = b(c.i1, c.i2) - m;
    // conjugate phase, so that (b - <b>) * phi = |b - <b>|; cells at the mean up to rounding get no phase,
    // which keeps f covariant under b -> lambda b
    phi(c.i1, c.i2) = std::abs(z) > 1e-12 * dev ? std::conj(z) / std::abs(z) : Complex{};
  }
  const Complex pm = rectangle_mean(phi, R);
  double s = 0.0;
  for (const auto& c : cells) {
    phi(c.i1, c.i2) -= pm;
    s = std::max(s, std::abs(phi(c.i1, c.i2)));
  }
  if (scale) *scale = s;
  if (s <= 1e-14) return MeshFunction(d);
  for (const auto& c : cells) phi(c.i1, c.i2) /= s;
  return phi;
}

OscCertificate osc_lower_bound_certificate(const MeshFunction& b, const KernelSpec& K, const DyadicRectangle& R,
                                           const AwfConfig& cfg) {
  const auto& d = b.domain();
  OscCertificate c;
  c.R = R;
  c.A = cfg.A;
  const auto f = oscillation_extremal(b, R, &c.f_scale);
  const auto o = awf_decompose(K, f, R, cfg);
  c.Rt = o.Rt;
  c.lhs = measure(d, R) * oscillation(b, R);
  c.pairing1 = commutator_form(b, K, o.g1, o.h1);
  c.pairing2 = commutator_form(b, K, o.h2, o.g2);
  c.rhs = std::abs(c.pairing1) + std::abs(c.pairing2);
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : (c.lhs > 0.0 ? kInf : 0.0);
  c.integral_bf = pairing(b, f);
  c.integral_b_ftilde = pairing(b, o.ftilde);
  c.residual = o.diag.residual;
  c.rho = o.diag.rho;
  return c;
}

}  // namespace bpcl
