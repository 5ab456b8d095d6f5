#include "bpcl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "bpcl/awf.hpp"
#include "bpcl/sio.hpp"

namespace bpcl {

namespace {

std::vector<DyadicRectangle> all_rectangles(const BoxDomain& d, int max_level) {
  const int D1 = max_level < 0 ? d.depth[0] : std::min(max_level, d.depth[0]);
  const int D2 = max_level < 0 ? d.depth[1] : std::min(max_level, d.depth[1]);
  std::vector<DyadicRectangle> out;
  for (int k1 = 0; k1 <= D1; ++k1)
    for (int k2 = 0; k2 <= D2; ++k2)
      for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1)
        for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) out.push_back(make_rectangle(k1, m1, k2, m2));
  return out;
}

// Evaluates fn on every rectangle in parallel and returns the first maximizer in list order.
template <class F>
RectangleSup rectangle_sup(const std::vector<DyadicRectangle>& rects, F&& fn) {
  std::vector<double> vals(rects.size());
  const auto n = static_cast<std::int64_t>(rects.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = fn(rects[static_cast<std::size_t>(i)]);
  RectangleSup best;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (i == 0 || vals[i] > best.value) {
      best.value = vals[i];
      best.argmax = rects[i];
    }
  return best;
}

}  // namespace

RectangleSup little_bmo(const MeshFunction& b, int max_level) {
  return rectangle_sup(all_rectangles(b.domain(), max_level), [&](const DyadicRectangle& R) { return oscillation(b, R); });
}

double holder_seminorm(const MeshFunction& b, double alpha, int axis) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("Holder exponent must lie in (0, 1]");
  if (axis != 0 && axis != 1) throw InvalidInput("axis must be 0 or 1");
  const auto& d = b.domain();
  const int other = 1 - axis;
  const auto n = d.cells(axis);
  std::vector<double> per(static_cast<std::size_t>(d.cells(other)), 0.0);
  const double h = d.width(axis);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d.cells(other); ++j) {
    double m = 0.0;
    for (std::int64_t u = 0; u < n; ++u)
      for (std::int64_t v = u + 1; v < n; ++v) {
        const Complex bu = axis == 0 ? b(u, j) : b(j, u);
        const Complex bv = axis == 0 ? b(v, j) : b(j, v);
        m = std::max(m, std::abs(bu - bv) / std::pow(static_cast<double>(v - u) * h, alpha));
      }
    per[static_cast<std::size_t>(j)] = m;
  }
  return per.empty() ? 0.0 : *std::max_element(per.begin(), per.end());
}

InfConstResult inf_const_mixed_norm(const MeshFunction& b, const MixedNormSpec& spec, double tolerance) {
  const auto& v = b.values();
  double re_lo = kInf, re_hi = -kInf, im_lo = kInf, im_hi = -kInf;
  for (const auto& z : v) {
    re_lo = std::min(re_lo, z.real());
    re_hi = std::max(re_hi, z.real());
    im_lo = std::min(im_lo, z.imag());
    im_hi = std::max(im_hi, z.imag());
  }
  auto objective = [&](Complex c) {
    MeshFunction t = b;
    for (auto& z : t.values()) z -= c;
    return mixed_norm(t, spec);
  };
  InfConstResult res;
  const bool real = im_lo == 0.0 && im_hi == 0.0;
  Complex c((re_lo + re_hi) / 2, (im_lo + im_hi) / 2);
  double fc = objective(c);
  const double span = std::max({re_hi - re_lo, im_hi - im_lo, 0.0});
  if (span == 0.0) {
    res.argmin = v.empty() ? Complex{} : v.front();
    res.value = objective(res.argmin);
    return res;
  }
  // Golden-section line search along a direction, clipped to the bounding box.
  auto line_search = [&](Complex dir) {
    double tlo = -kInf, thi = kInf;
    auto clip = [&](double x, double dx, double lo, double hi) {
      if (dx == 0.0) return;
      double a = (lo - x) / dx, bnd = (hi - x) / dx;
      if (a > bnd) std::swap(a, bnd);
      tlo = std::max(tlo, a);
      thi = std::min(thi, bnd);
    };
    clip(c.real(), dir.real(), re_lo, re_hi);
    clip(c.imag(), dir.imag(), im_lo, im_hi);
    if (!(thi > tlo)) return;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = tlo, e = thi;
    double x1 = e - g * (e - a), x2 = a + g * (e - a);
    double f1 = objective(c + x1 * dir), f2 = objective(c + x2 * dir);
    while (e - a > 1e-3 * tolerance * std::max(span, 1.0)) {
      if (f1 <= f2) {
        e = x2;
        x2 = x1;
        f2 = f1;
        x1 = e - g * (e - a);
        f1 = objective(c + x1 * dir);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (e - a);
        f2 = objective(c + x2 * dir);
      }
    }
    const double t = 0.5 * (a + e);
    const double ft = objective(c + t * dir);
    if (ft <= fc) {
      c += t * dir;
      fc = ft;
    }
  };
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> dirs =
      real ? std::vector<Complex>{Complex(1, 0)}
           : std::vector<Complex>{Complex(1, 0), Complex(0, 1), Complex(r, r), Complex(r, -r)};
  const int max_sweeps = 200;
  for (int s = 0; s < max_sweeps; ++s) {
    const Complex c0 = c;
    const double f0 = fc;
    for (const auto& dir : dirs) line_search(dir);
    res.sweeps = s + 1;
    if (real || (std::abs(c - c0) <= tolerance * std::max(span, 1.0) && f0 - fc <= 1e-14 * std::max(f0, 1.0))) {
      res.value = fc;
      res.argmin = c;
      return res;
    }
  }
  std::ostringstream os;
  os << "inf over constants did not converge; best value " << fc << " at (" << c.real() << "," << c.imag() << ")";
  throw NumericalError(os.str());
}

RectangleSup ap_characteristic(const MeshFunction& mu, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("A_p exponent must lie in (1, inf)");
  for (const auto& z : mu.values())
    if (!(z.real() > 0.0) || z.imag() != 0.0) throw InvalidInput("weight must be strictly positive");
  const double pp = conjugate(p);
  MeshFunction dual(mu.domain());
  for (std::size_t i = 0; i < dual.values().size(); ++i) dual.values()[i] = std::pow(mu.values()[i].real(), -pp / p);
  return rectangle_sup(all_rectangles(mu.domain(), -1), [&](const DyadicRectangle& R) {
    return rectangle_mean(mu, R).real() * std::pow(rectangle_mean(dual, R).real(), p / pp);
  });
}

void WeightPair::validate() const {
  if (!(mu.domain() == lambda.domain())) throw InvalidInput("weights live on different domains");
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("exponent must lie in (1, inf)");
  for (const auto* w : {&mu, &lambda})
    for (const auto& z : w->values())
      if (!(z.real() > 0.0) || z.imag() != 0.0) throw InvalidInput("weights must be strictly positive");
}

MeshFunction WeightPair::nu() const {
  validate();
  MeshFunction out(mu.domain());
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = std::pow(mu.values()[i].real() / lambda.values()[i].real(), 1.0 / p);
  return out;
}

double weight_measure(const MeshFunction& w, const DyadicRectangle& R) {
  return rectangle_mean(w, R).real() * measure(w.domain(), R);
}

RectangleSup bloom_bmo(const MeshFunction& b, const MeshFunction& nu) {
  if (!(b.domain() == nu.domain())) throw InvalidInput("domain mismatch");
  for (const auto& z : nu.values())
    if (!(z.real() > 0.0)) throw InvalidInput("Bloom weight must be strictly positive");
  return rectangle_sup(all_rectangles(b.domain(), -1), [&](const DyadicRectangle& R) {
    return oscillation(b, R) * measure(b.domain(), R) / weight_measure(nu, R);
  });
}

PairMaximum offsupport_pair(const MeshFunction& b, const KernelSpec& K, const DyadicRectangle& R,
                            const DyadicRectangle& Rt, const OffSupportConfig& cfg) {
  const auto& d = b.domain();
  const auto ys = cells_of(d, R), xs = cells_of(d, Rt);
  auto overlap = [](std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) { return a0 < b1 && b0 < a1; };
  if (overlap(cell_begin(d, R.I), cell_end(d, R.I), cell_begin(d, Rt.I), cell_end(d, Rt.I)) ||
      overlap(cell_begin(d, R.J), cell_end(d, R.J), cell_begin(d, Rt.J), cell_end(d, Rt.J)))
    throw PreconditionError("rectangle pair is not separated on both axes: " + describe(R) + " / " + describe(Rt));
  const std::size_t nx = xs.size(), ny = ys.size();
  const double area = d.cell_area();
  std::vector<Complex> M(nx * ny);
  bool real = true;
  for (std::size_t i = 0; i < nx; ++i) {
    const Point x{d.center(0, xs[i].i1), d.center(1, xs[i].i2)};
    const Complex bx = b(xs[i].i1, xs[i].i2);
    for (std::size_t j = 0; j < ny; ++j) {
      const Point y{d.center(0, ys[j].i1), d.center(1, ys[j].i2)};
      const Complex m = (bx - b(ys[j].i1, ys[j].i2)) * K(x, y) * (area * area);
      M[i * ny + j] = m;
      real = real && m.imag() == 0.0;
    }
  }

  std::vector<std::vector<Complex>> starts;
  starts.emplace_back(nx, Complex(1.0));
  {
    // Leading left singular vector by power iteration on M M^*.
    std::vector<Complex> u(nx, Complex(1.0)), w(ny);
    for (int it = 0; it < 30; ++it) {
      for (std::size_t j = 0; j < ny; ++j) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < nx; ++i) s += std::conj(M[i * ny + j]) * u[i];
        w[j] = s;
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < ny; ++j) s += M[i * ny + j] * w[j];
        u[i] = s;
        nrm += std::norm(s);
      }
      if (!(nrm > 0.0)) break;
      nrm = std::sqrt(nrm);
      for (auto& z : u) z /= nrm;
    }
    std::vector<Complex> g(nx);
    for (std::size_t i = 0; i < nx; ++i) g[i] = std::conj(phase(u[i]));
    starts.push_back(std::move(g));
  }
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(R.I.level),
                    static_cast<std::uint64_t>(R.I.index), static_cast<std::uint64_t>(R.J.level),
                    static_cast<std::uint64_t>(R.J.index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int r = 0; r < cfg.random_restarts; ++r) {
    std::vector<Complex> g(nx);
    for (auto& z : g) {
      if (real) {
        z = U(rng) < 0.5 ? -1.0 : 1.0;
      } else {
        const double t = 2.0 * kPi * U(rng);
        z = Complex(std::cos(t), std::sin(t));
      }
    }
    starts.push_back(std::move(g));
  }

  PairMaximum best;
  best.value = -1.0;
  std::vector<Complex> u(ny), v(nx), f(ny);
  for (auto& g : starts) {
    PairMaximum cur;
    double prev = -1.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      double o1 = 0.0;
      for (std::size_t j = 0; j < ny; ++j) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < nx; ++i) s += M[i * ny + j] * g[i];
        u[j] = s;
        f[j] = std::conj(phase(s));
        o1 += std::abs(s);
      }
      double o2 = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < ny; ++j) s += M[i * ny + j] * f[j];
        v[i] = s;
        g[i] = std::conj(phase(s));
        o2 += std::abs(s);
      }
      cur.history.push_back(o1);
      cur.history.push_back(o2);
      cur.iterations = it + 1;
      cur.value = o2;
      if (prev >= 0.0 && o2 - prev <= cfg.stall_tolerance * std::max(o2, 1e-300)) {
        cur.converged = true;
        break;
      }
      prev = o2;
    }
    if (cur.value > best.value) {
      best = std::move(cur);
      best.f = MeshFunction(d);
      best.g = MeshFunction(d);
      for (std::size_t j = 0; j < ny; ++j) best.f(ys[j].i1, ys[j].i2) = f[j];
      for (std::size_t i = 0; i < nx; ++i) best.g(xs[i].i1, xs[i].i2) = g[i];
    }
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

double offsupport_normalization(const BoxDomain& d, const DyadicRectangle& R, const ExponentProfile& pr) {
  return std::pow(length(d, R.I), 1.0 / pr.p1 + 1.0 - 1.0 / pr.q1) *
         std::pow(length(d, R.J), 1.0 / pr.p2 + 1.0 - 1.0 / pr.q2);
}

std::vector<DyadicRectangle> offsupport_rectangles(const BoxDomain& d, const KernelSpec& K, const OffSupportConfig& cfg) {
  std::vector<DyadicRectangle> rects = cfg.rectangles;
  if (rects.empty()) {
    const int lo = cfg.min_level >= 0 ? cfg.min_level : min_reflectable_level(cfg.A);
    const int hi = cfg.max_level >= 0 ? cfg.max_level : std::max(d.depth[0], d.depth[1]);
    rects = reflectable_rectangles(d, cfg.A, K, lo, hi);
  }
  if (cfg.max_rectangles > 0 && rects.size() > cfg.max_rectangles) {
    std::vector<std::size_t> order(rects.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(cfg.max_rectangles);
    std::sort(order.begin(), order.end());
    std::vector<DyadicRectangle> sub;
    for (auto i : order) sub.push_back(rects[i]);
    rects = std::move(sub);
  }
  return rects;
}

namespace {

template <class Norm>
OffSupportResult offsupport_scan(const MeshFunction& b, const KernelSpec& K, const OffSupportConfig& cfg, Norm&& norm) {
  const auto& d = b.domain();
  const auto rects = offsupport_rectangles(d, K, cfg);
  if (rects.empty()) throw GeometryError("no rectangle admits a reflected rectangle in the box");
  std::vector<double> vals(rects.size());
  std::vector<DyadicRectangle> refl(rects.size());
  std::vector<char> capped(rects.size(), 0);
  const auto n = static_cast<std::int64_t>(rects.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& R = rects[static_cast<std::size_t>(i)];
    const auto Rt = reflect_rectangle(d, R, cfg.A, K);
    const auto m = offsupport_pair(b, K, R, Rt, cfg);
    vals[static_cast<std::size_t>(i)] = m.value / norm(R, Rt);
    refl[static_cast<std::size_t>(i)] = Rt;
    capped[static_cast<std::size_t>(i)] = m.converged ? 0 : 1;
  }
  OffSupportResult out;
  out.rectangles = rects.size();
  out.argmax = rects.front();
  out.argmax_reflected = refl.front();
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (vals[i] > out.value) {
      out.value = vals[i];
      out.argmax = rects[i];
      out.argmax_reflected = refl[i];
    }
    out.hit_iteration_cap = out.hit_iteration_cap || capped[i];
  }
  out.sampled = rects;
  out.values = std::move(vals);
  return out;
}

}  // namespace

OffSupportResult offsupport_norm(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                 const OffSupportConfig& cfg) {
  profile.validate();
  const auto& d = b.domain();
  return offsupport_scan(b, K, cfg, [&](const DyadicRectangle& R, const DyadicRectangle&) {
    return offsupport_normalization(d, R, profile);
  });
}

OffSupportResult offsupport_norm_weighted(const MeshFunction& b, const KernelSpec& K, const WeightPair& w,
                                          const OffSupportConfig& cfg) {
  w.validate();
  const double p = w.p, pp = conjugate(p);
  MeshFunction dual(w.lambda.domain());
  for (std::size_t i = 0; i < dual.values().size(); ++i) dual.values()[i] = std::pow(w.lambda.values()[i].real(), -pp / p);
  return offsupport_scan(b, K, cfg, [&](const DyadicRectangle& R, const DyadicRectangle& Rt) {
    return std::pow(weight_measure(w.mu, R), 1.0 / p) * std::pow(weight_measure(dual, Rt), 1.0 / pp);
  });
}

SigmaResult offsupport_norm_sigma(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                  const std::vector<SigmaFamily>& families, const OffSupportConfig& cfg) {
  profile.validate();
  if (families.empty()) throw InvalidInput("no rectangle family supplied");
  const auto& d = b.domain();
  auto key = [](const SigmaTerm& t) {
    return std::array<std::int64_t, 8>{t.R.I.level, t.R.I.index, t.R.J.level, t.R.J.index,
                                       t.Rt.I.level, t.Rt.I.index, t.Rt.J.level, t.Rt.J.index};
  };
  std::map<std::array<std::int64_t, 8>, std::size_t> ids;
  std::vector<const SigmaTerm*> uniq;
  for (const auto& fam : families) {
    if (fam.empty()) throw InvalidInput("empty rectangle family");
    for (const auto& t : fam)
      if (ids.emplace(key(t), uniq.size()).second) uniq.push_back(&t);
  }
  std::vector<double> m(uniq.size());
  const auto n = static_cast<std::int64_t>(uniq.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto* t = uniq[static_cast<std::size_t>(i)];
    m[static_cast<std::size_t>(i)] = offsupport_pair(b, K, t->R, t->Rt, cfg).value;
  }
  SigmaResult out;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    MeshFunction F(d), G(d);
    std::vector<double> num;
    for (const auto& t : families[fi]) {
      num.push_back(t.f_bound * t.g_bound * m[ids.at(key(t))]);
      F += t.f_bound * indicator(d, t.R);
      G += t.g_bound * indicator(d, t.Rt);
    }
    const double den = mixed_norm(F, profile.p1, profile.p2) * mixed_norm(G, conjugate(profile.q1), conjugate(profile.q2));
    const double v = den > 0.0 ? pairwise_sum(num) / den : 0.0;
    out.per_family.push_back(v);
    if (v > out.value) {
      out.value = v;
      out.best_family = fi;
    }
  }
  return out;
}

std::vector<SigmaFamily> sigma_families(const BoxDomain& d, const KernelSpec& K, const DyadicInterval& I,
                                        const DyadicInterval& J, int sparse_axis, int count, double A,
                                        std::uint64_t seed) {
  if (I.axis != 0 || J.axis != 1) throw InvalidInput("I must lie on axis 0 and J on axis 1");
  if (sparse_axis != 0 && sparse_axis != 1) throw InvalidInput("sparse axis must be 0 or 1");
  std::vector<SigmaFamily> out;
  const DyadicRectangle RJ{I, J};
  out.push_back({SigmaTerm{RJ, reflect_rectangle(d, RJ, A, K), 1.0, 1.0}});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const DyadicInterval& root = sparse_axis == 0 ? I : J;
  const LineDomain line = axis_line(d, sparse_axis);
  for (int c = 0; c < count; ++c) {
    LineFunction u(line);
    const auto b0 = cell_begin(d, root), e0 = cell_end(d, root);
    Complex mean = 0.0;
    for (auto i = b0; i < e0; ++i) {
      const double v = N(rng) * std::exp(2.0 * N(rng));
      u.values[static_cast<std::size_t>(i)] = v;
      mean += v;
    }
    mean /= static_cast<double>(e0 - b0);
    for (auto i = b0; i < e0; ++i) u.values[static_cast<std::size_t>(i)] -= mean;
    const auto S = sparse_stopping(CubeField::from_line(u), Cube{root.level, root.index, 0});
    SigmaFamily fam;
    for (const auto& node : S.nodes) {
      if (node.piece_sup == 0.0) continue;
      const DyadicInterval P{sparse_axis, node.cube.level, node.cube.m1};
      const DyadicRectangle R = sparse_axis == 0 ? DyadicRectangle{P, J} : DyadicRectangle{I, P};
      fam.push_back({R, reflect_rectangle(d, R, A, K), 1.0, node.piece_sup});
    }
    if (!fam.empty()) out.push_back(std::move(fam));
  }
  return out;
}

std::vector<DyadicInterval> sparse_intervals(const SparseCollection& S, int axis) {
  if (S.field.grid.dim != 1) throw InvalidInput("interval view needs a one-dimensional collection");
  std::vector<DyadicInterval> out;
  for (const auto& n : S.nodes) out.push_back({axis, n.cube.level, n.cube.m1});
  return out;
}

namespace {

void check_lambda(const SparseCollection& S, const std::vector<double>& lambda, double r) {
  if (lambda.size() != S.nodes.size()) throw InvalidInput("one coefficient per sparse node is required");
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidInput("exponent must lie in (1, inf)");
  const double rp = conjugate(r);
  double s = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0.0) throw InvalidInput("coefficients must be nonnegative");
    s += std::pow(lambda[i], rp) * S.nodes[i].measure;
  }
  if (s > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "coefficient normalization violated: sum lambda^{r'} |Q| = " << s;
    throw InvalidInput(os.str());
  }
}

}  // namespace

double double_sparse_osc_functional(const MeshFunction& b, const SparseCollection& S1, const SparseCollection& S2,
                                    const std::vector<double>& lambda1, const std::vector<double>& lambda2, double r1,
                                    double r2) {
  check_lambda(S1, lambda1, r1);
  check_lambda(S2, lambda2, r2);
  const auto& d = b.domain();
  if (S1.field.grid.depth != d.depth[0] || S2.field.grid.depth != d.depth[1] || S1.field.grid.extent != d.extent[0] ||
      S2.field.grid.extent != d.extent[1])
    throw InvalidInput("sparse collections do not match the mesh axes");
  const auto I = sparse_intervals(S1, 0), J = sparse_intervals(S2, 1);
  std::vector<double> rows(I.size());
  const auto n = static_cast<std::int64_t>(I.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t a = 0; a < n; ++a) {
    std::vector<double> t(J.size());
    for (std::size_t c = 0; c < J.size(); ++c) {
      const DyadicRectangle R{I[static_cast<std::size_t>(a)], J[c]};
      t[c] = lambda2[c] * S2.nodes[c].measure * oscillation(b, R);
    }
    rows[static_cast<std::size_t>(a)] =
        lambda1[static_cast<std::size_t>(a)] * S1.nodes[static_cast<std::size_t>(a)].measure * pairwise_sum(t);
  }
  return pairwise_sum(rows);
}

std::vector<double> normalized_lambda(const SparseCollection& S, const std::vector<double>& profile, double r) {
  if (profile.size() != S.nodes.size()) throw InvalidInput("one profile value per sparse node is required");
  const double rp = conjugate(r);
  double s = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) s += std::pow(std::abs(profile[i]), rp) * S.nodes[i].measure;
  std::vector<double> out(profile.size(), 0.0);
  if (!(s > 0.0)) return out;
  const double c = std::pow(s, -1.0 / rp);
  for (std::size_t i = 0; i < profile.size(); ++i) out[i] = c * std::abs(profile[i]);
  return out;
}

double cube_oscillation(const CubeField& b, const Cube& Q) {
  const auto cells = cube_cells(b.grid, Q);
  Complex m = 0.0;
  for (auto c : cells) m += b.values[c];
  m /= static_cast<double>(cells.size());
  double s = 0.0;
  for (auto c : cells) s += std::abs(b.values[c] - m);
  return s / static_cast<double>(cells.size());
}

double sparse_osc_value(const CubeField& b, const std::vector<Cube>& cubes, double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidInput("exponent must lie in (1, inf)");
  std::vector<double> t(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i)
    t[i] = b.grid.cube_measure(cubes[i].level) * std::pow(cube_oscillation(b, cubes[i]), r);
  return std::pow(pairwise_sum(t), 1.0 / r);
}

SparseOscResult sparse_osc_sup(const CubeField& b, double r, int random_candidates, std::uint64_t seed) {
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidInput("exponent must lie in (1, inf)");
  const auto& g = b.grid;
  std::vector<std::pair<std::string, std::vector<Cube>>> cands;
  for (int k = 0; k <= g.depth; ++k) {
    std::vector<Cube> level;
    const std::int64_t per = std::int64_t{1} << k;
    for (std::int64_t m1 = 0; m1 < per; ++m1)
      for (std::int64_t m2 = 0; m2 < (g.dim == 1 ? 1 : per); ++m2) level.push_back({k, m1, m2});
    cands.emplace_back("level:" + std::to_string(k), std::move(level));
  }
  auto stopping_cubes = [&](CubeField f) {
    Complex mean = 0.0;
    for (const auto& z : f.values) mean += z;
    mean /= static_cast<double>(f.values.size());
    for (auto& z : f.values) z -= mean;
    std::vector<Cube> out;
    for (const auto& n : sparse_stopping(f, Cube{}, 1e-8).nodes) out.push_back(n.cube);
    return out;
  };
  cands.emplace_back("stopping:b", stopping_cubes(b));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int c = 0; c < random_candidates; ++c) {
    CubeField f = b;
    for (auto& z : f.values) z = N(rng) * std::exp(2.0 * N(rng));
    cands.emplace_back("stopping:random:" + std::to_string(c), stopping_cubes(f));
  }
  std::vector<double> vals(cands.size());
  const auto n = static_cast<std::int64_t>(cands.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i)
    vals[static_cast<std::size_t>(i)] = sparse_osc_value(b, cands[static_cast<std::size_t>(i)].second, r);
  SparseOscResult out;
  out.candidates = cands.size();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] > out.value || i == 0) {
      out.value = vals[i];
      out.best = cands[i].first;
    }
  return out;
}

}  // namespace bpcl
