#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "finband/errors.hpp"
#include "finband/perm.hpp"
#include "finband/poly.hpp"

namespace finband {

// Rational self-map of CP^1 given by coprime numerator/denominator.
struct RationalMap {
  Poly num;
  Poly den;

  RationalMap(Poly num_, Poly den_) : num(std::move(num_)), den(std::move(den_)) {
    if (num.is_zero() || den.is_zero()) throw ValidationError("RationalMap: zero numerator or denominator");
    if (num.degree() >= 1 && den.degree() >= 1) {
      for (const cdouble& r : poly_roots(den)) {
        const double scale = num.max_abs_coeff() * std::pow(std::max(1.0, std::abs(r)), num.degree());
        if (std::abs(num.eval(r)) <= 1e-8 * scale)
          throw ValidationError("RationalMap: numerator and denominator share a root");
      }
    }
  }

  static RationalMap polynomial(Poly p) { return RationalMap(std::move(p), Poly::constant(1.0)); }

  int degree() const { return std::max(num.degree(), den.degree()); }

  cdouble eval(cdouble zeta) const { return num.eval(zeta) / den.eval(zeta); }

  cdouble derivative_value(cdouble zeta) const {
    const cdouble d = den.eval(zeta);
    return (num.derivative().eval(zeta) * d - num.eval(zeta) * den.derivative().eval(zeta)) / (d * d);
  }
};

// A point of CP^1, finite or infinity.
struct SpherePoint {
  bool at_infinity = false;
  cdouble value{0.0, 0.0};

  static SpherePoint finite(cdouble v) { return {false, v}; }
  static SpherePoint infinity() { return {true, {0.0, 0.0}}; }
};

inline bool same_sphere_point(const SpherePoint& a, const SpherePoint& b, double tol = 1e-6) {
  if (a.at_infinity != b.at_infinity) return false;
  if (a.at_infinity) return true;
  return std::abs(a.value - b.value) <= tol * std::max(1.0, std::abs(a.value));
}

// One branch value with its ramification indices (only indices >= 2 listed).
struct BranchProfile {
  SpherePoint point;
  std::vector<int> indices;
};

namespace detail {

// Ramification index of f at zeta = infinity and the corresponding value,
// via the degree of the chart substitution.
inline std::pair<SpherePoint, int> ramification_at_infinity(const RationalMap& f) {
  const int m = f.num.degree();
  const int n = f.den.degree();
  if (m > n) return {SpherePoint::infinity(), m - n};
  if (m < n) return {SpherePoint::finite(0.0), n - m};
  const cdouble c = f.num.leading() / f.den.leading();
  const Poly g = (f.num - c * f.den).trimmed(1e-12);
  const int e = m - g.degree();  // infinity has this multiplicity in the fiber over c
  return {SpherePoint::finite(c), e};
}

// Full ramification profile of the fiber over a finite value v; indices >= 2.
inline std::vector<int> profile_over_finite(const RationalMap& f, cdouble v) {
  const int deg = f.degree();
  const Poly g = (f.num - v * f.den).trimmed(1e-12);
  std::vector<int> idx;
  if (g.degree() >= 1)  // otherwise the whole fiber sits at infinity
    for (const auto& [root, mult] : clustered_roots(g))
      if (mult >= 2) idx.push_back(mult);
  if (g.degree() < deg && deg - g.degree() >= 2) idx.push_back(deg - g.degree());
  std::sort(idx.begin(), idx.end(), std::greater<int>());
  return idx;
}

inline std::vector<int> profile_over_infinity(const RationalMap& f) {
  std::vector<int> idx;
  if (f.den.degree() >= 1)
    for (const auto& [root, mult] : clustered_roots(f.den))
      if (mult >= 2) idx.push_back(mult);
  const int m = f.num.degree();
  const int n = f.den.degree();
  if (m - n >= 2) idx.push_back(m - n);
  std::sort(idx.begin(), idx.end(), std::greater<int>());
  return idx;
}

}  // namespace detail

// All branch values of f with their ramification profiles; finite values
// sorted by (Re, Im), infinity last.
inline std::vector<BranchProfile> branching_divisor(const RationalMap& f) {
  if (f.degree() < 2) throw ValidationError("branching_divisor: map degree must be >= 2");

  std::vector<cdouble> finite_values;
  bool inf_candidate = false;

  const Poly wronskian = (f.num.derivative() * f.den - f.num * f.den.derivative()).trimmed(1e-12);
  if (wronskian.degree() >= 1) {
    for (const cdouble& c : poly_roots(wronskian)) {
      const double den_scale = std::max(f.den.max_abs_coeff(), 1e-30) *
                               std::pow(std::max(1.0, std::abs(c)), std::max(f.den.degree(), 0));
      if (std::abs(f.den.eval(c)) <= 1e-8 * den_scale) {
        inf_candidate = true;  // multiple pole
        continue;
      }
      finite_values.push_back(f.eval(c));
    }
  }

  const auto [inf_image, inf_index] = detail::ramification_at_infinity(f);
  if (inf_index >= 2) {
    if (inf_image.at_infinity) inf_candidate = true;
    else finite_values.push_back(inf_image.value);
  }
  if (f.num.degree() - f.den.degree() >= 2) inf_candidate = true;

  // cluster candidate values, then recompute each profile from the fiber
  std::vector<cdouble> reps;
  for (const cdouble& v : finite_values) {
    bool found = false;
    for (const cdouble& r : reps)
      if (std::abs(v - r) <= 1e-8 * std::max(1.0, std::abs(r))) { found = true; break; }
    if (!found) reps.push_back(v);
  }
  std::sort(reps.begin(), reps.end(), [](cdouble a, cdouble b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  std::vector<BranchProfile> divisor;
  for (const cdouble& v : reps) {
    std::vector<int> idx = detail::profile_over_finite(f, v);
    if (!idx.empty()) divisor.push_back({SpherePoint::finite(v), std::move(idx)});
  }
  if (inf_candidate) {
    std::vector<int> idx = detail::profile_over_infinity(f);
    if (!idx.empty()) divisor.push_back({SpherePoint::infinity(), std::move(idx)});
  }
  return divisor;
}

// The D distinct preimages of a finite regular value, sorted by argument
// (ties by modulus).
inline std::vector<cdouble> fiber(const RationalMap& f, cdouble w) {
  const int deg = f.degree();
  for (const auto& bp : branching_divisor(f))
    if (!bp.point.at_infinity && std::abs(w - bp.point.value) < 1e-6)
      throw ValidationError("fiber: value is within 1e-6 of a branch point");
  const Poly g = (f.num - w * f.den).trimmed(1e-12);
  if (g.degree() != deg)
    throw ValidationError("fiber: the fiber over this value meets infinity");
  std::vector<cdouble> pts = poly_roots(g);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) <= 1e-9 * std::max(1.0, std::abs(pts[i])))
        throw ValidationError("fiber: preimages are numerically degenerate");
  std::sort(pts.begin(), pts.end(), [](cdouble a, cdouble b) {
    const double aa = std::arg(a), ab = std::arg(b);
    if (std::abs(aa - ab) > 1e-12) return aa < ab;
    return std::abs(a) < std::abs(b);
  });
  return pts;
}

namespace detail {

// Continue every fiber point from value w_a to value w_b along the straight
// segment between them.  Predictor from dz = den/(num' - w den') dw, Newton
// corrector on num - w den, step halving on collision or non-convergence.
inline void continue_segment(const RationalMap& f, cdouble w_a, cdouble w_b,
                             std::vector<cdouble>& pts, double init_step) {
  const double seg_len = std::abs(w_b - w_a);
  if (seg_len == 0.0) return;
  const Poly dnum = f.num.derivative();
  const Poly dden = f.den.derivative();
  constexpr double kNewtonTol = 1e-12;

  double t = 0.0;
  double h = std::min(1.0, std::max(init_step, 1e-6) / seg_len);
  while (t < 1.0) {
    const double step0 = std::min(h, 1.0 - t);
    if (step0 <= 1e-15) break;
    double step = step0;
    int halvings = 0;
    double minsep_cur = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        minsep_cur = std::min(minsep_cur, std::abs(pts[i] - pts[j]));
    for (;;) {
      const cdouble w_cur = w_a + t * (w_b - w_a);
      const cdouble w_next = w_a + (t + step) * (w_b - w_a);
      std::vector<cdouble> trial = pts;
      bool ok = true;
      for (cdouble& zeta : trial) {
        const cdouble denom = dnum.eval(zeta) - w_cur * dden.eval(zeta);
        cdouble pred = zeta;
        if (std::abs(denom) > 1e-300) pred += f.den.eval(zeta) / denom * (w_next - w_cur);
        cdouble x = pred;
        bool converged = false;
        for (int it = 0; it < 5; ++it) {
          const cdouble hx = f.num.eval(x) - w_next * f.den.eval(x);
          const cdouble hpx = dnum.eval(x) - w_next * dden.eval(x);
          if (std::abs(hpx) < 1e-300) break;
          const cdouble delta = hx / hpx;
          x -= delta;
          if (std::abs(delta) <= kNewtonTol * std::max(1.0, std::abs(x))) { converged = true; break; }
        }
        // the corrected point must stay near its predictor relative to the
        // sheet separation, otherwise Newton may have hopped sheets
        if (!converged ||
            (pts.size() >= 2 && std::abs(x - pred) > 0.4 * minsep_cur)) {
          ok = false;
          break;
        }
        zeta = x;
      }
      if (ok) {
        double minsep = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < trial.size(); ++i)
          for (std::size_t j = i + 1; j < trial.size(); ++j)
            minsep = std::min(minsep, std::abs(trial[i] - trial[j]));
        const double guard = 10.0 * kNewtonTol * std::max(1.0, std::abs(w_next));
        if (trial.size() >= 2 && minsep <= guard) ok = false;
        if (ok) {
          pts = std::move(trial);
          t += step;
          break;
        }
      }
      step *= 0.5;
      if (++halvings > 20) throw NumericalError("lift: continuation ambiguity after 20 step halvings");
    }
  }
}

}  // namespace detail

// Analytic continuation of the whole fiber along a closed polyline; returns
// the induced permutation of labels (sheet i ends on sheet perm(i)).
inline Perm lift_loop(const RationalMap& f, const std::vector<cdouble>& loop,
                      const std::vector<cdouble>& fiber_points) {
  if (loop.size() < 2) throw ValidationError("lift_loop: polyline needs at least two nodes");
  double arclen = 0.0;
  for (std::size_t i = 0; i + 1 < loop.size(); ++i) arclen += std::abs(loop[i + 1] - loop[i]);
  const double init_step = arclen / 64.0;

  std::vector<cdouble> pts = fiber_points;
  for (std::size_t i = 0; i + 1 < loop.size(); ++i)
    detail::continue_segment(f, loop[i], loop[i + 1], pts, init_step);

  std::vector<int> images(fiber_points.size(), -1);
  std::vector<bool> taken(fiber_points.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < fiber_points.size(); ++j) {
      const double dd = std::abs(pts[i] - fiber_points[j]);
      if (dd < best_d) { best_d = dd; best = static_cast<int>(j); }
    }
    if (best_d > 1e-6 * std::max(1.0, std::abs(pts[i])) || taken[static_cast<std::size_t>(best)])
      throw NumericalError("lift_loop: continued point does not match a fiber label");
    taken[static_cast<std::size_t>(best)] = true;
    images[i] = best;
  }
  return Perm(std::move(images));
}

// Branch points, base point, loop system and monodromy permutations,
// aligned index-by-index; loops kept for inspection/export.
struct HurwitzData {
  cdouble basepoint{0.0, 0.0};
  std::vector<SpherePoint> branch_points;
  std::vector<Perm> perms;
  std::vector<cdouble> labels;
  std::vector<std::vector<cdouble>> loops;
  int degree = 0;
};

namespace detail {

inline std::vector<cdouble> circle_nodes(cdouble center, double radius, double start_angle,
                                         bool counterclockwise, int segments = 64) {
  std::vector<cdouble> nodes;
  nodes.reserve(static_cast<std::size_t>(segments) + 1);
  const double sweep = counterclockwise ? 2.0 * std::numbers::pi : -2.0 * std::numbers::pi;
  for (int s = 0; s <= segments; ++s) {
    const double ang = start_angle + sweep * double(s) / double(segments);
    nodes.push_back(center + radius * cdouble(std::cos(ang), std::sin(ang)));
  }
  return nodes;
}

}  // namespace detail

namespace detail {

// Segment-to-point distance in the plane.
inline double segment_distance(cdouble a, cdouble b, cdouble p) {
  const cdouble ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

}  // namespace detail

// Monodromy with an explicit base point.  The loop system runs through a
// hub determined by the branch configuration alone: every loop is
// (base -> hub -> approach -> circle -> back).  Since the base point only
// contributes the shared connector segment, changing it conjugates all
// permutations by one transport permutation, so outputs from different
// base points are Hurwitz-equivalent by construction.  Throws when the
// connector geometry is degenerate (monodromy(f, rng) resamples instead).
inline HurwitzData monodromy(const RationalMap& f, cdouble w) {
  const std::vector<BranchProfile> divisor = branching_divisor(f);
  if (divisor.empty()) throw NumericalError("monodromy: no branch points found");

  std::vector<cdouble> finite_vals;
  bool has_inf = false;
  std::vector<std::vector<int>> finite_idx;
  std::vector<int> inf_idx;
  for (const auto& bp : divisor) {
    if (bp.point.at_infinity) { has_inf = true; inf_idx = bp.indices; }
    else { finite_vals.push_back(bp.point.value); finite_idx.push_back(bp.indices); }
  }
  const std::size_t nfin = finite_vals.size();

  for (const cdouble& v : finite_vals)
    if (std::abs(w - v) < 1e-3) throw ValidationError("monodromy: base point too close to a branch point");

  cdouble centroid = 0.0;
  for (const cdouble& v : finite_vals) centroid += v;
  if (nfin > 0) centroid /= double(nfin);
  double spread = 1.0;
  for (const cdouble& v : finite_vals) spread = std::max(spread, std::abs(v - centroid));

  // hub above the configuration with well-separated approach directions
  cdouble hub;
  std::vector<double> dirs(nfin);
  bool hub_ok = false;
  for (int k = 0; k < 64 && !hub_ok; ++k) {
    hub = centroid + 4.0 * spread * std::polar(1.0, std::numbers::pi / 2.0 + 0.19 * double(k));
    hub_ok = true;
    const cdouble down = (centroid - hub) / std::abs(centroid - hub);
    for (std::size_t i = 0; i < nfin; ++i) dirs[i] = std::arg((finite_vals[i] - hub) / down);
    for (std::size_t i = 0; i < nfin && hub_ok; ++i)
      for (std::size_t j = i + 1; j < nfin; ++j)
        if (std::abs(dirs[i] - dirs[j]) < 0.05) { hub_ok = false; break; }
  }
  if (!hub_ok) throw NumericalError("monodromy: could not place a hub with separated directions");

  auto loop_radius = [&](std::size_t i) {
    double r = std::abs(hub - finite_vals[i]);
    for (std::size_t j = 0; j < nfin; ++j)
      if (j != i) r = std::min(r, std::abs(finite_vals[i] - finite_vals[j]));
    return 0.25 * r;
  };

  // the connector must clear every loop circle
  for (std::size_t i = 0; i < nfin; ++i)
    if (detail::segment_distance(w, hub, finite_vals[i]) < 1.5 * loop_radius(i))
      throw ValidationError("monodromy: connector passes too close to a branch point");

  std::vector<std::size_t> order(nfin);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dirs[a] < dirs[b]; });

  HurwitzData data;
  data.basepoint = w;
  data.degree = f.degree();
  data.labels = fiber(f, w);

  for (std::size_t oi : order) {
    const cdouble v = finite_vals[oi];
    const double r = loop_radius(oi);
    const cdouble dir = (hub - v) / std::abs(hub - v);
    const cdouble entry = v + r * dir;
    std::vector<cdouble> loop;
    loop.push_back(w);
    loop.push_back(hub);
    loop.push_back(entry);
    const auto circle = detail::circle_nodes(v, r, std::arg(dir), /*ccw=*/true);
    loop.insert(loop.end(), circle.begin(), circle.end());
    loop.push_back(hub);
    loop.push_back(w);
    data.perms.push_back(lift_loop(f, loop, data.labels));
    data.branch_points.push_back(SpherePoint::finite(v));
    data.loops.push_back(std::move(loop));
    const auto expected = finite_idx[oi];
    if (perm_nontrivial_cycles(data.perms.back()) != expected)
      throw NumericalError("monodromy: lifted cycle type disagrees with the branching divisor");
  }

  if (has_inf) {
    double r_inf = 4.0 * std::max(std::abs(hub - centroid), spread);
    r_inf = std::max(r_inf, 2.0 * std::abs(w - centroid));
    const cdouble up = (hub - centroid) / std::abs(hub - centroid);
    const cdouble exit = centroid + up * r_inf;
    std::vector<cdouble> loop;
    loop.push_back(w);
    loop.push_back(hub);
    loop.push_back(exit);
    // clockwise in the finite chart = counterclockwise around infinity
    const auto circle = detail::circle_nodes(centroid, r_inf, std::arg(up), /*ccw=*/false);
    loop.insert(loop.end(), circle.begin(), circle.end());
    loop.push_back(hub);
    loop.push_back(w);
    data.perms.push_back(lift_loop(f, loop, data.labels));
    data.branch_points.push_back(SpherePoint::infinity());
    data.loops.push_back(std::move(loop));
    if (perm_nontrivial_cycles(data.perms.back()) != inf_idx)
      throw NumericalError("monodromy: cycle type over infinity disagrees with the branching divisor");
  }

  // product in path order must be the identity
  Perm prod = Perm::identity(data.degree);
  for (const Perm& s : data.perms) prod = perm_compose(s, prod);
  if (!prod.is_identity()) throw NumericalError("monodromy: permutation product is not the identity");

  return data;
}

// Seeded variant: base point uniform on the circle of radius 2 max|z_i|,
// re-sampled on degenerate geometry.
inline HurwitzData monodromy(const RationalMap& f, std::mt19937_64& rng) {
  const std::vector<BranchProfile> divisor = branching_divisor(f);
  double rmax = 1.0;
  for (const auto& bp : divisor)
    if (!bp.point.at_infinity) rmax = std::max(rmax, std::abs(bp.point.value));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double th = angle(rng);
    const cdouble w = 2.0 * rmax * cdouble(std::cos(th), std::sin(th));
    try {
      return monodromy(f, w);
    } catch (const ValidationError&) {
      continue;  // bad geometry, resample
    }
  }
  throw NumericalError("monodromy: failed to find a usable base point");
}

// Riemann-Hurwitz: 2 - 2g = 2D - sum (cycle length - 1); requires the
// permutations to generate a transitive group (connected covering).
inline int genus(const HurwitzData& h) {
  std::vector<int> parent(static_cast<std::size_t>(h.degree));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const Perm& s : h.perms)
    for (int i = 0; i < s.size(); ++i) {
      const int a = find(i), b = find(s(i));
      if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
  for (int i = 1; i < h.degree; ++i)
    if (find(i) != find(0)) throw ValidationError("genus: monodromy group is not transitive");

  int defect = 0;
  for (const Perm& s : h.perms)
    for (int len : perm_cycle_type(s)) defect += len - 1;
  const int two_minus_2g = 2 * h.degree - defect;
  if ((2 - two_minus_2g) % 2 != 0) throw NumericalError("genus: Riemann-Hurwitz parity violated");
  return (2 - two_minus_2g) / 2;
}

// Simultaneous conjugacy of the two permutation systems, branch points
// matched within tolerance; brute force over relabelings (degree <= 7).
inline bool hurwitz_equivalent(const HurwitzData& h1, const HurwitzData& h2) {
  if (h1.degree != h2.degree) return false;
  if (h1.degree > 7) throw ValidationError("hurwitz_equivalent: degree must be <= 7");
  if (h1.branch_points.size() != h2.branch_points.size()) return false;

  // match branch points bijectively
  std::vector<int> match(h1.branch_points.size(), -1);
  std::vector<bool> used(h2.branch_points.size(), false);
  for (std::size_t i = 0; i < h1.branch_points.size(); ++i) {
    for (std::size_t j = 0; j < h2.branch_points.size(); ++j) {
      if (used[j]) continue;
      if (same_sphere_point(h1.branch_points[i], h2.branch_points[j])) {
        match[i] = static_cast<int>(j);
        used[j] = true;
        break;
      }
    }
    if (match[i] < 0) return false;
  }

  std::vector<int> images(static_cast<std::size_t>(h1.degree));
  std::iota(images.begin(), images.end(), 0);
  do {
    const Perm tau(images);
    bool all = true;
    for (std::size_t i = 0; i < h1.perms.size(); ++i) {
      if (!(perm_conjugate(h1.perms[i], tau) == h2.perms[static_cast<std::size_t>(match[i])])) {
        all = false;
        break;
      }
    }
    if (all) return true;
  } while (std::next_permutation(images.begin(), images.end()));
  return false;
}

}  // namespace finband
