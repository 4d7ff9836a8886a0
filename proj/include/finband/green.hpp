#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "finband/errors.hpp"
#include "finband/poly.hpp"

namespace finband {

// Distance from a complex point to the segment [-2, 2] on the real axis.
inline double slit_distance(cdouble z) {
  if (std::abs(z.real()) <= 2.0) return std::abs(z.imag());
  const double xr = z.real() > 0.0 ? 2.0 : -2.0;
  return std::abs(z - cdouble(xr, 0.0));
}

// phi(z) = (z + sqrt(z^2-4))/2 with |phi| > 1, cut exactly along [-2,2];
// the branch comes from sqrt(z-2)*sqrt(z+2) with principal square roots.
inline cdouble joukowski_phi(cdouble z) {
  if (slit_distance(z) < 1e-12) throw ValidationError("joukowski_phi: z lies on the slit [-2,2]");
  const cdouble root = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return 0.5 * (z + root);
}

// One evaluation of a functional model: the coupled values at one point.
struct GreenPoint {
  cdouble z;
  cdouble b;
  cdouble w;
  cdouble lambda;
};

// Trivial model on the punctured disk: z = zeta^d + zeta^{-d}, b = zeta.
struct TrivialModel {
  int d;

  GreenPoint eval(cdouble zeta) const {
    if (d < 1) throw ValidationError("TrivialModel: d must be >= 1");
    const double r = std::abs(zeta);
    if (r == 0.0 || r >= 1.0) throw ValidationError("TrivialModel: zeta must satisfy 0 < |zeta| < 1");
    const cdouble zd = std::pow(zeta, d);
    const cdouble z = zd + 1.0 / zd;
    const cdouble w = 1.0 / (double(d) * (zd - 1.0 / zd));
    return {z, zeta, w, z * zd};
  }
};

// Rejects polynomials whose critical values are complex or inside (-2,2).
inline void check_tmodel_polynomial(const Poly& t) {
  if (t.degree() < 1) throw ValidationError("t-model: polynomial degree must be >= 1");
  if (!t.is_real()) throw ValidationError("t-model: polynomial must have real coefficients");
  const Poly dt = t.derivative();
  if (dt.degree() >= 1) {
    for (const cdouble& c : poly_roots(dt)) {
      const cdouble v = t.eval(c);
      if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ValidationError("t-model: critical value is not real");
      if (std::abs(v.real()) < 2.0 - 1e-12)
        throw ValidationError("t-model: critical value lies inside (-2,2)");
    }
  }
}

// Second model of the same operator: z = T(u), b a d-th root of 1/phi(T(u)).
struct TModel {
  Poly t;
  int branch = 0;

  TModel(Poly t_, int branch_) : t(std::move(t_)), branch(branch_) {
    check_tmodel_polynomial(t);
    if (branch < 0 || branch >= t.degree()) throw ValidationError("TModel: branch index out of range");
  }

  int d() const { return t.degree(); }

  GreenPoint eval(cdouble u) const {
    const cdouble z = t.eval(u);
    if (slit_distance(z) < 1e-12) throw ValidationError("TModel: u lies on the spectrum T^{-1}[-2,2]");
    const int deg = d();
    const cdouble phi = joukowski_phi(z);
    const cdouble root_of_unity = std::polar(1.0, 2.0 * std::numbers::pi * double(branch) / double(deg));
    const cdouble b = root_of_unity * std::exp(-std::log(phi) / double(deg));
    // sqrt(z-2)sqrt(z+2) makes |(wd)^{-1} + z| = 2/|phi| < 2 automatic
    const cdouble sq = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
    const cdouble w = -1.0 / (double(deg) * sq);
    const cdouble lambda = z * std::pow(b, deg);
    return {z, b, w, lambda};
  }
};

using GreenBranch = std::variant<TrivialModel, TModel>;

inline GreenPoint eval_branch(const GreenBranch& model, cdouble point) {
  return std::visit([&](const auto& m) { return m.eval(point); }, model);
}

inline GreenPoint trivial_eval(int d, cdouble zeta) { return TrivialModel{d}.eval(zeta); }

inline GreenPoint tmodel_eval(const Poly& t, int branch, cdouble u) { return TModel(t, branch).eval(u); }

// Green's function of the complement of E = T^{-1}[-2,2], with logarithmic
// pole at infinity: G(u) = (1/d) log|phi(T(u))| = -log|b_l(u)|.
struct SlitDomainGreen {
  Poly t;

  explicit SlitDomainGreen(Poly t_) : t(std::move(t_)) { check_tmodel_polynomial(t); }

  bool in_domain(cdouble u, double margin = 1e-12) const { return slit_distance(t.eval(u)) >= margin; }

  double operator()(cdouble u) const {
    const cdouble z = t.eval(u);
    return std::log(std::abs(joukowski_phi(z))) / double(t.degree());
  }
};

inline double greens_function(const Poly& t, cdouble u) { return SlitDomainGreen(t)(u); }

// lim_{zeta->0} zeta^d Z(zeta), sampled on a small circle.
inline double z_normalization_limit(const std::function<cdouble(cdouble)>& zfun, int d,
                                    double radius = 1e-4, int samples = 16) {
  cdouble acc = 0.0;
  for (int j = 0; j < samples; ++j) {
    const cdouble zeta = std::polar(radius, 2.0 * std::numbers::pi * double(j) / double(samples));
    acc += std::pow(zeta, d) * zfun(zeta);
  }
  acc /= double(samples);
  if (std::abs(acc.imag()) > 1e-6 * std::max(1.0, std::abs(acc)))
    throw NumericalError("z_normalization_limit: limit did not come out real");
  return acc.real();
}

// Normalization of the trivial model itself: must come out 1 > 0.
inline double z_normalization_check(int d) {
  return z_normalization_limit(
      [d](cdouble zeta) { return std::pow(zeta, d) + std::pow(zeta, -d); }, d);
}

// Matrix of the multiplication operator by Z in the basis {zeta^l} of
// L^2 of the unit circle, entries <Z zeta^n, zeta^m> over the window
// [n0, n1); trapezoid quadrature is exact for band-limited symbols.
inline Eigen::MatrixXcd multiplication_matrix(const std::function<cdouble(cdouble)>& zfun,
                                              long long n0, long long n1, int nodes = 4096) {
  const int size = static_cast<int>(n1 - n0);
  std::vector<cdouble> values(static_cast<std::size_t>(nodes));
  for (int t = 0; t < nodes; ++t)
    values[static_cast<std::size_t>(t)] =
        zfun(std::polar(1.0, 2.0 * std::numbers::pi * double(t) / double(nodes)));

  // Fourier coefficients c_k = (1/N) sum Z(e^{i th}) e^{-ik th} for the
  // needed band k = m - n in [-(size-1), size-1]
  std::vector<cdouble> fourier(static_cast<std::size_t>(2 * size - 1));
  for (int k = -(size - 1); k <= size - 1; ++k) {
    std::complex<long double> acc = 0.0L;
    for (int t = 0; t < nodes; ++t) {
      const double th = 2.0 * std::numbers::pi * double(t) / double(nodes);
      const cdouble ph = std::polar(1.0, -double(k) * th);
      const cdouble term = values[static_cast<std::size_t>(t)] * ph;
      acc += std::complex<long double>(term.real(), term.imag());
    }
    acc /= static_cast<long double>(nodes);
    fourier[static_cast<std::size_t>(k + size - 1)] = cdouble(double(acc.real()), double(acc.imag()));
  }

  Eigen::MatrixXcd m(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) m(i, j) = fourier[static_cast<std::size_t>((i - j) + size - 1)];
  return m;
}

// Multiplication by zeta^d + zeta^{-d} in the standard circle basis; must
// reproduce the S^d + S^{-d} section entrywise.
inline Eigen::MatrixXcd trivial_basis_matrix(int d, long long n0, long long n1) {
  if (n1 - n0 < 2 * d + 1) throw ValidationError("trivial_basis_matrix: window shorter than 2d+1");
  return multiplication_matrix(
      [d](cdouble zeta) { return std::pow(zeta, d) + std::pow(zeta, -d); }, n0, n1);
}

struct SeparationResult {
  bool separated = true;
  int branch_i = -1;
  int branch_j = -1;
  GreenPoint point_i{};
  GreenPoint point_j{};
};

namespace detail {

inline SeparationResult find_shared_pair(const std::vector<GreenPoint>& branches) {
  for (std::size_t i = 0; i < branches.size(); ++i)
    for (std::size_t j = i + 1; j < branches.size(); ++j) {
      const bool same_zw = std::abs(branches[i].z - branches[j].z) < 1e-10 &&
                           std::abs(branches[i].w - branches[j].w) < 1e-10;
      const bool distinct_b = std::abs(branches[i].b - branches[j].b) > 1e-10;
      if (same_zw && distinct_b)
        return {false, static_cast<int>(i), static_cast<int>(j), branches[i], branches[j]};
    }
  return {};
}

}  // namespace detail

// Do (z, w) separate the d points of the model above z?  Returns the
// witness pair of distinct branches sharing (z, w) when they do not.
inline SeparationResult separation_check_trivial(int d, cdouble z) {
  if (slit_distance(z) < 1e-6) throw ValidationError("separation_check: z too close to a branch point");
  const cdouble y_in = 1.0 / joukowski_phi(z);  // |y_in| < 1
  const cdouble zeta0 = std::exp(std::log(y_in) / double(d));
  std::vector<GreenPoint> branches;
  for (int l = 0; l < d; ++l) {
    const cdouble zeta = zeta0 * std::polar(1.0, 2.0 * std::numbers::pi * double(l) / double(d));
    branches.push_back(TrivialModel{d}.eval(zeta));
  }
  return detail::find_shared_pair(branches);
}

inline SeparationResult separation_check_tmodel(const Poly& t, cdouble z) {
  check_tmodel_polynomial(t);
  if (slit_distance(z) < 1e-6) throw ValidationError("separation_check: z too close to a branch point");
  const int d = t.degree();
  std::vector<GreenPoint> branches;
  const cdouble phi = joukowski_phi(z);
  const cdouble sq = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  const cdouble w = -1.0 / (double(d) * sq);
  for (int l = 0; l < d; ++l) {
    const cdouble b = std::polar(1.0, 2.0 * std::numbers::pi * double(l) / double(d)) *
                      std::exp(-std::log(phi) / double(d));
    branches.push_back(GreenPoint{z, b, w, z * std::pow(b, d)});
  }
  return detail::find_shared_pair(branches);
}

}  // namespace finband
