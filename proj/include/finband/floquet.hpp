#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "finband/ergodic.hpp"
#include "finband/errors.hpp"
#include "finband/poly.hpp"

namespace finband {

// 2d x 2d one-step transfer matrix of the (2d+1)-term recurrence: shift
// pattern on the first 2d-1 rows, coefficient quotients in the last row,
// with the spectral parameter entering through the middle column.
inline Eigen::MatrixXcd companion_matrix(const ErgodicSystem& sys, long long omega, cdouble z) {
  const int d = sys.half_bandwidth();
  const int n = 2 * d;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  const cdouble qd = sys.q(d, omega + d);  // real positive by invariant
  for (int j = 0; j < n; ++j) {
    const int k = j - d;
    if (k == 0)
      a(n - 1, j) = std::conj((z - sys.q(0, omega)) / qd);
    else
      a(n - 1, j) = -std::conj(sys.q(k, omega + k) / qd);
  }
  return a;
}

// A(z; T^{p-1} w0) ... A(z; w0) with w0 = 0.
inline Eigen::MatrixXcd period_monodromy(const ErgodicSystem& sys, cdouble z) {
  Eigen::MatrixXcd prod = companion_matrix(sys, 0, z);
  for (int w = 1; w < sys.period(); ++w) prod = companion_matrix(sys, w, z) * prod;
  return prod;
}

inline std::vector<cdouble> floquet_multipliers(const ErgodicSystem& sys, cdouble z) {
  const Eigen::MatrixXcd m = period_monodromy(sys, z);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("floquet_multipliers: eigensolver failed");
  std::vector<cdouble> out(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier; exact-ish
// for the small matrices used here.
inline Poly char_poly(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<cdouble> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Eigen::MatrixXcd::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / double(k);
  }
  return Poly(std::move(c));
}

// Period-p tridiagonal coefficients (a_n > 0 off-diagonal, b_n diagonal).
struct PeriodicJacobi {
  std::vector<double> a;
  std::vector<double> b;

  PeriodicJacobi(std::vector<double> a_, std::vector<double> b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.empty() || a.size() != b.size())
      throw ValidationError("PeriodicJacobi: a and b must be nonempty and equally long");
    for (double v : a)
      if (!(v > 0.0)) throw ValidationError("PeriodicJacobi: off-diagonal entries must be positive");
  }

  int period() const { return static_cast<int>(a.size()); }

  static PeriodicJacobi free_jacobi(int period) {
    return PeriodicJacobi(std::vector<double>(static_cast<std::size_t>(period), 1.0),
                          std::vector<double>(static_cast<std::size_t>(period), 0.0));
  }
};

namespace detail {

struct PolyMat2 {
  Poly m00, m01, m10, m11;

  PolyMat2 operator*(const PolyMat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
};

}  // namespace detail

// Discriminant Delta(z) = trace prod_{n=p..1} [[(z-b_n)/a_n, -a_{n-1}/a_n],[1,0]]
// with periodic wrap a_0 = a_p, computed in exact polynomial arithmetic.
inline Poly discriminant(const PeriodicJacobi& j0) {
  const int p = j0.period();
  auto step = [&](int n) {  // n = 1..p
    const double an = j0.a[static_cast<std::size_t>(n - 1)];
    const double bn = j0.b[static_cast<std::size_t>(n - 1)];
    const double aprev = j0.a[static_cast<std::size_t>((n - 2 + p) % p)];
    return detail::PolyMat2{Poly({-bn / an, 1.0 / an}), Poly::constant(-aprev / an),
                            Poly::constant(1.0), Poly::zero()};
  };
  detail::PolyMat2 prod = step(p);
  for (int n = p - 1; n >= 1; --n) prod = prod * step(n);
  return prod.m00 + prod.m11;
}

// Ordered disjoint closed real intervals.
struct BandSet {
  std::vector<std::pair<double, double>> intervals;

  bool contains(double x, double tol = 0.0) const {
    for (const auto& [l, r] : intervals)
      if (x >= l - tol && x <= r + tol) return true;
    return false;
  }

  double distance(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [l, r] : intervals) {
      if (x < l) best = std::min(best, l - x);
      else if (x > r) best = std::min(best, x - r);
      else return 0.0;
    }
    return best;
  }
};

// {z real : -2 <= Delta(z) <= 2} as maximal disjoint intervals; endpoints are
// real roots of Delta -+ 2, deduplicated at 1e-9, with midpoint sign tests.
// Tangencies (closed gaps) collapse into the interval interior.
inline BandSet bands_from_discriminant(const Poly& delta) {
  if (delta.degree() < 1) throw ValidationError("bands_from_discriminant: degree must be >= 1");
  if (!delta.is_real()) throw ValidationError("bands_from_discriminant: discriminant must have real coefficients");

  std::vector<double> cands;
  for (double s : {-2.0, 2.0}) {
    const Poly shifted = delta - Poly::constant(s);
    if (shifted.degree() < 1) continue;
    for (const cdouble& r : poly_roots(shifted))
      if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r.real()))) cands.push_back(r.real());
  }
  std::sort(cands.begin(), cands.end());
  std::vector<double> pts;
  for (double x : cands)
    if (pts.empty() || x - pts.back() > 1e-9 * std::max(1.0, std::abs(x))) pts.push_back(x);

  BandSet bands;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double v = delta.eval(mid).real();
    if (v >= -2.0 && v <= 2.0) {
      if (!bands.intervals.empty() && bands.intervals.back().second == pts[i])
        bands.intervals.back().second = pts[i + 1];  // tangency: keep one band
      else
        bands.intervals.emplace_back(pts[i], pts[i + 1]);
    }
  }
  return bands;
}

// N x N truncation of the periodic Jacobi matrix.
inline Eigen::MatrixXd jacobi_truncation(const PeriodicJacobi& j0, int n) {
  const int p = j0.period();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = j0.b[static_cast<std::size_t>(i % p)];
    if (i + 1 < n) {
      m(i, i + 1) = j0.a[static_cast<std::size_t>(i % p)];
      m(i + 1, i) = m(i, i + 1);
    }
  }
  return m;
}

namespace detail {

inline std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  std::vector<double> eigs(static_cast<std::size_t>(m.rows()));
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.real(), Eigen::EigenvaluesOnly);
    for (int i = 0; i < m.rows(); ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    for (int i = 0; i < m.rows(); ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  }
  return eigs;
}

inline double hausdorff_to_bands(std::vector<double> eigs, const BandSet& bands) {
  std::sort(eigs.begin(), eigs.end());
  double h = 0.0;
  for (double e : eigs) h = std::max(h, bands.distance(e));
  auto dist_to_eigs = [&](double x) {
    const auto it = std::lower_bound(eigs.begin(), eigs.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != eigs.end()) best = std::min(best, *it - x);
    if (it != eigs.begin()) best = std::min(best, x - *(it - 1));
    return best;
  };
  for (const auto& [l, r] : bands.intervals) {
    h = std::max(h, dist_to_eigs(l));
    h = std::max(h, dist_to_eigs(r));
    for (std::size_t i = 0; i + 1 < eigs.size(); ++i) {
      const double mid = 0.5 * (eigs[i] + eigs[i + 1]);
      if (mid > l && mid < r) h = std::max(h, dist_to_eigs(mid));
    }
  }
  return h;
}

}  // namespace detail

// Hausdorff distance between the truncation spectrum and the predicted bands.
inline double dos_band_check(const PeriodicJacobi& j0, int n) {
  if (n < 100 || n > 4000) throw ValidationError("dos_band_check: N must be in [100, 4000]");
  const BandSet bands = bands_from_discriminant(discriminant(j0));
  Eigen::VectorXd diag(n), sub(n - 1);
  const int p = j0.period();
  for (int i = 0; i < n; ++i) diag(i) = j0.b[static_cast<std::size_t>(i % p)];
  for (int i = 0; i + 1 < n; ++i) sub(i) = j0.a[static_cast<std::size_t>(i % p)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> eigs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return detail::hausdorff_to_bands(std::move(eigs), bands);
}

inline double dos_band_check(const ErgodicSystem& sys, int n, const BandSet& predicted) {
  if (n < 100 || n > 4000) throw ValidationError("dos_band_check: N must be in [100, 4000]");
  const OperatorSection sec = build_section(sys, 0, 0, n);
  return detail::hausdorff_to_bands(detail::hermitian_eigenvalues(sec.entries), predicted);
}

}  // namespace finband
