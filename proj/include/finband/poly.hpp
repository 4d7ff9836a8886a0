#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "finband/errors.hpp"

namespace finband {

using cdouble = std::complex<double>;

// Dense complex polynomial, coefficients stored in ascending degree.
// The zero polynomial is represented by an empty coefficient vector.
class Poly {
public:
  Poly() = default;

  explicit Poly(std::vector<cdouble> coeffs) : coeffs_(std::move(coeffs)) { strip_exact_zeros(); }

  Poly(std::initializer_list<cdouble> coeffs) : coeffs_(coeffs) { strip_exact_zeros(); }

  static Poly zero() { return Poly(); }

  static Poly constant(cdouble c) { return Poly({c}); }

  // x^k
  static Poly monomial(int k, cdouble c = 1.0) {
    std::vector<cdouble> v(static_cast<std::size_t>(k) + 1, 0.0);
    v.back() = c;
    return Poly(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }

  // Degree of the zero polynomial is -1 by convention.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const std::vector<cdouble>& coeffs() const { return coeffs_; }

  cdouble coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[static_cast<std::size_t>(k)];
  }

  cdouble leading() const { return coeffs_.empty() ? cdouble(0.0) : coeffs_.back(); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  bool is_real(double tol = 1e-12) const {
    const double scale = std::max(max_abs_coeff(), 1.0);
    for (const auto& c : coeffs_)
      if (std::abs(c.imag()) > tol * scale) return false;
    return true;
  }

  // Horner evaluation.
  cdouble eval(cdouble x) const {
    cdouble acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Poly derivative() const {
    if (coeffs_.size() <= 1) return Poly();
    std::vector<cdouble> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = double(k) * coeffs_[k];
    return Poly(std::move(d));
  }

  // Drops coefficients below rel_tol * max|coeff| from the top so the
  // effective degree of numerically-degenerate data is detected.
  Poly trimmed(double rel_tol) const {
    const double thr = rel_tol * max_abs_coeff();
    std::vector<cdouble> v = coeffs_;
    while (!v.empty() && std::abs(v.back()) <= thr) v.pop_back();
    return Poly(std::move(v));
  }

  Poly operator-() const {
    std::vector<cdouble> v = coeffs_;
    for (auto& c : v) c = -c;
    return Poly(std::move(v));
  }

  friend Poly operator+(const Poly& p, const Poly& q) {
    std::vector<cdouble> v(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = p.coeff(int(k)) + q.coeff(int(k));
    return Poly(std::move(v));
  }

  friend Poly operator-(const Poly& p, const Poly& q) { return p + (-q); }

  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return Poly();
    std::vector<cdouble> v(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < q.coeffs_.size(); ++j) v[i + j] += p.coeffs_[i] * q.coeffs_[j];
    return Poly(std::move(v));
  }

  friend Poly operator*(cdouble s, const Poly& p) {
    std::vector<cdouble> v = p.coeffs_;
    for (auto& c : v) c *= s;
    return Poly(std::move(v));
  }

  friend bool operator==(const Poly& p, const Poly& q) { return p.coeffs_ == q.coeffs_; }

private:
  void strip_exact_zeros() {
    while (!coeffs_.empty() && coeffs_.back() == cdouble(0.0)) coeffs_.pop_back();
  }

  std::vector<cdouble> coeffs_;
};

inline cdouble poly_eval(const Poly& p, cdouble x) { return p.eval(x); }

namespace detail {

// One Newton step; skipped when the derivative underflows (multiple root).
inline cdouble newton_polish(const Poly& p, const Poly& dp, cdouble r) {
  const cdouble fp = dp.eval(r);
  if (std::abs(fp) < 1e-14 * std::max(1.0, dp.max_abs_coeff())) return r;
  const cdouble step = p.eval(r) / fp;
  if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return r;
  if (std::abs(step) > 0.5 * std::max(1.0, std::abs(r))) return r;
  return r - step;
}

}  // namespace detail

// All deg(p) roots, multiple roots repeated.  Companion-matrix eigenvalues
// of the monic rescaling, three Newton polish steps per root (multiple
// roots only converge linearly, one step is not enough to get their
// eigenvalue cloud inside the clustering radius), then clusters within
// 1e-8 relative are snapped to their mean so repeats compare equal.
inline std::vector<cdouble> poly_roots(const Poly& p) {
  if (p.is_zero()) throw ValidationError("poly_roots: zero polynomial");
  if (p.degree() < 1) throw ValidationError("poly_roots: degree must be >= 1");
  const int n = p.degree();
  const cdouble lead = p.leading();

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) companion(i + 1, i) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p.coeff(i) / lead;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("poly_roots: eigensolver failed");

  const Poly dp = p.derivative();
  std::vector<cdouble> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    cdouble r = solver.eigenvalues()(i);
    for (int step = 0; step < 3; ++step) r = detail::newton_polish(p, dp, r);
    roots[static_cast<std::size_t>(i)] = r;
  }

  // multiplicity by clustering
  std::vector<int> cluster(roots.size(), -1);
  int nclusters = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = nclusters;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (cluster[j] >= 0) continue;
      const double tol = 1e-8 * std::max(1.0, std::abs(roots[i]));
      if (std::abs(roots[i] - roots[j]) <= tol) cluster[j] = nclusters;
    }
    ++nclusters;
  }
  for (int c = 0; c < nclusters; ++c) {
    cdouble mean = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (cluster[i] == c) { mean += roots[i]; ++count; }
    mean /= double(count);
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (cluster[i] == c) roots[i] = mean;
  }
  return roots;
}

// (root, multiplicity) pairs with a looser clustering radius, for callers
// that need ramification profiles rather than raw eigenvalues.  Multiple
// roots are re-polished on the (m-1)-st derivative where they are simple.
inline std::vector<std::pair<cdouble, int>> clustered_roots(const Poly& p, double rel_tol = 1e-5) {
  std::vector<cdouble> raw = poly_roots(p);
  std::vector<std::pair<cdouble, int>> out;
  std::vector<bool> used(raw.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    cdouble mean = raw[i];
    int count = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(raw[i] - raw[j]) <= rel_tol * std::max(1.0, std::abs(raw[i]))) {
        used[j] = true;
        mean += raw[j];
        ++count;
      }
    }
    mean /= double(count);
    if (count > 1) {
      Poly dk = p;
      for (int k = 1; k < count; ++k) dk = dk.derivative();
      const Poly dk1 = dk.derivative();
      for (int it = 0; it < 3; ++it) mean = detail::newton_polish(dk, dk1, mean);
    }
    out.emplace_back(mean, count);
  }
  return out;
}

}  // namespace finband
