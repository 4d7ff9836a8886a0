#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "finband/errors.hpp"
#include "finband/poly.hpp"

namespace finband {

// Finite-cyclic model of an ergodic coefficient family: Omega = Z_p with
// T(omega) = omega+1 mod p and uniform measure.  Coefficients q^(k) are
// stored for k = 0..d only; the negative diagonals are always derived from
// q^(-k)(omega) = conj(q^(k)(T^{-k} omega)), which keeps every section
// self-adjoint by construction.
class ErgodicSystem {
public:
  ErgodicSystem(int p, int d, std::vector<std::vector<cdouble>> q) : p_(p), d_(d), q_(std::move(q)) {
    if (p_ < 1) throw ValidationError("ErgodicSystem: period p must be >= 1");
    if (d_ < 1) throw ValidationError("ErgodicSystem: half-bandwidth d must be >= 1");
    if (static_cast<int>(q_.size()) != d_ + 1)
      throw ValidationError("ErgodicSystem: expected d+1 coefficient functions q^(0..d)");
    for (int k = 0; k <= d_; ++k)
      if (static_cast<int>(q_[static_cast<std::size_t>(k)].size()) != p_)
        throw ValidationError("ErgodicSystem: each q^(k) must have one value per point of Z_p");
    for (int w = 0; w < p_; ++w) {
      const cdouble qd = q_[static_cast<std::size_t>(d_)][static_cast<std::size_t>(w)];
      if (qd.imag() != 0.0 || qd.real() <= 0.0)
        throw ValidationError("ErgodicSystem: q^(d) must be real positive");
      const cdouble q0 = q_[static_cast<std::size_t>(0)][static_cast<std::size_t>(w)];
      if (q0.imag() != 0.0) throw ValidationError("ErgodicSystem: q^(0) must be real");
    }
  }

  int period() const { return p_; }
  int half_bandwidth() const { return d_; }

  int mod_p(long long n) const {
    long long r = n % p_;
    if (r < 0) r += p_;
    return static_cast<int>(r);
  }

  // q^(k)(T^n omega) for any k in [-d, d]; negative k derived.
  cdouble q(int k, long long omega) const {
    if (k >= 0) return q_[static_cast<std::size_t>(k)][static_cast<std::size_t>(mod_p(omega))];
    return std::conj(q_[static_cast<std::size_t>(-k)][static_cast<std::size_t>(mod_p(omega + k))]);
  }

  const std::vector<std::vector<cdouble>>& stored_coeffs() const { return q_; }

  // p = 1 system with constant coefficients c[k] = q^(k), k = 0..d.
  static ErgodicSystem constant(const std::vector<cdouble>& c) {
    std::vector<std::vector<cdouble>> q;
    q.reserve(c.size());
    for (const auto& v : c) q.push_back({v});
    return ErgodicSystem(1, static_cast<int>(c.size()) - 1, std::move(q));
  }

  // J = S + S^{-1}
  static ErgodicSystem free_jacobi() { return constant({0.0, 1.0}); }

  // J = S^d + S^{-d}
  static ErgodicSystem shift_pair(int d) {
    std::vector<cdouble> c(static_cast<std::size_t>(d) + 1, 0.0);
    c.back() = 1.0;
    return constant(c);
  }

  // period-2 tridiagonal with diagonal (b0, -b0) and unit off-diagonals
  static ErgodicSystem alternating(double b0) {
    return ErgodicSystem(2, 1, {{b0, -b0}, {1.0, 1.0}});
  }

private:
  int p_;
  int d_;
  std::vector<std::vector<cdouble>> q_;  // q_[k][omega], k = 0..d
};

// Dense window [n0, n1) of J(omega).
struct OperatorSection {
  long long n0 = 0;
  long long n1 = 0;
  Eigen::MatrixXcd entries;
};

// J_{n,n+k} = conj(q^(k)(T^n omega)), |k| <= d.
inline OperatorSection build_section(const ErgodicSystem& sys, long long omega, long long n0, long long n1) {
  const int d = sys.half_bandwidth();
  if (n1 - n0 < 2 * d + 1) throw ValidationError("build_section: window shorter than 2d+1");
  const int size = static_cast<int>(n1 - n0);
  OperatorSection sec{n0, n1, Eigen::MatrixXcd::Zero(size, size)};
  for (int i = 0; i < size; ++i) {
    const long long n = n0 + i;
    for (int k = -d; k <= d; ++k) {
      const int j = i + k;
      if (j < 0 || j >= size) continue;
      sec.entries(i, j) = std::conj(sys.q(k, omega + n));
    }
  }
  return sec;
}

// Exact interior residual of J(omega) S - S J(T omega) on a window; the
// outermost band of width d+1 is excluded because the windowed products
// differ from the infinite ones there.
inline double shift_commutation_residual(const ErgodicSystem& sys, long long omega, long long n0, long long n1) {
  const int d = sys.half_bandwidth();
  if (n1 - n0 < 2 * d + 3) throw ValidationError("shift_commutation_residual: window shorter than 2d+3");
  const int size = static_cast<int>(n1 - n0);
  const Eigen::MatrixXcd jw = build_section(sys, omega, n0, n1).entries;
  const Eigen::MatrixXcd jtw = build_section(sys, omega + 1, n0, n1).entries;
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(size, size);
  for (int i = 0; i + 1 < size; ++i) shift(i + 1, i) = 1.0;
  const Eigen::MatrixXcd diff = jw * shift - shift * jtw;
  double mx = 0.0;
  for (int i = d + 1; i < size - d - 1; ++i)
    for (int j = d + 1; j < size - d - 1; ++j) mx = std::max(mx, std::abs(diff(i, j)));
  return mx;
}

// p x p matrix of sum_{k=-d}^{d} U^k diag(conj q^(k)) conj(b)^k where
// (Uc)(omega) = c(T omega); entry (omega, omega+k) accumulates
// conj(q^(k)(T^k omega)) conj(b)^k.
inline Eigen::MatrixXcd symbol_matrix(const ErgodicSystem& sys, cdouble b) {
  if (b == cdouble(0.0)) throw ValidationError("symbol_matrix: b must be nonzero");
  const int p = sys.period();
  const int d = sys.half_bandwidth();
  const cdouble cb = std::conj(b);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(p, p);
  for (int w = 0; w < p; ++w)
    for (int k = -d; k <= d; ++k)
      m(w, sys.mod_p(w + k)) += std::conj(sys.q(k, w + k)) * std::pow(cb, k);
  return m;
}

// |det(symbol_matrix - conj(z) I)|; vanishes exactly on the spectral curve.
inline double symbol_curve_residual(const ErgodicSystem& sys, cdouble b, cdouble z) {
  Eigen::MatrixXcd m = symbol_matrix(sys, b);
  m -= std::conj(z) * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return std::abs(m.determinant());
}

}  // namespace finband
