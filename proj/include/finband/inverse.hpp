#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finband/errors.hpp"
#include "finband/floquet.hpp"
#include "finband/poly.hpp"

namespace finband {

// Target discriminant for the inverse problem.
struct FitProblem {
  Poly target;

  int d() const { return target.degree(); }
};

// A valid target has real coefficients, positive leading coefficient and
// real critical values of modulus >= 2.
inline FitProblem validate_target(const Poly& t) {
  if (t.degree() < 1) throw ValidationError("validate_target: degree must be >= 1");
  if (!t.is_real()) throw ValidationError("validate_target: coefficients must be real");
  if (!(t.leading().real() > 0.0)) throw ValidationError("validate_target: leading coefficient must be positive");
  const Poly dt = t.derivative();
  if (dt.degree() >= 1) {
    for (const cdouble& c : poly_roots(dt)) {
      const cdouble v = t.eval(c);
      std::ostringstream msg;
      if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v))) {
        msg << "validate_target: critical value " << v << " is not real";
        throw ValidationError(msg.str());
      }
      if (std::abs(v.real()) < 2.0 - 1e-12) {
        msg << "validate_target: critical value " << v.real() << " lies inside (-2,2)";
        throw ValidationError(msg.str());
      }
    }
  }
  return {t};
}

struct FitResult {
  PeriodicJacobi jacobi;
  double residual;
  int starts_used;
};

namespace detail {

inline Eigen::VectorXd fit_residual(const Eigen::VectorXd& x, const Poly& target) {
  const int d = target.degree();
  std::vector<double> a(static_cast<std::size_t>(d)), b(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    a[static_cast<std::size_t>(i)] = std::exp(std::clamp(x(i), -20.0, 20.0));
    b[static_cast<std::size_t>(i)] = x(d + i);
  }
  const Poly delta = discriminant(PeriodicJacobi(std::move(a), std::move(b)));
  Eigen::VectorXd r(d + 1);
  for (int k = 0; k <= d; ++k) r(k) = (delta.coeff(k) - target.coeff(k)).real();
  return r;
}

// Levenberg-Marquardt on the coefficient residual; returns true on
// convergence to ||r||_inf < tol.
inline bool lm_solve(Eigen::VectorXd& x, const Poly& target, double tol, int max_iter = 300) {
  const int nparam = static_cast<int>(x.size());
  Eigen::VectorXd r = fit_residual(x, target);
  double lambda = 1e-3;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (r.cwiseAbs().maxCoeff() < tol) return true;

    Eigen::MatrixXd jac(r.size(), nparam);
    for (int j = 0; j < nparam; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x;
      xp(j) += h;
      jac.col(j) = (fit_residual(xp, target) - r) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool stepped = false;
    for (int inner = 0; inner < 40; ++inner) {
      const Eigen::MatrixXd lhs = jtj + lambda * Eigen::MatrixXd::Identity(nparam, nparam);
      const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
      const Eigen::VectorXd xt = x + delta;
      const Eigen::VectorXd rt = fit_residual(xt, target);
      if (rt.norm() < r.norm()) {
        x = xt;
        r = rt;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) return r.cwiseAbs().maxCoeff() < tol;
  }
  return r.cwiseAbs().maxCoeff() < tol;
}

}  // namespace detail

// Damped Newton / LM multi-start in (log a_n, b_n).  Any point of the
// isospectral torus is accepted; which one comes out depends on the seed.
inline FitResult fit_discriminant(const FitProblem& problem, std::mt19937_64& rng,
                                  double tol = 1e-11, int max_starts = 20) {
  const int d = problem.d();
  const double lead = problem.target.leading().real();
  const double s_base = -std::log(lead) / double(d);  // prod a_n = 1/lead

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double best_res = std::numeric_limits<double>::infinity();
  for (int start = 0; start < max_starts; ++start) {
    Eigen::VectorXd x(2 * d);
    for (int i = 0; i < d; ++i) {
      x(i) = s_base + (start == 0 ? 0.0 : 0.6 * unit(rng));
      x(d + i) = start == 0 ? 0.0 : 0.7 * unit(rng);
    }
    if (detail::lm_solve(x, problem.target, tol)) {
      std::vector<double> a(static_cast<std::size_t>(d)), b(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        a[static_cast<std::size_t>(i)] = std::exp(x(i));
        b[static_cast<std::size_t>(i)] = x(d + i);
      }
      PeriodicJacobi j0(std::move(a), std::move(b));
      const double res = (discriminant(j0) - problem.target).max_abs_coeff();
      return {std::move(j0), res, start + 1};
    }
    best_res = std::min(best_res, double(detail::fit_residual(x, problem.target).cwiseAbs().maxCoeff()));
  }
  std::ostringstream msg;
  msg << "fit_discriminant: no convergence after " << max_starts << " starts; best residual " << best_res;
  throw NumericalError(msg.str());
}

struct MagicCheck {
  double deviation;
  int row;
  int col;
};

// Max interior deviation of T(J0) from the S^d + S^{-d} pattern on an N x N
// truncation, d = deg T; entries closer than `margin` to the boundary are
// excluded so powers of the truncation agree with the full operator there.
inline MagicCheck magic_formula_check(const PeriodicJacobi& j0, const Poly& t, int n, int margin) {
  const int d = t.degree();
  if (d < 1) throw ValidationError("magic_formula_check: deg T must be >= 1");
  if (!t.is_real()) throw ValidationError("magic_formula_check: T must be real");
  if (margin < j0.period() * d) throw ValidationError("magic_formula_check: margin below d*deg(T)");
  if (n < 2 * margin + 10) throw ValidationError("magic_formula_check: N must be >= 2*margin + 10");

  const Eigen::MatrixXd trunc = jacobi_truncation(j0, n);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  p.diagonal().setConstant(t.coeff(d).real());
  for (int k = d - 1; k >= 0; --k) {
    p = p * trunc;
    p.diagonal().array() += t.coeff(k).real();
  }

  MagicCheck out{0.0, margin, margin};
  for (int i = margin; i < n - margin; ++i)
    for (int j = margin; j < n - margin; ++j) {
      const double want = (std::abs(i - j) == d) ? 1.0 : 0.0;
      const double dev = std::abs(p(i, j) - want);
      if (dev > out.deviation) out = {dev, i, j};
    }
  return out;
}

// Open spectral gaps of a band set (the bounded components of the
// complement); their count is the dimension of the isospectral torus.
inline std::vector<std::pair<double, double>> open_gaps(const BandSet& bands) {
  std::vector<std::pair<double, double>> gaps;
  for (std::size_t i = 0; i + 1 < bands.intervals.size(); ++i)
    gaps.emplace_back(bands.intervals[i].second, bands.intervals[i + 1].first);
  return gaps;
}

}  // namespace finband
