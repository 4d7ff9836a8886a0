#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "finband/errors.hpp"

namespace finband {

// Permutation of {0,...,n-1}, stored as the image array.
class Perm {
public:
  Perm() = default;

  explicit Perm(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
      if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)])
        throw ValidationError("Perm: images are not a bijection on {0..n-1}");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  static Perm identity(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    return Perm(std::move(v));
  }

  // Cycle notation helper: from_cycles(4, {{0,1},{2,3}}) is (0 1)(2 3).
  static Perm from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    for (const auto& cyc : cycles)
      for (std::size_t i = 0; i < cyc.size(); ++i)
        v[static_cast<std::size_t>(cyc[i])] = cyc[(i + 1) % cyc.size()];
    return Perm(std::move(v));
  }

  int size() const { return static_cast<int>(images_.size()); }

  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }

  const std::vector<int>& images() const { return images_; }

  Perm inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i)
      inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    return Perm(std::move(inv));
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != static_cast<int>(i)) return false;
    return true;
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.images_ == b.images_; }

private:
  std::vector<int> images_;
};

// (p o q)(i) = p(q(i))
inline Perm perm_compose(const Perm& p, const Perm& q) {
  if (p.size() != q.size()) throw ValidationError("perm_compose: size mismatch");
  std::vector<int> v(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) v[static_cast<std::size_t>(i)] = p(q(i));
  return Perm(std::move(v));
}

// Full cycle partition of n, sorted descending (fixed points included).
inline std::vector<int> perm_cycle_type(const Perm& p) {
  std::vector<bool> seen(static_cast<std::size_t>(p.size()), false);
  std::vector<int> lens;
  for (int i = 0; i < p.size(); ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    int len = 0;
    int j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      j = p(j);
      ++len;
    }
    lens.push_back(len);
  }
  std::sort(lens.begin(), lens.end(), std::greater<int>());
  return lens;
}

// Cycle lengths >= 2 only, sorted descending; matches ramification profiles.
inline std::vector<int> perm_nontrivial_cycles(const Perm& p) {
  std::vector<int> lens = perm_cycle_type(p);
  lens.erase(std::remove(lens.begin(), lens.end(), 1), lens.end());
  return lens;
}

// tau p tau^{-1}
inline Perm perm_conjugate(const Perm& p, const Perm& tau) {
  return perm_compose(perm_compose(tau, p), tau.inverse());
}

}  // namespace finband
