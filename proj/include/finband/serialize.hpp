#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "finband/covering.hpp"
#include "finband/ergodic.hpp"
#include "finband/errors.hpp"
#include "finband/floquet.hpp"
#include "finband/perm.hpp"
#include "finband/poly.hpp"

namespace finband {

using json = nlohmann::json;

// ---- complex / Poly: JSON arrays of [re, im] pairs, ascending degree ----

inline json to_json(cdouble z) { return json::array({z.real(), z.imag()}); }

inline cdouble complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Poly& p) {
  json arr = json::array();
  for (const cdouble& c : p.coeffs()) arr.push_back(to_json(c));
  return arr;
}

inline Poly poly_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("Poly: expected an array of [re, im] pairs");
  std::vector<cdouble> coeffs;
  for (const auto& e : j) coeffs.push_back(complex_from_json(e));
  return Poly(std::move(coeffs));
}

// ---- Perm: JSON array of images ----

inline json to_json(const Perm& p) { return json(p.images()); }

inline Perm perm_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("Perm: expected an array of images");
  return Perm(j.get<std::vector<int>>());
}

// ---- ErgodicSystem: {"p": int, "d": int, "q": [[ [re,im], ... ] per k]} ----

inline json to_json(const ErgodicSystem& sys) {
  json q = json::array();
  for (const auto& row : sys.stored_coeffs()) {
    json r = json::array();
    for (const cdouble& v : row) r.push_back(to_json(v));
    q.push_back(r);
  }
  return json{{"p", sys.period()}, {"d", sys.half_bandwidth()}, {"q", q}};
}

inline ErgodicSystem ergodic_system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("d") || !j.contains("q"))
    throw ValidationError("ErgodicSystem: expected {\"p\", \"d\", \"q\"}");
  const int p = j.at("p").get<int>();
  const int d = j.at("d").get<int>();
  std::vector<std::vector<cdouble>> q;
  for (const auto& row : j.at("q")) {
    std::vector<cdouble> r;
    for (const auto& e : row) r.push_back(complex_from_json(e));
    q.push_back(std::move(r));
  }
  return ErgodicSystem(p, d, std::move(q));
}

// ---- PeriodicJacobi: {"a":[...], "b":[...]} ----

inline json to_json(const PeriodicJacobi& j0) { return json{{"a", j0.a}, {"b", j0.b}}; }

inline PeriodicJacobi jacobi_from_json(const json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b"))
    throw ValidationError("PeriodicJacobi: expected {\"a\", \"b\"}");
  return PeriodicJacobi(j.at("a").get<std::vector<double>>(), j.at("b").get<std::vector<double>>());
}

// ---- BandSet: [[l, r], ...] ----

inline json to_json(const BandSet& bands) {
  json arr = json::array();
  for (const auto& [l, r] : bands.intervals) arr.push_back(json::array({l, r}));
  return arr;
}

inline BandSet bandset_from_json(const json& j) {
  BandSet bands;
  for (const auto& e : j) bands.intervals.emplace_back(e[0].get<double>(), e[1].get<double>());
  return bands;
}

// ---- HurwitzData: branch points as [re,im] or "inf", perms, genus ----

inline json to_json(const HurwitzData& h) {
  json bps = json::array();
  for (const auto& bp : h.branch_points) {
    if (bp.at_infinity) bps.push_back("inf");
    else bps.push_back(to_json(bp.value));
  }
  json perms = json::array();
  for (const auto& s : h.perms) perms.push_back(to_json(s));
  json labels = json::array();
  for (const auto& l : h.labels) labels.push_back(to_json(l));
  return json{{"basepoint", to_json(h.basepoint)}, {"branch_points", bps},
              {"perms", perms},                    {"labels", labels},
              {"degree", h.degree},                {"genus", genus(h)}};
}

// ---- CSV helpers: 17 significant digits for lossless double round-trip ----

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace finband
