#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "finband/floquet.hpp"

using namespace finband;

namespace {

// 2 T_d(z/2) by the recurrence p_{k+1} = z p_k - p_{k-1}, p_0 = 2, p_1 = z;
// integer coefficients, so this oracle is exact.
Poly chebyshev_discriminant(int d) {
  Poly prev = Poly::constant(2.0);
  Poly cur({0.0, 1.0});
  if (d == 0) return prev;
  for (int k = 1; k < d; ++k) {
    Poly next = Poly({0.0, 1.0}) * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

PeriodicJacobi random_jacobi(std::mt19937_64& rng, int period) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(period)), b(static_cast<std::size_t>(period));
  for (auto& v : a) v = 0.5 + std::abs(u(rng));
  for (auto& v : b) v = u(rng);
  return PeriodicJacobi(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("companion matrix free Jacobi") {
  const double z = 1.7;
  const auto a = companion_matrix(ErgodicSystem::free_jacobi(), 0, z);
  REQUIRE(a.rows() == 2);
  CHECK(a(0, 0) == cdouble(0.0));
  CHECK(a(0, 1) == cdouble(1.0));
  CHECK(a(1, 0) == cdouble(-1.0));
  CHECK(a(1, 1) == cdouble(z));

  const Poly cp = char_poly(a);  // lambda^2 - z lambda + 1
  CHECK(std::abs(cp.coeff(0) - cdouble(1.0)) < 1e-14);
  CHECK(std::abs(cp.coeff(1) + cdouble(z)) < 1e-14);
  CHECK(std::abs(cp.coeff(2) - cdouble(1.0)) < 1e-14);
}

TEST_CASE("companion matrix S^2 + S^-2 characteristic polynomial") {
  for (double z : {-2.7, 0.3, 1.9, 3.1}) {
    const Poly cp = char_poly(companion_matrix(ErgodicSystem::shift_pair(2), 0, z));
    // cofactor expansion gives lambda^4 - z lambda^2 + 1
    CHECK(std::abs(cp.coeff(0) - cdouble(1.0)) < 1e-12);
    CHECK(std::abs(cp.coeff(1)) < 1e-12);
    CHECK(std::abs(cp.coeff(2) + cdouble(z)) < 1e-12);
    CHECK(std::abs(cp.coeff(3)) < 1e-12);
    CHECK(std::abs(cp.coeff(4) - cdouble(1.0)) < 1e-12);
  }
}

TEST_CASE("period monodromy") {
  const double z = 0.9;
  // p = 1 reduces to the companion matrix itself
  const auto single = period_monodromy(ErgodicSystem::free_jacobi(), z);
  CHECK((single - companion_matrix(ErgodicSystem::free_jacobi(), 0, z)).cwiseAbs().maxCoeff() == 0.0);

  // p = 2 free Jacobi: hand product of [[0,1],[-1,z]] with itself
  const auto sq = period_monodromy(ErgodicSystem(2, 1, {{0.0, 0.0}, {1.0, 1.0}}), z);
  CHECK(std::abs(sq(0, 0) - cdouble(-1.0)) < 1e-14);
  CHECK(std::abs(sq(0, 1) - cdouble(z)) < 1e-14);
  CHECK(std::abs(sq(1, 0) - cdouble(-z)) < 1e-14);
  CHECK(std::abs(sq(1, 1) - cdouble(z * z - 1.0)) < 1e-14);
  CHECK(std::abs(sq.trace() - cdouble(z * z - 2.0)) < 1e-14);

  // alternating +-b0: hand product gives trace z^2 - b0^2 - 2
  const double b0 = 0.8;
  const auto alt = period_monodromy(ErgodicSystem::alternating(b0), z);
  CHECK(std::abs(alt.trace() - cdouble(z * z - b0 * b0 - 2.0)) < 1e-14);
}

TEST_CASE("floquet multipliers") {
  const auto sys = ErgodicSystem::free_jacobi();

  auto mults = floquet_multipliers(sys, 2.5);  // roots of l^2 - 2.5 l + 1
  std::sort(mults.begin(), mults.end(), [](cdouble a, cdouble b) { return std::abs(a) < std::abs(b); });
  CHECK(std::abs(mults[0] - cdouble(0.5)) < 1e-12);
  CHECK(std::abs(mults[1] - cdouble(2.0)) < 1e-12);

  for (const cdouble& m : floquet_multipliers(sys, 1.3))  // inside (-2,2)
    CHECK(std::abs(std::abs(m) - 1.0) < 1e-12);

  int contracting = 0;
  for (const cdouble& m : floquet_multipliers(sys, 3.0))
    if (std::abs(m) < 1.0) ++contracting;
  CHECK(contracting == 1);
}

TEST_CASE("monodromy determinant and multiplier pairing") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> zu(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> pd(1, 4);
    const int p = pd(rng);
    const PeriodicJacobi j0 = random_jacobi(rng, p);
    std::vector<std::vector<cdouble>> q{{}, {}};
    for (int w = 0; w < p; ++w) {
      q[0].push_back(j0.b[static_cast<std::size_t>(w)]);
      q[1].push_back(j0.a[static_cast<std::size_t>(w)]);
    }
    const ErgodicSystem sys(p, 1, std::move(q));
    const double z = zu(rng);
    const auto m = period_monodromy(sys, z);
    CHECK(std::abs(m.determinant() - cdouble(1.0)) < 1e-12);
    auto mult = floquet_multipliers(sys, z);
    CHECK(std::abs(mult[0] * mult[1] - cdouble(1.0)) < 1e-10);
  }
}

TEST_CASE("discriminant closed forms") {
  const Poly free2 = discriminant(PeriodicJacobi::free_jacobi(2));
  CHECK(std::abs(free2.coeff(0) + cdouble(2.0)) < 1e-15);
  CHECK(std::abs(free2.coeff(1)) < 1e-15);
  CHECK(std::abs(free2.coeff(2) - cdouble(1.0)) < 1e-15);

  for (int d = 1; d <= 5; ++d) {
    const Poly delta = discriminant(PeriodicJacobi::free_jacobi(d));
    const Poly want = chebyshev_discriminant(d);
    REQUIRE(delta.degree() == d);
    for (int k = 0; k <= d; ++k) CHECK(std::abs(delta.coeff(k) - want.coeff(k)) < 1e-12);
  }

  const double b0 = 0.6;
  const Poly alt = discriminant(PeriodicJacobi({1.0, 1.0}, {b0, -b0}));
  CHECK(std::abs(alt.coeff(0) - cdouble(-b0 * b0 - 2.0)) < 1e-15);
  CHECK(std::abs(alt.coeff(1)) < 1e-15);
  CHECK(std::abs(alt.coeff(2) - cdouble(1.0)) < 1e-15);

  // leading coefficient 1 / prod a_n
  const PeriodicJacobi j0({0.5, 2.0, 1.25}, {0.1, -0.2, 0.3});
  CHECK(std::abs(discriminant(j0).leading() - cdouble(1.0 / (0.5 * 2.0 * 1.25))) < 1e-12);
}

TEST_CASE("bands from discriminant") {
  const BandSet free_band = bands_from_discriminant(Poly({-2.0, 0.0, 1.0}));
  REQUIRE(free_band.intervals.size() == 1);
  CHECK_THAT(free_band.intervals[0].first, Catch::Matchers::WithinAbs(-2.0, 1e-10));
  CHECK_THAT(free_band.intervals[0].second, Catch::Matchers::WithinAbs(2.0, 1e-10));

  const BandSet alt = bands_from_discriminant(Poly({-3.0, 0.0, 1.0}));  // b0 = 1
  REQUIRE(alt.intervals.size() == 2);
  const double s5 = std::sqrt(5.0);
  CHECK_THAT(alt.intervals[0].first, Catch::Matchers::WithinAbs(-s5, 1e-10));
  CHECK_THAT(alt.intervals[0].second, Catch::Matchers::WithinAbs(-1.0, 1e-10));
  CHECK_THAT(alt.intervals[1].first, Catch::Matchers::WithinAbs(1.0, 1e-10));
  CHECK_THAT(alt.intervals[1].second, Catch::Matchers::WithinAbs(s5, 1e-10));

  // closed gaps must collapse: 2T_d(z/2) maps [-2,2] onto [-2,2] d-to-1
  for (int d = 1; d <= 5; ++d) {
    const BandSet cheb = bands_from_discriminant(chebyshev_discriminant(d));
    REQUIRE(cheb.intervals.size() == 1);
    CHECK_THAT(cheb.intervals[0].first, Catch::Matchers::WithinAbs(-2.0, 1e-9));
    CHECK_THAT(cheb.intervals[0].second, Catch::Matchers::WithinAbs(2.0, 1e-9));
  }

  CHECK_THROWS_AS(bands_from_discriminant(Poly({cdouble(0.0, 1.0), 1.0})), ValidationError);
}

TEST_CASE("band membership matches unimodular multipliers") {
  struct Fixture {
    ErgodicSystem sys;
    BandSet bands;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({ErgodicSystem::free_jacobi(),
                      bands_from_discriminant(discriminant(PeriodicJacobi::free_jacobi(1)))});
  fixtures.push_back({ErgodicSystem::alternating(1.0),
                      bands_from_discriminant(Poly({-3.0, 0.0, 1.0}))});
  fixtures.push_back({ErgodicSystem::shift_pair(2), BandSet{{{-2.0, 2.0}}}});

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> zu(-3.0, 3.0);
  for (const auto& fx : fixtures) {
    int tested = 0;
    while (tested < 100) {
      const double z = zu(rng);
      const bool interior = fx.bands.contains(z, -0.05);    // 0.05 inside
      const bool exterior = fx.bands.distance(z) > 0.05;    // 0.05 away
      if (!interior && !exterior) continue;
      ++tested;
      double mindist = std::numeric_limits<double>::infinity();
      for (const cdouble& m : floquet_multipliers(fx.sys, z))
        mindist = std::min(mindist, std::abs(std::abs(m) - 1.0));
      if (interior) CHECK(mindist <= 1e-8);
      else CHECK(mindist > 1e-8);
    }
  }
}

TEST_CASE("truncation spectra fill the predicted bands") {
  CHECK(dos_band_check(PeriodicJacobi::free_jacobi(1), 2000) < 0.05);
  CHECK(dos_band_check(PeriodicJacobi({1.0, 1.0}, {1.0, -1.0}), 2000) < 0.05);
  CHECK(dos_band_check(ErgodicSystem::shift_pair(2), 2000, BandSet{{{-2.0, 2.0}}}) < 0.05);
  CHECK_THROWS_AS(dos_band_check(PeriodicJacobi::free_jacobi(1), 50), ValidationError);
}

TEST_CASE("periodic Jacobi validation") {
  CHECK_THROWS_AS(PeriodicJacobi({1.0, -1.0}, {0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(PeriodicJacobi({}, {}), ValidationError);
  CHECK_THROWS_AS(PeriodicJacobi({1.0}, {0.0, 0.0}), ValidationError);
}
