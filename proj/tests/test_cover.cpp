#include <doctest.h>

#include <cmath>
#include <random>

#include "cninner/cover.hpp"

using namespace cninner;

namespace {

Complex direct_product(const ZeroSequence& zs, Complex z) {
  Complex p = 1.0;
  for (const auto& e : zs.entries()) {
    for (int m = 0; m < e.multiplicity; ++m) p *= (z - e.z) / (1.0 - std::conj(e.z) * z);
  }
  return p;
}

// Blocks k = 1, 2 of the dyadic singular measure: one atom of mass 1/2 at pi
// and four of mass 1/16 at 2 pi m / 32.
AtomicMeasure two_blocks() {
  AtomicMeasure mu;
  mu.add(kPi, 0.5);
  for (int m = 1; m <= 4; ++m) mu.add(kTwoPi * m / 32, 1.0 / 16);
  return mu;
}

double poisson_sum(const AtomicMeasure& mu, Complex z) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.mass * (1.0 - std::norm(z)) / std::norm(std::polar(1.0, a.position) - z);
  return s;
}

}  // namespace

TEST_CASE("box radius bounds the pseudo-hyperbolic distance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const double r0 = 0.99 * u(rng);
    const double r1 = r0 + (0.999 - r0) * u(rng);
    const double t0 = kTwoPi * u(rng);
    const double t1 = t0 + 2.0 * u(rng);
    const PolarBox b{r0, r1, t0, t1};
    const Complex c = box_center(b);
    const double h = box_rho_radius(b);
    for (int i = 0; i < 50; ++i) {
      const Complex z = std::polar(r0 + (r1 - r0) * u(rng), t0 + (t1 - t0) * u(rng));
      CHECK(raw::rho(c, z) <= h + 1e-12);
    }
  }
  for (int t = 0; t < 300; ++t) {
    const double y0 = std::exp(-8.0 * u(rng));
    const HalfPlaneBox b{-1.0 + u(rng), 0.0, y0, y0 * (1.0 + 4.0 * u(rng))};
    const HalfPlaneBox bb{b.x0, b.x0 + 2.0 * y0 * u(rng), b.y0, b.y1};
    const Complex c = box_center(bb);
    const double h = box_rho_radius(bb);
    for (int i = 0; i < 50; ++i) {
      const Complex z(bb.x0 + (bb.x1 - bb.x0) * u(rng), bb.y0 + (bb.y1 - bb.y0) * u(rng));
      CHECK(raw::rho_halfplane(c, z) <= h + 1e-12);
    }
  }
}

TEST_CASE("schwarz-pick bounds enclose |f| near the centre") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    ZeroSequence zs;
    for (int i = 0; i < 4; ++i) zs.add(std::polar(0.95 * std::sqrt(u(rng)), kTwoPi * u(rng)));
    const Complex c = std::polar(0.9 * u(rng), kTwoPi * u(rng));
    const double h = 0.5 * u(rng);
    const double s = std::abs(direct_product(zs, c));
    for (int i = 0; i < 40; ++i) {
      const Complex z = raw::mobius(c, std::polar(h * u(rng), kTwoPi * u(rng)));
      const double v = std::abs(direct_product(zs, z));
      CHECK(v >= schwarz_pick_lower(s, h) - 1e-12);
      CHECK(v <= schwarz_pick_upper(s, h) + 1e-12);
    }
  }
}

TEST_CASE("closed-form weighted areas") {
  // midpoint rule in r against the closed form
  const PolarBox b{0.3, 0.95, 0.2, 1.7};
  double num = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double r = b.r0 + (b.r1 - b.r0) * (i + 0.5) / N;
    num += r / (1.0 - r);
  }
  num *= (b.r1 - b.r0) / N * (b.theta1 - b.theta0);
  CHECK(weighted_area(b) == doctest::Approx(num).epsilon(1e-8));

  // the n = 64, N = 1536 sector
  const double n = 64, Nn = 1536;
  const double v = weighted_area(PolarBox{1.0 - n / Nn, 1.0 - 1.0 / Nn, 0.0, kTwoPi * n / Nn});
  CHECK(v >= 1.043);
  CHECK(v <= 1.089);
  CHECK(v >= (1 - n / Nn) * (kTwoPi * n / Nn) * std::log(n));
  CHECK(v <= (kTwoPi * n / Nn) * std::log(n));

  CHECK(weighted_area(HalfPlaneBox{0.0, 2.0, 0.25, 1.0}) == doctest::Approx(2.0 * std::log(4.0)));
  CHECK(weighted_area(PolarBox{0.5, 0.5, 0.0, 1.0}) == 0.0);
  CHECK(weighted_area(RegionCover{}).value == 0.0);
}

TEST_CASE("weighted area of a pseudo-hyperbolic disk") {
  const HyperbolicDisk d(DiscPoint(0.9), 0.5);
  const AreaResult a = weighted_area(d);
  // independent oracle: polar integration about the origin over the chord of
  // each circle |z| = r inside the Euclidean disk
  const Complex c = d.euclidean_center();
  const double R = d.euclidean_radius();
  double oracle = 0.0;
  const int NR = 400000;
  const double lo = std::abs(c) - R, hi = std::abs(c) + R;
  for (int i = 0; i < NR; ++i) {
    const double r = lo + (hi - lo) * (i + 0.5) / NR;
    const double cosv = (r * r + std::norm(c) - R * R) / (2.0 * r * std::abs(c));
    const double half = std::acos(std::clamp(cosv, -1.0, 1.0));
    oracle += 2.0 * half * r / (1.0 - r);
  }
  oracle *= (hi - lo) / NR;
  CHECK(a.value == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(a.error_bound < 1e-8);
  CHECK(a.value > 0.1 / 4);
  CHECK(a.value < 0.1 * 4);
}

TEST_CASE("level-set covers of monomials") {
  const double exact = kTwoPi * (std::log(2.0) - 0.5);
  ZeroSequence one, two;
  one.add(0.0);
  two.add(0.0, 2);
  for (const auto& [f, eps] : {std::pair{InnerExpr::blaschke(one), 0.5}, std::pair{InnerExpr::blaschke(two), 0.25}}) {
    const RegionCover cover = level_set_cover(f, eps, 10);
    const AreaResult a = weighted_area(cover);
    CHECK(a.value <= exact);
    CHECK(a.value + a.error_bound >= exact);
    CHECK(std::abs(a.value - exact) <= 0.01 * exact);
    for (const auto& c : cover.cells) {
      CHECK(c.a0 <= 0.5);  // cells touching |z| = 1/2 from outside stay undecided
      if (c.status == CellStatus::inside) CHECK(c.a1 <= 0.5);
    }
    CHECK(condition_A_report(f, {eps}, 10)[0].trend == "bounded");
  }
}

TEST_CASE("cover of a singular factor against Monte Carlo") {
  const AtomicMeasure mu = two_blocks();
  const auto f = InnerExpr::singular(mu);
  const int depth = 10;
  const RegionCover cover = level_set_cover(f, 0.5, depth);
  const AreaResult a = weighted_area(cover);

  // with s = -log(1 - r) the weight r dr / (1 - r) becomes r ds
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double S = depth * std::log(2.0);
  const int N = 1000000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const double r = -std::expm1(-S * u(rng));
    const Complex z = std::polar(r, kTwoPi * u(rng));
    if (poisson_sum(mu, z) > std::log(2.0)) sum += r;
  }
  const double mc = kTwoPi * S * sum / N;
  CHECK(std::abs(a.value - mc) <= 0.05 * mc);
  CHECK(a.value <= mc * 1.01);
  CHECK(a.value + a.error_bound >= mc * 0.99);
}

TEST_CASE("empty level set has zero area") {
  AtomicMeasure mu;
  mu.add(0.0, 1e-6);
  const RegionCover cover = level_set_cover(InnerExpr::singular(mu), 0.5, 4);
  CHECK(cover.cells.empty());
  CHECK(weighted_area(cover).value == 0.0);
  CHECK(weighted_area(cover).error_bound == 0.0);
}

TEST_CASE("half-plane cover of one atom") {
  // {m y / ((x - t)^2 + y^2) > L} is the disk tangent at t of diameter D = m / L
  const double m = 0.3, eps = 0.5, L = std::log(1.0 / eps), D = m / L;
  AtomicMeasure mu(BoundaryModel::halfplane);
  mu.add(0.1, m);
  const int depth = 14;
  const RegionCover cover = level_set_cover_halfplane(mu, eps, depth);
  const AreaResult a = weighted_area(cover);
  // integral over y0 < y < D of the chord 2 sqrt(y (D - y)) / y, y = D sin^2 u
  const double y0 = std::ldexp(1.0, -depth);
  const double u0 = std::asin(std::sqrt(y0 / D));
  double oracle = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double uu = u0 + (kPi / 2 - u0) * (i + 0.5) / N;
    oracle += 4.0 * D * std::cos(uu) * std::cos(uu);  // chord/y * dy/du
  }
  oracle *= (kPi / 2 - u0) / N;
  CHECK(a.value <= oracle * (1 + 1e-9));
  CHECK(a.value + a.error_bound >= oracle * (1 - 1e-9));
  CHECK(std::abs(a.value - oracle) <= 0.03 * oracle);
  CHECK(cover.pruned_columns > 0);
}

TEST_CASE("trend classification") {
  CHECK(classify_trend({0.0, 1.0, 1.0, 1.0, 1.0}) == "growing");
  CHECK(classify_trend({0.0, 1.0, 0.5, 0.01, 0.001, 0.0001}) == "bounded");
  CHECK(classify_trend({0.0, 1.0, 0.5, 0.5, 0.0, 0.0}) == "indeterminate");
  CHECK(classify_trend({}) == "bounded");
  CHECK(classify_trend({0.0, 1.0}) == "indeterminate");
}

TEST_CASE("condition (A) for a single factor is bounded") {
  ZeroSequence zs;
  zs.add(Complex(0.3, 0.4));
  const auto rep = condition_A_report(InnerExpr::blaschke(zs), {0.1, 0.5, 0.9}, 8);
  REQUIRE(rep.size() == 3);
  for (const auto& e : rep) {
    CHECK(e.trend == "bounded");
    CHECK(e.area.per_level.size() == 9);
  }
  CHECK(rep[0].area.value < rep[1].area.value);
  CHECK(rep[1].area.value < rep[2].area.value);
}
