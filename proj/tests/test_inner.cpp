#include <doctest.h>

#include <cmath>
#include <random>

#include "cninner/expr_json.hpp"
#include "cninner/inner.hpp"

using namespace cninner;

namespace {

Complex random_disc(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), kTwoPi * u(rng));
}

// Straight product of (z - a)/(1 - conj(a) z), no logarithms.
Complex direct_product(const ZeroSequence& zs, Complex z) {
  Complex p = 1.0;
  for (const auto& e : zs.entries()) {
    for (int m = 0; m < e.multiplicity; ++m) p *= (z - e.z) / (1.0 - std::conj(e.z) * z);
  }
  return p;
}

InnerExpr single_atom(double theta, double mass) {
  AtomicMeasure mu;
  mu.add(theta, mass);
  return InnerExpr::singular(mu);
}

}  // namespace

TEST_CASE("zero sequence bookkeeping") {
  ZeroSequence zs;
  zs.add(0.5, 2);
  zs.add(Complex(0.0, -0.75));
  CHECK(zs.degree() == 3);
  CHECK(zs.blaschke_sum() == doctest::Approx(2 * 0.5 + 0.25).epsilon(1e-15));
  CHECK_THROWS_AS(zs.add(1.0), Error);
  CHECK_THROWS_AS(zs.add(0.1, 0), Error);
}

TEST_CASE("log-modulus examples") {
  CHECK(eval_log_modulus(InnerExpr::identity(), DiscPoint(0.3, 0)).log_modulus == doctest::Approx(std::log(0.3)).epsilon(1e-15));
  CHECK(eval_log_modulus(single_atom(0.0, 1.0), DiscPoint(0, 0)).log_modulus == doctest::Approx(-1.0).epsilon(1e-15));
  // (1 - r^2) / (1 - r)^2 = (1 + r) / (1 - r) = 3 at r = 1/2
  CHECK(eval_log_modulus(single_atom(0.0, 1.0), DiscPoint(0.5, 0)).log_modulus == doctest::Approx(-3.0).epsilon(1e-15));
  const auto at = eval_log_modulus(InnerExpr::identity(), DiscPoint(0, 0));
  CHECK(at.at_zero);
  CHECK(std::isinf(at.log_modulus));
}

TEST_CASE("singular factor closed form") {
  for (double r : {0.0, 0.25, 0.5, 0.9}) {
    const double expected = std::exp(-(1.0 + r) / (1.0 - r));
    const Complex v = eval_value(single_atom(0.0, 1.0), DiscPoint(r, 0));
    CHECK(std::abs(std::abs(v) - expected) < 1e-12);
    CHECK(std::abs(v - expected) < 1e-12);  // real and positive on the radius
  }
}

TEST_CASE("singular phase matches exp of the Herglotz integral") {
  AtomicMeasure mu;
  mu.add(0.3, 0.7);
  mu.add(2.0, 0.2);
  const InnerExpr s = InnerExpr::singular(mu);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Complex z = random_disc(rng, 0.95);
    Complex h = 0.0;
    for (const auto& a : mu.atoms()) {
      const Complex zeta = std::polar(1.0, a.position);
      h -= a.mass * (zeta + z) / (zeta - z);
    }
    CHECK(std::abs(eval_value(s, DiscPoint(z)) - std::exp(h)) < 1e-12);
  }
}

TEST_CASE("half-plane singular factor seen from the disc") {
  AtomicMeasure mu(BoundaryModel::halfplane);
  mu.add(0.5, 0.3);
  mu.add(-1.0, 0.1);
  const InnerExpr s = InnerExpr::singular(mu);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Complex z = random_disc(rng, 0.9);
    const Complex h = raw::cayley_inv(z);
    Complex e = 0.0;
    for (const auto& a : mu.atoms()) e += Complex(0, 1) * a.mass / (a.position - h);
    CHECK(std::abs(eval_value(s, DiscPoint(z)) - std::exp(e)) < 1e-12);
    CHECK(eval_log_modulus(s, DiscPoint(z)).log_modulus == doctest::Approx(-poisson_integral(mu, h)).epsilon(1e-13));
  }
}

TEST_CASE("product identity against direct evaluation") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> deg(1, 50);
  for (int t = 0; t < 20; ++t) {
    ZeroSequence zs;
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) zs.add(random_disc(rng, 0.99), 1 + (i % 7 == 0));
    const InnerExpr f = InnerExpr::blaschke(zs);
    for (int q = 0; q < 200; ++q) {
      const Complex z = random_disc(rng, 0.999);
      const Complex direct = direct_product(zs, z);
      const CertifiedValue v = eval_log_modulus(f, DiscPoint(z));
      if (v.at_zero) continue;
      CHECK(std::abs(v.log_modulus - std::log(std::abs(direct))) < 1e-10);
      CHECK(v.log_modulus <= 0.0);
      REQUIRE(v.phase);
      CHECK(std::abs(*v.phase - direct / std::abs(direct)) < 1e-9);
    }
  }
}

TEST_CASE("frostman shift") {
  ZeroSequence zs;
  zs.add(Complex(0.2, 0.3));
  zs.add(-0.6);
  const InnerExpr f = InnerExpr::blaschke(zs);
  const Complex gamma(0.1, -0.2);
  for (const auto& e : zs.entries()) {
    CHECK(eval_log_modulus(frostman_shift(f, gamma), DiscPoint(e.z)).log_modulus ==
          doctest::Approx(std::log(std::abs(gamma))).epsilon(1e-14));
  }
  CHECK(eval_log_modulus(frostman_shift(InnerExpr::identity(), 0.5), DiscPoint(0, 0)).log_modulus ==
        doctest::Approx(std::log(0.5)));
  ZeroSequence sq;
  sq.add(0.0, 2);
  CHECK(eval_log_modulus(frostman_shift(InnerExpr::blaschke(sq), 0.25), DiscPoint(0.5, 0)).at_zero);
  CHECK_THROWS_AS(frostman_shift(f, 0.0), Error);
  CHECK_THROWS_AS(frostman_shift(f, 1.0), Error);

  // Against the formula on random points.
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Complex z = random_disc(rng, 0.99);
    const Complex u = direct_product(zs, z);
    const Complex expected = (gamma - u) / (1.0 - std::conj(gamma) * u);
    CHECK(std::abs(eval_value(frostman_shift(f, gamma), DiscPoint(z)) - expected) < 1e-12);
  }
}

TEST_CASE("precomposition moves zeros") {
  ZeroSequence zs;
  zs.add(0.3);
  const Complex a(0.0, 0.6);
  const InnerExpr g = InnerExpr::precompose(a, InnerExpr::blaschke(zs));
  const auto zeros = expr_zeros(g);
  REQUIRE(zeros);
  REQUIRE(zeros->size() == 1);
  CHECK(eval_log_modulus(g, DiscPoint((*zeros)[0].z)).at_zero);
  CHECK(std::abs((*zeros)[0].z - raw::mobius(a, 0.3)) < 1e-15);
}

TEST_CASE("schwarz-pick on random expressions") {
  ZeroSequence zs;
  zs.add(Complex(0.4, 0.1));
  zs.add(Complex(-0.2, 0.7), 2);
  AtomicMeasure mu;
  mu.add(1.0, 0.4);
  const InnerExpr f = InnerExpr::product(
      {InnerExpr::blaschke(zs), InnerExpr::singular(mu), InnerExpr::precompose(Complex(0.3, 0.3), InnerExpr::identity())});
  const InnerExpr g = frostman_shift(f, Complex(0.2, 0.1));
  std::mt19937_64 rng(12);
  for (const InnerExpr* e : {&f, &g}) {
    for (int i = 0; i < 300; ++i) {
      const Complex z = random_disc(rng, 0.9);
      const double h = 1e-6;
      const Complex d = (eval_value(*e, DiscPoint(z + h)) - eval_value(*e, DiscPoint(z - h))) / (2 * h);
      const double fz = std::abs(eval_value(*e, DiscPoint(z)));
      CHECK(std::abs(d) * (1 - std::norm(z)) <= 1 - fz * fz + 1e-6);
    }
  }
}

TEST_CASE("singular factors are strictly below one") {
  AtomicMeasure mu;
  mu.add(4.0, 1e-3);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(eval_log_modulus(InnerExpr::singular(mu), DiscPoint(random_disc(rng, 0.99))).log_modulus < 0.0);
  }
}

TEST_CASE("truncation certificates") {
  SUBCASE("finite sequences are kept whole") {
    ZeroSequence zs;
    zs.add(0.9);
    zs.add(-0.9);
    const Truncation t = blaschke_truncate(FiniteZeros(zs), 0.5, 1e-6);
    CHECK(t.prefix.size() == 2);
    CHECK(t.tail_bound == 0.0);
  }
  SUBCASE("radial dyadic zeros against a longer prefix") {
    const RadialDyadicZeros gen;
    const Truncation t = blaschke_truncate(gen, 0.5, 1e-6);
    CHECK(t.budget_met);
    CHECK(t.tail_bound <= 1e-6);
    const std::size_t K = t.prefix.size();
    // Oracle: factors K..4K-1 summed from their exact gaps 1 - |w| = 2^{-(i+1)},
    // since 1 - |w| underflows in double precision past i = 52.
    std::mt19937_64 rng(21);
    for (int q = 0; q < 200; ++q) {
      const Complex z = random_disc(rng, 0.5);
      const double r2 = std::norm(z);
      double tail = 0.0;
      for (std::size_t i = K; i < 4 * K; ++i) {
        const double d = std::ldexp(1.0, -static_cast<int>(i) - 1);
        const double den = std::norm(1.0 - z + d * z);  // |1 - conj(w) z|^2 with w = 1 - d real
        tail += 0.5 * std::log1p(-(1.0 - r2) * d * (2.0 - d) / den);
      }
      CHECK(std::abs(tail) <= t.tail_bound);
      CHECK(std::abs(tail) > 0.1 * t.tail_bound);  // the certificate is not wildly loose
    }
  }
  SUBCASE("bound shrinks as the prefix grows") {
    const RadialDyadicZeros gen;
    double last = tail_log_bound(0.7, *gen.tail_majorant(3));
    for (std::size_t k = 4; k < 40; ++k) {
      const double b = tail_log_bound(0.7, *gen.tail_majorant(k));
      CHECK(b < last);
      last = b;
    }
  }
  SUBCASE("budget that cannot be met is flagged") {
    const Truncation t = blaschke_truncate(RadialDyadicZeros(), 0.5, 1e-9, 8);
    CHECK_FALSE(t.budget_met);
    CHECK(t.tail_bound > 1e-9);
  }
  SUBCASE("generator expressions report their bound") {
    const InnerExpr f = InnerExpr::blaschke(std::make_shared<const RadialDyadicZeros>());
    const CertifiedValue v = eval_log_modulus(f, DiscPoint(0.2, 0.1), TailPolicy{1e-8, 1u << 20});
    CHECK(v.budget_met);
    CHECK(v.abs_error_bound <= 1e-8);
    CHECK_FALSE(v.phase.has_value());
  }
}

TEST_CASE("json round trip") {
  const std::string text = R"({"kind":"product","children":[
    {"kind":"blaschke","zeros":[[0.5,0,1],[-0.25,0.25,2]]},
    {"kind":"singular","model":"disc","atoms":[[0.0,1.0]]},
    {"kind":"frostman","gamma":[0.1,0.0],"child":{"kind":"identity"}},
    {"kind":"precompose","a":[0,0.5],"child":{"kind":"blaschke","zeros":[[0.1,0.1]]}},
    {"kind":"blaschke","generator":{"type":"radial_dyadic","scale":0.5}}]})";
  const InnerExpr f = expr_from_json(nlohmann::json::parse(text));
  const InnerExpr g = expr_from_json(expr_to_json(f));
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.5, 0.3), Complex(0.0, -0.9)}) {
    CHECK(eval_log_modulus(f, DiscPoint(z)).log_modulus == eval_log_modulus(g, DiscPoint(z)).log_modulus);
  }
  CHECK_THROWS_AS(expr_from_json(nlohmann::json::parse(R"({"kind":"nope"})")), Error);
  CHECK_THROWS_AS(expr_from_json(nlohmann::json::parse(R"({"kind":"blaschke","zeros":[[2,0]]})")), Error);
  try {
    expr_from_json(nlohmann::json::parse(R"({"kind":"frostman","gamma":[0,0],"child":{"kind":"identity"}})"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
  }
}
