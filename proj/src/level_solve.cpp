#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "cninner/analysis.hpp"

namespace cninner {

namespace {

// f = kappa * prod ((z - a)/(1 - conj(a) z))^m, evaluated directly.
struct FiniteProduct {
  std::vector<ZeroEntry> zeros;
  Complex kappa{1.0, 0.0};
  int degree = 0;

  Complex value(Complex z) const {
    Complex p = kappa;
    for (const auto& e : zeros) {
      const Complex b = (z - e.z) / (1.0 - std::conj(e.z) * z);
      for (int m = 0; m < e.multiplicity; ++m) p *= b;
    }
    return p;
  }
  // f'/f
  Complex log_derivative(Complex z) const {
    Complex s = 0.0;
    for (const auto& e : zeros) s += static_cast<double>(e.multiplicity) * (1.0 - std::norm(e.z)) / ((z - e.z) * (1.0 - std::conj(e.z) * z));
    return s;
  }
};

struct Segment {
  bool arc;
  Complex a, b;         // line endpoints
  double r, t0, t1;     // arc radius and angles
  Complex at(double s) const { return arc ? std::polar(r, t0 + (t1 - t0) * s) : a + (b - a) * s; }
};

struct Box {
  double r0, r1, t0, t1;
  bool disk() const { return r0 == 0.0 && t1 - t0 >= kTwoPi; }
};

std::vector<Segment> boundary(const Box& b) {
  if (b.disk()) return {Segment{true, {}, {}, b.r1, b.t0, b.t1}};
  std::vector<Segment> segs;
  segs.push_back({true, {}, {}, b.r1, b.t0, b.t1});
  segs.push_back({false, std::polar(b.r1, b.t1), std::polar(b.r0, b.t1), 0, 0, 0});
  segs.push_back({true, {}, {}, b.r0, b.t1, b.t0});
  segs.push_back({false, std::polar(b.r0, b.t0), std::polar(b.r1, b.t0), 0, 0, 0});
  return segs;
}

// A disk splits into a smaller disk and four annular sectors, so no cell
// edge ever runs through the origin; other cells split in four.
std::array<Box, 5> children(const Box& b, double jit, int& count) {
  if (b.disk()) {
    const double rm = b.r1 * (0.5 + jit);
    const double off = b.t0 + jit * kPi;
    count = 5;
    return {Box{0.0, rm, 0.0, kTwoPi}, Box{rm, b.r1, off, off + kPi / 2}, Box{rm, b.r1, off + kPi / 2, off + kPi},
            Box{rm, b.r1, off + kPi, off + 1.5 * kPi}, Box{rm, b.r1, off + 1.5 * kPi, off + kTwoPi}};
  }
  const double rm = b.r0 + (b.r1 - b.r0) * (0.5 + jit);
  const double tm = b.t0 + (b.t1 - b.t0) * (0.5 - 0.7 * jit);
  count = 4;
  return {Box{b.r0, rm, b.t0, tm}, Box{b.r0, rm, tm, b.t1}, Box{rm, b.r1, b.t0, tm}, Box{rm, b.r1, tm, b.t1}, Box{}};
}

// Bound on |f'| within distance len of z0: |f'| <= sup|f| * sup|f'/f|, with
// |z - a| / |1 - conj(a) z| <= (|z0 - a| + len) / (|1 - conj(a) z0| - |a| len)
// and |f'/f| <= sum m (1 - |a|^2) / (|z - a| |1 - conj(a) z|).
double lipschitz(const FiniteProduct& f, Complex z0, double len) {
  double modulus = 1.0, logd = 0.0;
  for (const auto& e : f.zeros) {
    const double d0 = std::abs(z0 - e.z);
    const double d1 = d0 - len;
    const double d2 = std::abs(1.0 - std::conj(e.z) * z0) - std::abs(e.z) * len;
    if (d1 <= 0.0 || d2 <= 0.0) return std::numeric_limits<double>::infinity();
    modulus *= std::pow(std::min(1.0, (d0 + len) / d2), e.multiplicity);
    logd += e.multiplicity * (1.0 - std::norm(e.z)) / (d1 * d2);
  }
  return modulus * logd;
}

// Winding number of f - gamma along the closed chain. A step of length len
// from z0 is taken only when len * sup|f'| < |g(z0)| / 2, so g cannot vanish
// or turn by a quarter revolution inside it. Returns nullopt when g gets
// below `floor` on the contour (a root on or next to an edge).
std::optional<int> winding(const FiniteProduct& f, Complex gamma, const std::vector<Segment>& segs, double floor) {
  double total = 0.0;
  for (const auto& seg : segs) {
    const double length = seg.arc ? seg.r * std::abs(seg.t1 - seg.t0) : std::abs(seg.b - seg.a);
    if (length == 0.0) continue;
    double s = 0.0, ds = 1.0 / 16.0;
    Complex z0 = seg.at(0.0);
    Complex g0 = f.value(z0) - gamma;
    while (s < 1.0) {
      const double m0 = std::abs(g0);
      if (m0 < floor) return std::nullopt;
      double step = std::min(ds, 1.0 - s);
      while (step * length * lipschitz(f, z0, step * length) >= 0.5 * m0) {
        step *= 0.5;
        if (step < 1e-13 || step * length < 1e-15) return std::nullopt;
      }
      const Complex z1 = seg.at(s + step == 1.0 ? 1.0 : s + step);
      const Complex g1 = f.value(z1) - gamma;
      total += std::arg(g1 / g0);
      z0 = z1;
      g0 = g1;
      s += step;
      ds = std::min(0.25, 2.0 * step);
    }
    if (std::abs(g0) < floor) return std::nullopt;
  }
  const double w = total / kTwoPi;
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 1e-3) return std::nullopt;
  return static_cast<int>(rounded);
}

bool in_box(Complex z, const Box& b, double slack) {
  const double r = std::abs(z);
  if (r < b.r0 - slack || r > b.r1 + slack) return false;
  if (b.t1 - b.t0 >= kTwoPi) return true;  // full annulus or disk
  double t = raw::arg0(z);
  while (t < b.t0 - kPi) t += kTwoPi;
  while (t > b.t0 + kPi) t -= kTwoPi;
  const double arcslack = r > 0.0 ? slack / r : kPi;
  if (t < b.t0 - arcslack) t += kTwoPi;
  return t >= b.t0 - arcslack && t <= b.t1 + arcslack;
}

std::optional<Complex> newton(const FiniteProduct& f, Complex gamma, Complex z) {
  for (int it = 0; it < 100; ++it) {
    const Complex v = f.value(z);
    if (v == gamma) return z;
    const Complex d = v * f.log_derivative(z);
    if (std::abs(d) == 0.0 || !std::isfinite(std::abs(d))) return std::nullopt;
    const Complex step = (v - gamma) / d;
    z -= step;
    if (!(std::abs(z) < 1.0)) return std::nullopt;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) return z;
  }
  return std::abs(f.value(z) - gamma) < 1e-12 ? std::optional<Complex>(z) : std::nullopt;
}

constexpr std::array<double, 8> kJitter{0.0, 0.0731, -0.0517, 0.1123, -0.0913, 0.0377, -0.1291, 0.0619};

}  // namespace

LevelSolveResult level_solve(const InnerExpr& f, Complex gamma) {
  if (!is_finite_blaschke(f)) fail(ErrorCode::unsupported, "level_solve needs a finite Blaschke expression");
  if (!(std::abs(gamma) < 1.0)) fail(ErrorCode::domain, "level value must satisfy |gamma| < 1");
  const auto zs = expr_zeros(f);
  FiniteProduct P;
  P.zeros = zs->entries();
  P.degree = static_cast<int>(zs->degree());

  LevelSolveResult out;
  if (P.degree == 0) return out;  // unimodular constant never equals gamma

  // Unimodular constant from one evaluation away from the zeros.
  for (Complex probe : {Complex(0.0, 0.0), Complex(0.3, 0.2), Complex(-0.1, -0.4), Complex(0.05, 0.6)}) {
    const CertifiedValue v = eval_log_modulus(f, DiscPoint(probe));
    if (v.at_zero || v.log_modulus < -30.0) continue;
    P.kappa = std::exp(v.log_modulus) * *v.phase / P.value(probe);
    P.kappa /= std::abs(P.kappa);
    break;
  }

  const double floor = 1e-13;

  // Enclosing radius: grow R = 1 - 2^-t until the circle winds degree times.
  double amax = 0.0;
  for (const auto& e : P.zeros) amax = std::max(amax, std::abs(e.z));
  int t = std::max(1, static_cast<int>(std::ceil(-std::log2(1.0 - amax))));
  for (;; ++t) {
    if (t > 50) fail(ErrorCode::budget, "no enclosing circle found up to 1 - 2^-50");
    const double R = 1.0 - std::ldexp(1.0, -t);
    if (R <= amax) continue;
    const auto w = winding(P, gamma, {Segment{true, {}, {}, R, 0.0, kTwoPi}}, floor);
    if (w && *w == P.degree) {
      out.radius = R;
      out.winding = *w;
      break;
    }
  }

  struct Work {
    Box box;
    int w;
    int depth;
  };

  std::vector<Work> stack{{Box{0.0, out.radius, 0.0, kTwoPi}, out.winding, 0}};

  while (!stack.empty()) {
    const Work cur = stack.back();
    stack.pop_back();
    if (cur.w == 0) continue;
    const Box& b = cur.box;
    const Complex centre = b.disk() ? Complex(0.0, 0.0) : std::polar(0.5 * (b.r0 + b.r1), 0.5 * (b.t0 + b.t1));
    const double diam = b.disk() ? 2.0 * b.r1 : (b.r1 - b.r0) + b.r1 * (b.t1 - b.t0);
    if (cur.w == 1 || diam < 1e-10) {
      const auto z = newton(P, gamma, centre);
      if (z && (diam < 1e-10 || in_box(*z, b, 1e-12))) {
        out.roots.push_back({*z, cur.w, std::abs(P.value(*z) - gamma)});
        continue;
      }
      if (diam < 1e-10) fail(ErrorCode::internal, "root cluster did not converge");
    }
    if (cur.depth > 80) fail(ErrorCode::internal, "subdivision depth exhausted");
    bool split = false;
    for (double jit : kJitter) {
      int count = 0;
      const auto kids = children(b, jit, count);
      std::vector<Work> next;
      int sum = 0;
      bool ok = true;
      for (int c = 0; c < count; ++c) {
        const Box& k = kids[static_cast<std::size_t>(c)];
        const auto w = winding(P, gamma, boundary(k), floor);
        ++out.cells;
        if (!w || *w < 0) {
          ok = false;
          break;
        }
        sum += *w;
        next.push_back({k, *w, cur.depth + 1});
      }
      if (ok && sum == cur.w) {
        stack.insert(stack.end(), next.begin(), next.end());
        split = true;
        break;
      }
      ++out.retries;
    }
    if (!split) {
      // Every perturbation put a root on an edge: the cell is tiny around a
      // multiple or clustered root; polish from the centre.
      const auto z = newton(P, gamma, centre);
      if (!z) fail(ErrorCode::internal, "winding integration ill-conditioned after perturbation");
      out.roots.push_back({*z, cur.w, std::abs(P.value(*z) - gamma)});
    }
  }

  int count = 0;
  for (const auto& r : out.roots) count += r.multiplicity;
  if (count != P.degree) {
    fail(ErrorCode::internal, "found " + std::to_string(count) + " roots for degree " + std::to_string(P.degree));
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const LevelRoot& a, const LevelRoot& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return out;
}

}  // namespace cninner
