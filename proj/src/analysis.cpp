#include "cninner/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cninner/cover.hpp"
#include "parallel.hpp"

namespace cninner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SampleGrid make_grid(const GridSpec& spec) {
  if (spec.levels < 1 || spec.levels > 40) fail(ErrorCode::invalid_argument, "grid levels must lie in [1, 40]");
  if (spec.m_r < 1 || spec.m_theta < 1) fail(ErrorCode::invalid_argument, "grid quotas must be positive");
  if (spec.refinement < 0 || spec.refinement > 8) fail(ErrorCode::invalid_argument, "grid refinement must lie in [0, 8]");
  if (spec.charts.empty()) fail(ErrorCode::invalid_argument, "grid needs at least one chart");
  const int M = spec.m_r << spec.refinement;
  const int T = spec.m_theta << spec.refinement;
  const double budget = static_cast<double>(M) * T * std::ldexp(1.0, spec.levels + 1) * static_cast<double>(spec.charts.size());
  if (budget > 2e7) fail(ErrorCode::budget, "grid would exceed 2e7 points");

  // Base lattice: the origin, then per cell rows a = 0..M-1 at
  // r0 + (r1 - r0)(a / M + nudge) and columns b = 0..T-1 at
  // theta0 + dtheta (b / T + nudge). The nudge keeps points off cell edges, so
  // each row and column has exactly one owner, and it does not depend on M or
  // T, so refinements are nested. The central disc uses rows 0.5 a / (2M),
  // a = 1..2M-1.
  constexpr double kNudge = 0x1p-30;
  SampleGrid g;
  g.refinement_level = spec.refinement;
  g.levels = spec.levels;
  g.quota = static_cast<std::size_t>(M) * static_cast<std::size_t>(T);
  g.resolution = 0.25 / M;
  std::vector<Complex> base{Complex(0.0, 0.0)};
  for (int j = 1; j <= spec.levels; ++j) {
    const std::uint64_t slots = std::uint64_t{1} << j;
    for (std::uint64_t k = 1; k <= slots; ++k) {
      const CellBounds b = whitney_bounds({j, k});
      const int rows = j == 1 ? 2 * M - 1 : M;
      for (int a = 0; a < rows; ++a) {
        const double r = j == 1 ? 0.5 * (a + 1) / (2 * M) : b.r0 + (b.r1 - b.r0) * (static_cast<double>(a) / M + kNudge);
        for (int c = 0; c < T; ++c) {
          base.push_back(std::polar(r, b.theta0 + (b.theta1 - b.theta0) * (static_cast<double>(c) / T + kNudge)));
        }
      }
      g.per_cell[{j, k}] = static_cast<std::size_t>(rows) * static_cast<std::size_t>(T);
    }
  }
  for (const Complex c : spec.charts) {
    DiscPoint checked(c);
    if (c == Complex(0.0, 0.0)) {
      g.points.insert(g.points.end(), base.begin(), base.end());
      continue;
    }
    for (const Complex p : base) {
      const Complex q = raw::mobius(checked.value(), p);
      if (std::abs(q) < 1.0) g.points.push_back(q);
    }
  }
  return g;
}

std::vector<PointSample> sample_points(const InnerExpr& f, const ZeroIndex& zeros, const std::vector<Complex>& pts,
                                       int threads) {
  std::vector<PointSample> out(pts.size());
  detail::parallel_for(pts.size(), threads, [&](std::size_t i) {
    const Complex z = pts[i];
    const CertifiedValue v = eval_log_modulus(f, DiscPoint(z));
    out[i] = {z, v.at_zero ? -kInf : v.log_modulus, zeros.distance(z)};
  });
  return out;
}

std::vector<Complex> shell_points(const ZeroSequence& zeros, double eps, int count) {
  std::vector<Complex> out;
  if (!(eps > 0.0 && eps < 1.0) || count < 1) return out;
  const double radius = std::min(eps * (1.0 + 1e-12), std::nextafter(1.0, 0.0));
  out.reserve(zeros.size() * static_cast<std::size_t>(count));
  for (const auto& e : zeros.entries()) {
    for (int i = 0; i < count; ++i) {
      const Complex q = raw::mobius(e.z, std::polar(radius, kTwoPi * i / count));
      if (std::abs(q) < 1.0) out.push_back(q);
    }
  }
  return out;
}

namespace {

// Lower bound for |f| on {rho(., Z) >= eps} for a finite product, or 0.
double certify_wep(const InnerExpr& f, const ZeroIndex& zeros, double eps, double target) {
  const auto& zs = zeros.zeros();
  if (zs.empty()) return 1.0;
  double amax = 0.0;
  for (const auto& e : zs.entries()) amax = std::max(amax, std::abs(e.z));

  // Outside |z| = R every factor satisfies rho(z, a) >= (R - |a|)/(1 - R|a|).
  auto annulus_bound = [&](double R) {
    double lg = 0.0;
    for (const auto& e : zs.entries()) {
      const double a = std::abs(e.z);
      lg += e.multiplicity * std::log((R - a) / (1.0 - R * a));
    }
    return std::exp(lg);
  };
  int t = std::max(1, static_cast<int>(std::ceil(-std::log2(1.0 - amax))) + 1);
  double ann = annulus_bound(1.0 - std::ldexp(1.0, -t));
  while (ann < target && t < 30) ann = annulus_bound(1.0 - std::ldexp(1.0, -++t));

  double lower = ann;
  constexpr int kMaxSplit = 7;
  auto visit = [&](auto&& self, const PolarBox& b, int split) -> void {
    if (lower <= 0.0) return;
    const Complex c = box_center(b);
    const double h = box_rho_radius(b);
    if (eps > h && zeros.distance(c) < (eps - h) / (1.0 - eps * h)) return;  // box inside {rho < eps}
    const double L = schwarz_pick_lower(eval_modulus(f, c), h);
    if (L >= target || split >= kMaxSplit) {
      lower = std::min(lower, L);
      return;
    }
    const double rm = 0.5 * (b.r0 + b.r1);
    const double tm = 0.5 * (b.theta0 + b.theta1);
    self(self, {b.r0, rm, b.theta0, tm}, split + 1);
    self(self, {b.r0, rm, tm, b.theta1}, split + 1);
    self(self, {rm, b.r1, b.theta0, tm}, split + 1);
    self(self, {rm, b.r1, tm, b.theta1}, split + 1);
  };
  for (int j = 1; j <= t; ++j) {
    const std::uint64_t slots = std::uint64_t{1} << j;
    for (std::uint64_t k = 1; k <= slots; ++k) {
      const CellBounds cb = whitney_bounds({j, k});
      visit(visit, PolarBox{j == 1 ? 0.0 : cb.r0, cb.r1, cb.theta0, cb.theta1}, 0);
    }
  }
  return std::max(lower, 0.0);
}

}  // namespace

WepProfile wep_indicator(const InnerExpr& f, const ZeroIndex& zeros, const std::vector<double>& eps_list,
                         const SampleGrid& grid, const WepOptions& options) {
  if (grid.points.empty()) fail(ErrorCode::invalid_argument, "empty sample grid");
  for (double e : eps_list) {
    if (!(e > 0.0 && e < 1.0)) fail(ErrorCode::invalid_argument, "eps values must lie in (0, 1)");
  }
  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end());

  // One common point set for every eps keeps the profile monotone in eps.
  std::vector<Complex> pts = grid.points;
  if (options.shells) {
    const int count = options.shell_points << grid.refinement_level;
    for (double e : eps) {
      const auto s = shell_points(zeros.zeros(), e, count);
      pts.insert(pts.end(), s.begin(), s.end());
    }
  }
  const auto samples = sample_points(f, zeros, pts, options.threads);

  WepProfile out;
  out.refinement = grid.refinement_level;
  out.points = samples.size();
  for (double e : eps) {
    WepEntry entry;
    entry.eps = e;
    double best = kInf;
    for (const auto& s : samples) {
      if (s.rho >= e && s.log_modulus < best) {
        best = s.log_modulus;
        entry.witness = s.z;
      }
    }
    if (best == kInf) {
      entry.vacuous = true;
      entry.eta = 1.0;
    } else {
      entry.eta = std::exp(best);
    }
    if (options.certify && is_finite_blaschke(f) && !entry.vacuous) {
      entry.certified_lower = certify_wep(f, zeros, e, 0.5 * entry.eta);
      entry.certified = entry.certified_lower > 0.0;
    }
    out.entries.push_back(entry);
  }
  return out;
}

double vasyunin_constant(const InnerExpr& f, const ZeroIndex& zeros, const SampleGrid& grid, int threads) {
  const auto samples = sample_points(f, zeros, grid.points, threads);
  double best = kInf;
  for (const auto& s : samples) {
    if (s.log_modulus == -kInf || s.rho < kAtZeroRho) continue;
    best = std::min(best, s.log_modulus - std::log(s.rho));
  }
  return best == kInf ? 1.0 : std::exp(best);
}

CnFit cn_exponent_fit(const std::vector<CnStage>& stages, int n_max, int threads) {
  if (n_max < 1) fail(ErrorCode::invalid_argument, "n_max must be at least 1");
  if (stages.empty()) fail(ErrorCode::invalid_argument, "need at least one stage");
  CnFit fit;
  for (const auto& st : stages) {
    const auto samples = sample_points(st.f, *st.zeros, st.grid.points, threads);
    std::vector<double> logs(static_cast<std::size_t>(n_max), kInf);
    for (const auto& s : samples) {
      if (s.log_modulus == -kInf || s.rho < kAtZeroRho) continue;
      const double lr = std::log(s.rho);
      for (int n = 1; n <= n_max; ++n) logs[n - 1] = std::min(logs[n - 1], s.log_modulus - n * lr);
    }
    std::vector<double> A;
    for (double l : logs) A.push_back(l == kInf ? 1.0 : std::exp(l));
    fit.stage_labels.push_back(st.label);
    fit.A.push_back(std::move(A));
  }
  const std::size_t S = fit.A.size();
  for (int n = 1; n <= n_max; ++n) {
    bool decays = false;
    for (std::size_t t = S >= 3 ? S - 3 : 0; t + 1 < S; ++t) {
      if (fit.A[t + 1][n - 1] < kDecayRatio * fit.A[t][n - 1]) decays = true;
    }
    fit.decaying.push_back(decays);
    if (!decays && !fit.exponent && S >= 2) fit.exponent = n;
  }
  std::ostringstream os;
  if (S < 2) {
    os << "empirical: a single stage cannot show decay";
  } else if (fit.exponent) {
    os << "empirical: |f| >= A rho^" << *fit.exponent << " with A stable over the last "
       << std::min<std::size_t>(2, S - 1) << " transition(s)";
  } else {
    os << "empirical: no exponent <= " << n_max << " (every A_n decays)";
  }
  fit.verdict = os.str();
  return fit;
}

CnFit cn_exponent_fit(const InnerExpr& f, std::shared_ptr<const ZeroIndex> zeros, GridSpec grid, int n_max,
                      int stages, int threads) {
  std::vector<CnStage> st;
  const int base = grid.refinement;
  for (int s = 0; s < stages; ++s) {
    grid.refinement = base + s;
    st.push_back({"refinement " + std::to_string(base + s), f, zeros, make_grid(grid)});
  }
  return cn_exponent_fit(st, n_max, threads);
}

CarlesonResult carleson_condition(const ZeroSequence& zeros) {
  CarlesonResult out;
  double best = 0.0;  // log delta
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    if (zeros[k].multiplicity > 1) return {0.0, k};
    double lg = 0.0;
    for (std::size_t j = 0; j < zeros.size(); ++j) {
      if (j == k) continue;
      const double r = raw::rho(zeros[j].z, zeros[k].z);
      if (r == 0.0) return {0.0, k};
      lg += std::log(r);
    }
    if (k == 0 || lg < best) {
      best = lg;
      out.argmin = k;
    }
  }
  out.delta = zeros.empty() ? 1.0 : std::exp(best);
  return out;
}

}  // namespace cninner
