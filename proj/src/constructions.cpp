#include "cninner/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace cninner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LevelLayout {
  double s0, s1, dtheta;
  int rows, columns;            // columns: widest row
  std::vector<int> per_row;     // sums to N - j
};

// Largest-remainder split of count - rows over the rows, at least one each.
std::vector<int> allocate(int count, const std::vector<double>& weight) {
  const int rows = static_cast<int>(weight.size());
  const int rest = count - rows;
  double total = 0.0;
  for (double w : weight) total += w;
  std::vector<int> out(weight.size(), 1);
  std::vector<double> frac(weight.size());
  int used = 0;
  for (int a = 0; a < rows; ++a) {
    const double q = rest * weight[a] / total;
    const int f = static_cast<int>(std::floor(q));
    out[a] += f;
    frac[a] = q - f;
    used += f;
  }
  std::vector<int> order(weight.size());
  for (int a = 0; a < rows; ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return frac[x] > frac[y]; });
  for (int i = 0; i < rest - used; ++i) ++out[order[i]];
  return out;
}

LevelLayout layout(int j, int count, SigmaPlacement placement) {
  const CellBounds b = whitney_bounds({j, 1});
  LevelLayout L{std::atanh(b.r0), std::atanh(b.r1), b.theta1 - b.theta0, 1, 1, {}};
  if (placement == SigmaPlacement::square) {
    L.rows = L.columns = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    for (int left = count; left > 0; left -= L.columns) L.per_row.push_back(std::min(left, L.columns));
    return L;
  }
  // Row count from the cell's hyperbolic height / width, then points per row
  // in proportion to the row's hyperbolic length.
  const double H = L.s1 - L.s0;
  const double rm = std::tanh(0.5 * (L.s0 + L.s1));
  const double W = L.dtheta * rm / (1.0 - rm * rm);
  L.rows = std::clamp(static_cast<int>(std::lround(std::sqrt(count * H / W))), 1, count);
  std::vector<double> weight;
  for (int a = 0; a < L.rows; ++a) weight.push_back(0.5 * L.dtheta * std::sinh(2.0 * (L.s0 + (a + 0.5) * H / L.rows)));
  L.per_row = allocate(count, weight);
  L.columns = *std::max_element(L.per_row.begin(), L.per_row.end());
  return L;
}

}  // namespace

SigmaFamily sigma_family(const SigmaFamilySpec& spec) {
  if (spec.N < 1 || spec.N > kMaxSigmaN) {
    fail(ErrorCode::invalid_argument, "Sigma_N needs 1 <= N <= " + std::to_string(kMaxSigmaN));
  }
  if (spec.gap_samples < 1) fail(ErrorCode::invalid_argument, "gap_samples must be positive");
  SigmaFamily fam;
  fam.N = spec.N;
  std::vector<LevelLayout> layouts;
  for (int j = 1; j < spec.N; ++j) {
    const int count = spec.N - j;
    const LevelLayout L = layout(j, count, spec.placement);
    layouts.push_back(L);
    const double H = L.s1 - L.s0;
    for (std::uint64_t k = 1; k <= (std::uint64_t{1} << j); ++k) {
      const double theta0 = whitney_bounds({j, k}).theta0;
      for (std::size_t a = 0; a < L.per_row.size(); ++a) {
        const double r = std::tanh(L.s0 + (a + 0.5) * H / L.rows);
        for (int b = 0; b < L.per_row[a]; ++b) {
          fam.zeros.add(std::polar(r, theta0 + (b + 0.5) * L.dtheta / L.per_row[a]));
          fam.levels.push_back(j);
        }
      }
    }
  }
  if (fam.zeros.empty()) return fam;

  const ZeroIndex idx(fam.zeros);
  std::vector<double> nearest(fam.zeros.size(), kInf);
  for (std::size_t i = 0; i < fam.zeros.size(); ++i) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.N - fam.levels[i]));
    const double radius = std::min(0.999, 1.5 * kSeparationHigh * scale);
    for (std::size_t id : idx.within(fam.zeros[i].z, radius)) {
      if (id != i) nearest[i] = std::min(nearest[i], raw::rho(fam.zeros[i].z, fam.zeros[id].z));
    }
  }
  std::ostringstream bad;
  for (int j = 1; j < spec.N; ++j) {
    const LevelLayout& L = layouts[static_cast<std::size_t>(j - 1)];
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.N - j));
    SeparationStats st;
    st.j = j;
    st.per_cell = spec.N - j;
    st.rows = L.rows;
    st.columns = L.columns;
    st.min_sibling = kInf;
    for (std::size_t i = 0; i < fam.zeros.size(); ++i) {
      if (fam.levels[i] != j) continue;
      st.min_sibling = std::min(st.min_sibling, nearest[i] / scale);
      st.max_sibling = std::max(st.max_sibling, nearest[i] / scale);
    }
    const int q = spec.gap_samples;
    for (std::uint64_t k = 1; k <= (std::uint64_t{1} << j); ++k) {
      const CellBounds b = whitney_bounds({j, k});
      for (int a = 0; a <= q; ++a) {
        // stay just inside the outer edge, which belongs to the next level
        const double r = b.r0 + (b.r1 - b.r0) * a / q * (1.0 - 1e-6);
        for (int c = 0; c <= q; ++c) {
          const Complex z = std::polar(r, b.theta0 + (b.theta1 - b.theta0) * c / q);
          st.max_gap = std::max(st.max_gap, idx.distance(z) / scale);
        }
      }
    }
    if (st.min_sibling < kSeparationLow || st.max_sibling > kSeparationHigh || st.max_gap > kSeparationHigh) {
      bad << " j=" << j << " (min " << st.min_sibling << ", max " << st.max_sibling << ", gap " << st.max_gap << ")";
    }
    fam.stats.push_back(st);
  }
  if (!bad.str().empty()) {
    fail(ErrorCode::invariant, "Sigma_" + std::to_string(spec.N) + " separation outside [0.3, 3] (N-j)^-1/2 at" +
                                   bad.str());
  }
  return fam;
}

// ---------------------------------------------------------------------------

namespace {

// Sum over sigma of -log rho(z, phi_w(sigma)) maximised over the closed disk of
// pseudo-hyperbolic radius R = 1 - v about the real point c = 1 - rc. All
// quantities near 1 are carried as their distance to 1:
// phi_w(c) = e with 1 - e = r (2 - rc) / D, 1 + e = rc (2 - r) / D,
// D = r + rc - r rc.
double region_bound(const ZeroSequence& sigma, double r, double rc, double v) {
  const double D = r + rc - r * rc;
  const double one_minus_e = r * (2.0 - rc) / D;
  const double one_plus_e = rc * (2.0 - r) / D;
  double total = 0.0;
  for (const auto& z : sigma.entries()) {
    const Complex s = z.z;
    const Complex den = (1.0 - s) + one_minus_e * s;  // 1 - e s
    const double one_minus_rho2 = one_minus_e * one_plus_e * (1.0 - std::norm(s)) / std::norm(den);
    const double rho = std::sqrt(std::max(0.0, 1.0 - one_minus_rho2));
    const double u = one_minus_rho2 / (1.0 + rho);  // 1 - rho
    if (u >= v) return kInf;  // a zero reaches the region
    total += z.multiplicity * -std::log1p(-u * (2.0 - v) / (u + v - u * v));
  }
  return total;
}

Complex phi_real(double r, Complex s) {
  // (w - s) / (1 - w s) with w = 1 - r
  return ((1.0 - s) - r) / ((1.0 - s) + r * s);
}

}  // namespace

Prop3Spec prop3_default(int k_max) {
  if (k_max < 1) fail(ErrorCode::invalid_argument, "k_max must be at least 1");
  Prop3Spec s;
  for (int k = 1; k <= k_max; ++k) s.N_list.push_back(k);
  return s;
}

Prop3Product prop3_product(const Prop3Spec& spec) {
  if (spec.N_list.empty()) fail(ErrorCode::invalid_argument, "N_list is empty");
  for (std::size_t i = 0; i < spec.N_list.size(); ++i) {
    if (i > 0 && spec.N_list[i] <= spec.N_list[i - 1]) fail(ErrorCode::invalid_argument, "N_list must increase");
  }
  if (!(spec.r_start > 0.0 && spec.r_start <= 0.5) || !(spec.r_floor > 0.0)) {
    fail(ErrorCode::invalid_argument, "need 0 < r_floor and 0 < r_start <= 1/2");
  }
  Prop3Product out;
  std::vector<ZeroSequence> sigmas;
  std::vector<InnerExpr> factors;
  for (std::size_t i = 0; i < spec.N_list.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    Prop3Factor F;
    F.k = k;
    F.N = spec.N_list[i];
    const ZeroSequence sigma = sigma_family({F.N}).zeros;
    F.zero_count = sigma.size();
    if (k == 1) {
      F.w = 0.0;
      F.r = 1.0;
    } else {
      const double budget = std::ldexp(1.0, -k - 1);
      double r = std::min(spec.r_start, 0.5 * out.factors.back().r);
      for (;;) {
        double worst = 0.0;
        for (const auto& P : out.factors) {
          worst = std::max(worst, region_bound(sigma, r, P.r, std::ldexp(1.0, -(P.N + 1))));
          if (2.0 * P.r < 1.0) worst = std::max(worst, region_bound(sigma, r, 1.0, 2.0 * P.r));
        }
        if (worst <= budget) {
          F.worst_bound = worst;
          break;
        }
        r *= 0.5;
        ++F.halvings;
        if (r < spec.r_floor) {
          fail(ErrorCode::budget, "no w_" + std::to_string(k) + " with 1 - w >= " + std::to_string(spec.r_floor) +
                                      " meets the tail budget");
        }
      }
      F.r = r;
      F.w = 1.0 - r;
    }
    for (const auto& e : sigma.entries()) out.zeros.add(k == 1 ? e.z : phi_real(F.r, e.z), e.multiplicity);
    factors.push_back(k == 1 ? InnerExpr::blaschke(sigma) : InnerExpr::precompose(F.w, InnerExpr::blaschke(sigma)));
    out.partials.push_back(factors.size() == 1 ? factors.front() : InnerExpr::product(factors));
    out.factors.push_back(F);
  }
  out.expr = out.partials.back();
  return out;
}

GridSpec prop3_grid_spec(const Prop3Product& p, GridSpec base) {
  base.charts = {Complex(0.0, 0.0)};
  for (const auto& f : p.factors) {
    if (f.w != 0.0) base.charts.emplace_back(f.w, 0.0);
  }
  return base;
}

SampleGrid prop3_grid(const Prop3Product& p, GridSpec base) { return make_grid(prop3_grid_spec(p, base)); }

PsiProfile psi_profile(const InnerExpr& f, const ZeroIndex& zeros, const SampleGrid& grid,
                       const std::vector<double>& bins, int threads) {
  if (bins.empty() || !std::is_sorted(bins.begin(), bins.end()) || bins.front() <= 0.0) {
    fail(ErrorCode::invalid_argument, "bins must be positive and increasing");
  }
  PsiProfile out;
  out.x = bins;
  out.min_b.assign(bins.size(), kInf);
  for (const auto& s : sample_points(f, zeros, grid.points, threads)) {
    const auto it = std::upper_bound(bins.begin(), bins.end(), s.rho);
    if (it == bins.begin()) continue;
    double& m = out.min_b[static_cast<std::size_t>(it - bins.begin() - 1)];
    m = std::min(m, std::exp(s.log_modulus));
  }
  std::vector<double> t, y;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (out.min_b[i] == kInf) {
      out.min_b[i] = 0.0;
      continue;
    }
    if (out.min_b[i] <= 0.0) continue;
    t.push_back(std::pow(bins[i], -4.0));
    y.push_back(std::log(out.min_b[i] / bins[i]));
  }
  if (t.size() >= 2) {
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      mt += t[i];
      my += y[i];
    }
    mt /= t.size();
    my /= t.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      num += (t[i] - mt) * (y[i] - my);
      den += (t[i] - mt) * (t[i] - mt);
    }
    if (den > 0.0) out.c = std::max(0.0, -num / den);
  }
  if (!t.empty()) {
    double lo = kInf;
    for (std::size_t i = 0; i < t.size(); ++i) lo = std::min(lo, y[i] + out.c * t[i]);
    out.c1 = std::exp(lo);
  }
  return out;
}

// ---------------------------------------------------------------------------

Thm1Block thm1_block(int k) {
  if (k < 1 || k > kThm1MaxK) {
    fail(ErrorCode::invalid_argument, "block k must lie in [1, " + std::to_string(kThm1MaxK) +
                                          "]; k = 5 would materialize 2^20 atoms");
  }
  Thm1Block b;
  b.k = k;
  b.eps = std::ldexp(1.0, -k * k);
  b.n = std::uint64_t{1} << (k * k - k);
  b.N = static_cast<std::uint64_t>(k) << (k * k);
  return b;
}

AtomicMeasure thm1_block_measure(int k) {
  const Thm1Block b = thm1_block(k);
  AtomicMeasure mu;
  for (std::uint64_t m = 1; m <= b.n; ++m) mu.add(kTwoPi * static_cast<double>(m) / static_cast<double>(b.N), b.eps);
  return mu;
}

AtomicMeasure thm1_measure(int k_max) {
  if (k_max < 1 || k_max > kThm1MaxK) {
    fail(ErrorCode::invalid_argument, "k_max must lie in [1, " + std::to_string(kThm1MaxK) +
                                          "]; k = 5 would materialize 2^20 atoms");
  }
  AtomicMeasure mu;
  for (int k = 1; k <= k_max; ++k) {
    const AtomicMeasure block = thm1_block_measure(k);
    for (const auto& a : block.atoms()) mu.add(a.position, a.mass);
  }
  return mu;
}

Thm1RegionBound thm1_region_bound(int k, int samples) {
  if (samples < 1) fail(ErrorCode::invalid_argument, "samples must be positive");
  const Thm1Block b = thm1_block(k);
  const double n = static_cast<double>(b.n), N = static_cast<double>(b.N);
  Thm1RegionBound out;
  out.k = k;
  out.samples = samples;
  out.sector = {1.0 - n / N, 1.0 - 1.0 / N, 0.0, kTwoPi * n / N};
  out.empty = b.n == 1;
  out.area = weighted_area(out.sector);
  out.upper = kTwoPi * n / N * std::log(n);
  out.lower = (1.0 - n / N) * out.upper;
  if (out.empty) return out;
  const AtomicMeasure mu = thm1_block_measure(k);
  double best = kInf;
  const double l0 = std::log(1.0 / N), l1 = std::log(n / N);
  // nested grid over the closed sector, so the corners are always sampled
  for (int a = 0; a <= samples; ++a) {
    const double r = 1.0 - std::exp(l0 + (l1 - l0) * a / samples);
    for (int c = 0; c <= samples; ++c) {
      const Complex z = std::polar(r, out.sector.theta1 * c / samples);
      best = std::min(best, poisson_integral(mu, z) / (b.eps * N));
    }
  }
  out.c_hat = best;
  return out;
}

// ---------------------------------------------------------------------------

E8Block e8_default_block(int j) {
  if (j < 1 || j > kE8MaxJ) fail(ErrorCode::invalid_argument, "j must lie in [1, " + std::to_string(kE8MaxJ) + "]");
  E8Block b;
  b.j = j;
  b.n = 1 << j;
  // ceil(n^{4/3}) as the least q with q^3 >= n^4, exact in integers
  const std::uint64_t n4 = std::uint64_t{1} << (4 * j);
  std::uint64_t q = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n4)));
  while (q > 0 && (q - 1) * (q - 1) * (q - 1) >= n4) --q;
  while (q * q * q < n4) ++q;
  b.N = static_cast<double>(q) * std::ldexp(1.0, 2 * b.n);
  return b;
}

std::vector<E8Block> e8_blocks(const E8MeasureSpec& spec) {
  std::vector<E8Block> blocks = spec.blocks;
  if (blocks.empty()) {
    if (spec.j_max < 1 || spec.j_max > kE8MaxJ) {
      fail(ErrorCode::invalid_argument, "j_max must lie in [1, " + std::to_string(kE8MaxJ) + "]");
    }
    for (int j = 1; j <= spec.j_max; ++j) blocks.push_back(e8_default_block(j));
  }
  double prev = -kInf;
  for (const auto& b : blocks) {
    if (b.n < 1 || b.n > 8) fail(ErrorCode::invalid_argument, "n_j must lie in [1, 8] (2^{2n} atoms per block)");
    const double atoms = std::ldexp(1.0, 2 * b.n);
    if (!(b.N > atoms)) fail(ErrorCode::invalid_argument, "schedule violates N_j > 2^{2 n_j}");
    const double growth = std::pow(b.n, 5.0 / 3.0) * atoms / b.N;
    if (!(growth > prev)) fail(ErrorCode::invalid_argument, "n_j^{5/3} 2^{2 n_j} / N_j must increase strictly");
    prev = growth;
  }
  return blocks;
}

AtomicMeasure e8_block_measure(const E8Block& b) {
  const std::uint64_t side = std::uint64_t{1} << b.n;
  if (side * side > kE8MaxAtoms) fail(ErrorCode::invalid_argument, "block exceeds the atom limit");
  const double stride = std::cbrt(static_cast<double>(b.n) * b.n) * static_cast<double>(side);  // n^{2/3} 2^n
  const double mass = std::cbrt(static_cast<double>(b.n)) / b.N;
  AtomicMeasure mu(BoundaryModel::halfplane);
  for (std::uint64_t s = 0; s < side; ++s) {
    for (std::uint64_t m = 0; m < side; ++m) mu.add((static_cast<double>(s) * stride + static_cast<double>(m)) / b.N, mass);
  }
  return mu;
}

AtomicMeasure e8_measure(const E8MeasureSpec& spec) {
  AtomicMeasure mu(BoundaryModel::halfplane);
  for (const auto& b : e8_blocks(spec)) {
    const AtomicMeasure block = e8_block_measure(b);
    for (const auto& a : block.atoms()) mu.add(a.position, a.mass);
  }
  return mu;
}

namespace {

double omega_min(const AtomicMeasure& mu, const E8Block& b, int q, int threads) {
  const double side = std::ldexp(1.0, b.n);
  const double stride = std::cbrt(static_cast<double>(b.n) * b.n) * side;
  const double scale = std::cbrt(static_cast<double>(b.n));
  const std::size_t boxes = static_cast<std::size_t>(side);
  std::vector<double> mins(boxes, kInf);
  detail::parallel_for(boxes, threads, [&](std::size_t s) {
    const double x0 = static_cast<double>(s) * stride / b.N;
    const double x1 = (static_cast<double>(s) * stride + side) / b.N;
    for (int a = 0; a <= q; ++a) {
      const double y = std::exp(std::log(1.0 / b.N) + std::log(side) * a / q);  // 1/N .. 2^n/N
      for (int c = 0; c <= q; ++c) {
        const Complex h(x0 + (x1 - x0) * c / q, y);
        mins[s] = std::min(mins[s], poisson_integral(mu, h) / scale);
      }
    }
  });
  return *std::min_element(mins.begin(), mins.end());
}

}  // namespace

E8Report e8_verify(int j, const E8VerifyOptions& options) { return e8_verify(e8_default_block(j), options); }

E8Report e8_verify(const E8Block& block, const E8VerifyOptions& options) {
  if (options.samples < 1) fail(ErrorCode::invalid_argument, "samples must be positive");
  if (!(options.delta > 0.0)) fail(ErrorCode::invalid_argument, "delta must be positive");
  e8_blocks({1, {block}});
  const AtomicMeasure mu = e8_block_measure(block);
  E8Report out;
  out.block = block;
  out.min_u_ratio = omega_min(mu, block, options.samples, options.threads);
  out.min_u_ratio_fine = omega_min(mu, block, 2 * options.samples, options.threads);

  const double n = block.n, N = block.N;
  const double n23 = std::cbrt(n * n);
  const double side = std::ldexp(1.0, block.n);
  out.E = {0.0, n23 * side * side / N, n23 * side / N, n23 * side * side / N};
  out.area_E = weighted_area(out.E);
  out.area_E_closed = std::pow(n, 5.0 / 3.0) * side * side * std::log(2.0) / N;

  out.depth = static_cast<int>(std::ceil(std::log2(N))) + options.extra_depth;
  if (!options.level_cover) return out;
  CoverOptions co;
  co.threads = options.threads;
  co.max_subdivision = options.max_subdivision;
  const RegionCover cover = level_set_cover_halfplane(mu, std::exp(-options.delta), out.depth, co);
  const AreaResult a = weighted_area(cover);
  out.level_area = a.value;
  out.level_area_error = a.error_bound;
  out.level_ratio = a.value * N / (n * side * side);
  return out;
}

}  // namespace cninner
