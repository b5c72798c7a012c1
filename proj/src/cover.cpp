#include "cninner/cover.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "parallel.hpp"

namespace cninner {

Complex box_center(const PolarBox& b) {
  const double s = 0.5 * (std::atanh(b.r0) + std::atanh(b.r1));
  return std::polar(std::tanh(s), 0.5 * (b.theta0 + b.theta1));
}

namespace {

double radial_term(const PolarBox& b) { return 0.5 * (std::atanh(b.r1) - std::atanh(b.r0)); }
double angular_term(const PolarBox& b) { return b.r1 * 0.5 * (b.theta1 - b.theta0) / (1.0 - b.r1 * b.r1); }
double vertical_term(const HalfPlaneBox& b) { return 0.25 * std::log(b.y1 / b.y0); }
double horizontal_term(const HalfPlaneBox& b) { return 0.25 * (b.x1 - b.x0) / b.y0; }

}  // namespace

double box_rho_radius(const PolarBox& b) { return std::tanh(radial_term(b) + angular_term(b)); }

Complex box_center(const HalfPlaneBox& b) { return {0.5 * (b.x0 + b.x1), std::sqrt(b.y0 * b.y1)}; }

double box_rho_radius(const HalfPlaneBox& b) { return std::tanh(vertical_term(b) + horizontal_term(b)); }

double schwarz_pick_lower(double s, double h) noexcept { return s <= h ? 0.0 : (s - h) / (1.0 - s * h); }

double schwarz_pick_upper(double s, double h) noexcept { return std::min(1.0, (s + h) / (1.0 + s * h)); }

namespace {

CellStatus classify(double s, double h, double eps) {
  if (schwarz_pick_upper(s, h) < eps) return CellStatus::inside;
  if (schwarz_pick_lower(s, h) >= eps) return CellStatus::outside;
  return CellStatus::boundary;
}

// Bisects along whichever coordinate dominates the radius bound. `cuts`
// counts binary cuts, so 2 * max_subdivision of them match max_subdivision
// rounds of quartering.
struct DiscRefiner {
  const InnerExpr& f;
  double eps;
  int max_cuts;
  int level;
  std::vector<CoverCell>& out;
  std::size_t& evals;

  void run(const PolarBox& b, int cuts) {
    const double s = eval_modulus(f, box_center(b));
    ++evals;
    const CellStatus st = classify(s, box_rho_radius(b), eps);
    if (st == CellStatus::outside) return;
    if (st == CellStatus::inside || cuts >= max_cuts) {
      out.push_back({b.r0, b.r1, b.theta0, b.theta1, st, level});
      return;
    }
    if (radial_term(b) >= angular_term(b)) {
      const double rm = std::tanh(0.5 * (std::atanh(b.r0) + std::atanh(b.r1)));
      run({b.r0, rm, b.theta0, b.theta1}, cuts + 1);
      run({rm, b.r1, b.theta0, b.theta1}, cuts + 1);
    } else {
      const double tm = 0.5 * (b.theta0 + b.theta1);
      run({b.r0, b.r1, b.theta0, tm}, cuts + 1);
      run({b.r0, b.r1, tm, b.theta1}, cuts + 1);
    }
  }
};

}  // namespace

RegionCover level_set_cover(const InnerExpr& f, double eps, int depth, const CoverOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::invalid_argument, "eps must lie in (0, 1)");
  if (depth < 1 || depth > 30) fail(ErrorCode::invalid_argument, "cover depth must lie in [1, 30]");
  if (options.max_subdivision < 0) fail(ErrorCode::invalid_argument, "max_subdivision must be non-negative");
  std::vector<WhitneyIndex> roots;
  for (int j = 1; j <= depth; ++j) {
    for (std::uint64_t k = 1; k <= (std::uint64_t{1} << j); ++k) roots.push_back({j, k});
  }
  std::vector<std::vector<CoverCell>> parts(roots.size());
  std::vector<std::size_t> evals(roots.size(), 0);
  detail::parallel_for(roots.size(), options.threads, [&](std::size_t i) {
    const CellBounds cb = whitney_bounds(roots[i]);
    DiscRefiner r{f, eps, 2 * options.max_subdivision, roots[i].j, parts[i], evals[i]};
    r.run({cb.r0, cb.r1, cb.theta0, cb.theta1}, 0);
  });
  RegionCover cover;
  cover.model = BoundaryModel::disc;
  cover.eps = eps;
  cover.depth = depth;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    cover.cells.insert(cover.cells.end(), parts[i].begin(), parts[i].end());
    cover.evaluations += evals[i];
  }
  return cover;
}

namespace {

// sup of y / (d^2 + y^2) over y in [ylo, yhi].
double kernel_sup(double d, double ylo, double yhi) {
  if (d <= ylo) return ylo / (d * d + ylo * ylo);
  if (d >= yhi) return yhi / (d * d + yhi * yhi);
  return 0.5 / d;
}

struct HalfPlaneRefiner {
  const AtomicMeasure& mu;
  double threshold;  // log(1/eps)
  double eps;
  double ymin;
  int max_cuts;
  int top;  // strip exponent of the root boxes
  int depth;
  std::vector<CoverCell>& out;
  std::size_t& evals;
  std::size_t& pruned;

  void decide(const HalfPlaneBox& b, int level, int cuts) {
    const double s = std::exp(-poisson_integral(mu, box_center(b)));
    ++evals;
    const CellStatus st = classify(s, box_rho_radius(b), eps);
    if (st == CellStatus::outside) return;
    if (st == CellStatus::inside || cuts >= max_cuts) {
      out.push_back({b.x0, b.x1, b.y0, b.y1, st, level});
      return;
    }
    if (vertical_term(b) >= horizontal_term(b)) {
      const double ym = std::sqrt(b.y0 * b.y1);
      decide({b.x0, b.x1, b.y0, ym}, level, cuts + 1);
      decide({b.x0, b.x1, ym, b.y1}, level, cuts + 1);
    } else {
      const double xm = 0.5 * (b.x0 + b.x1);
      decide({b.x0, xm, b.y0, b.y1}, level, cuts + 1);
      decide({xm, b.x1, b.y0, b.y1}, level, cuts + 1);
    }
  }

  // Box [x0, x0 + w] x [w, 2w] with w = 2^-e, then its two children below.
  void tree(double x0, int e) {
    const double w = std::ldexp(1.0, -e);
    double bound = 0.0;
    for (const auto& a : mu.atoms()) {
      const double d = a.position < x0 ? x0 - a.position : std::max(0.0, a.position - (x0 + w));
      bound += a.mass * kernel_sup(d, ymin, 2.0 * w);
    }
    if (bound <= threshold) {
      ++pruned;
      return;
    }
    decide({x0, x0 + w, w, 2.0 * w}, e - top, 0);
    if (e < depth) {
      tree(x0, e + 1);
      tree(x0 + 0.5 * w, e + 1);
    }
  }
};

}  // namespace

RegionCover level_set_cover_halfplane(const AtomicMeasure& mu, double eps, int depth, const CoverOptions& options) {
  if (mu.model() != BoundaryModel::halfplane) fail(ErrorCode::invalid_argument, "measure is not a half-plane measure");
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::invalid_argument, "eps must lie in (0, 1)");
  if (depth < 1 || depth > 40) fail(ErrorCode::invalid_argument, "cover depth must lie in [1, 40]");
  RegionCover cover;
  cover.model = BoundaryModel::halfplane;
  cover.eps = eps;
  cover.depth = depth;
  const double L = std::log(1.0 / eps);
  const double M = mu.total_mass();
  if (M <= 0.0 || mu.atoms().empty()) return cover;

  // (P * mu)(x + iy) <= M / y and <= M / (2 dist(x, supp mu)), so the level
  // set sits below y = M / L and within M / (2L) of the atoms.
  double xmin = mu.atoms().front().position, xmax = xmin;
  for (const auto& a : mu.atoms()) {
    xmin = std::min(xmin, a.position);
    xmax = std::max(xmax, a.position);
  }
  const double reach = M / (2.0 * L);
  const int top = -static_cast<int>(std::ceil(std::log2(M / L))) + 1;  // 2 * 2^-top >= M / L
  if (top > depth) return cover;
  cover.first_level = top;
  const double w = std::ldexp(1.0, -top);
  std::vector<double> starts;
  for (double x = std::floor((xmin - reach) / w) * w; x < xmax + reach; x += w) starts.push_back(x);

  std::vector<std::vector<CoverCell>> parts(starts.size());
  std::vector<std::size_t> evals(starts.size(), 0), pruned(starts.size(), 0);
  detail::parallel_for(starts.size(), options.threads, [&](std::size_t i) {
    HalfPlaneRefiner r{mu, L, eps, std::ldexp(1.0, -depth), 2 * options.max_subdivision, top, depth,
                       parts[i], evals[i], pruned[i]};
    r.tree(starts[i], top);
  });
  for (std::size_t i = 0; i < starts.size(); ++i) {
    cover.cells.insert(cover.cells.end(), parts[i].begin(), parts[i].end());
    cover.evaluations += evals[i];
    cover.pruned_columns += pruned[i];
  }
  return cover;
}

double weighted_area(const PolarBox& b) {
  if (b.r1 <= b.r0 || b.theta1 <= b.theta0) return 0.0;
  // integral of r dr / (1 - r) = -log(1 - r) - r
  return (b.theta1 - b.theta0) * (std::log1p(-b.r0) - std::log1p(-b.r1) - (b.r1 - b.r0));
}

double weighted_area(const HalfPlaneBox& b) {
  if (b.x1 <= b.x0 || b.y1 <= b.y0) return 0.0;
  return (b.x1 - b.x0) * std::log(b.y1 / b.y0);
}

namespace {

double cell_area(BoundaryModel model, const CoverCell& c) {
  return model == BoundaryModel::disc ? weighted_area(PolarBox{c.a0, c.a1, c.b0, c.b1})
                                      : weighted_area(HalfPlaneBox{c.a0, c.a1, c.b0, c.b1});
}

}  // namespace

AreaResult weighted_area(const RegionCover& cover) {
  AreaResult out;
  int top = 0;
  for (const auto& c : cover.cells) top = std::max(top, c.level);
  out.per_level.assign(static_cast<std::size_t>(top) + 1, 0.0);
  for (const auto& c : cover.cells) {
    const double a = cell_area(cover.model, c);
    if (c.status == CellStatus::inside) {
      out.value += a;
      out.per_level[static_cast<std::size_t>(c.level)] += a;
    } else {
      out.error_bound += a;
    }
  }
  double run = 0.0;
  for (double v : out.per_level) out.partial_sums.push_back(run += v);
  return out;
}

double weighted_area_within(const RegionCover& cover, const PolarBox& clip) {
  if (cover.model != BoundaryModel::disc) fail(ErrorCode::invalid_argument, "polar clipping needs a disc cover");
  double total = 0.0;
  for (const auto& c : cover.cells) {
    if (c.status != CellStatus::inside) continue;
    total += weighted_area(PolarBox{std::max(c.a0, clip.r0), std::min(c.a1, clip.r1), std::max(c.b0, clip.theta0),
                                    std::min(c.b1, clip.theta1)});
  }
  return total;
}

AreaResult weighted_area(const HyperbolicDisk& d) {
  // Polar coordinates about the Euclidean centre: the angular integrand is
  // smooth and periodic, so the trapezoid rule converges geometrically; the
  // radial one goes to tanh-sinh.
  const Complex c = d.euclidean_center();
  const double R = d.euclidean_radius();
  boost::math::quadrature::tanh_sinh<double> ts;
  auto ring = [&](double phi, double& err) {
    const Complex u = std::polar(1.0, phi);
    double e = 0.0;
    const double v = ts.integrate([&](double s) { return s / (1.0 - std::abs(c + s * u)); }, 0.0, R, 1e-12, &e);
    err += e;
    return v;
  };
  auto trapezoid = [&](int n, double& err) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += ring(kTwoPi * i / n, err);
    return sum * kTwoPi / n;
  };
  double e_coarse = 0.0, e_fine = 0.0;
  const double coarse = trapezoid(128, e_coarse);
  const double fine = trapezoid(256, e_fine);
  AreaResult out;
  out.value = fine;
  out.error_bound = std::abs(fine - coarse) + e_fine * kTwoPi / 256;
  return out;
}

std::string classify_trend(const std::vector<double>& per_level, double q) {
  double total = 0.0;
  for (double v : per_level) total += v;
  if (total == 0.0) return "bounded";
  const std::size_t n = per_level.size();
  if (n < 4) return "indeterminate";
  bool growing = true;
  double before = 0.0;
  for (std::size_t i = 0; i < n - 3; ++i) before += per_level[i];
  double last3 = 0.0;
  for (std::size_t i = n - 3; i < n; ++i) {
    if (!(per_level[i] > 0.0 && per_level[i] >= q * before)) growing = false;
    before += per_level[i];
    last3 += per_level[i];
  }
  if (growing) return "growing";
  if (last3 <= q * total) return "bounded";
  return "indeterminate";
}

std::vector<ConditionAEntry> condition_A_report(const InnerExpr& f, const std::vector<double>& eps_list, int depth,
                                                double q, const CoverOptions& options) {
  std::vector<ConditionAEntry> out;
  for (double eps : eps_list) {
    const RegionCover cover = level_set_cover(f, eps, depth, options);
    ConditionAEntry e{eps, depth, weighted_area(cover), "", cover.cells.size()};
    // Pad to the full depth so empty outer annuli count as zero contributions.
    e.area.per_level.resize(static_cast<std::size_t>(depth) + 1, 0.0);
    e.area.partial_sums.resize(e.area.per_level.size(), e.area.value);
    e.trend = classify_trend(e.area.per_level, q);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConditionAEntry> condition_A_report(const AtomicMeasure& halfplane_mu, const std::vector<double>& eps_list,
                                                int depth, double q, const CoverOptions& options) {
  std::vector<ConditionAEntry> out;
  for (double eps : eps_list) {
    const RegionCover cover = level_set_cover_halfplane(halfplane_mu, eps, depth, options);
    ConditionAEntry e{eps, depth, weighted_area(cover), "", cover.cells.size()};
    const int strips = depth - cover.first_level + 1;
    if (strips > 0) {
      e.area.per_level.resize(static_cast<std::size_t>(strips), 0.0);
      e.area.partial_sums.resize(e.area.per_level.size(), e.area.value);
    }
    e.trend = classify_trend(e.area.per_level, q);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace cninner
