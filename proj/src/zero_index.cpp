#include "cninner/zero_index.hpp"

#include <algorithm>
#include <cmath>

namespace cninner {

namespace {

// For any w with |z - w| >= d:
//   |1 - conj(z) w| = |(1 - |z|^2) + conj(z)(z - w)| <= (1 - |z|^2) + |z - w|,
// and t -> t / (t + 1 - |z|^2) is increasing, hence
//   rho(z, w) >= d / (d + 1 - |z|^2).
// The factor shaves a few ulps so rounding can never prune the true minimiser.
double rho_lower_bound(double d, double one_minus_r2) { return d / (d + one_minus_r2) * (1.0 - 1e-12); }

double level_radial_gap(double r, const CellBounds& b) {
  if (r < b.r0) return b.r0 - r;
  if (r > b.r1) return r - b.r1;
  return 0.0;
}

}  // namespace

ZeroIndex::ZeroIndex(ZeroSequence zeros, int max_level)
    : zeros_(std::move(zeros)), max_level_(max_level), levels_(static_cast<std::size_t>(max_level) + 2) {
  if (max_level < 1 || max_level > 60) fail(ErrorCode::invalid_argument, "max level must lie in [1, 60]");
  const double floor_gap = std::ldexp(1.0, -max_level);
  for (std::size_t i = 0; i < zeros_.size(); ++i) {
    const DiscPoint p(zeros_[i].z);
    if (1.0 - p.abs() < floor_gap) {
      fail(ErrorCode::domain, "zero closer to the boundary than 2^-" + std::to_string(max_level));
    }
    const WhitneyIndex cell = whitney_cell(p);
    buckets_[cell].push_back(i);
    levels_[static_cast<std::size_t>(cell.j)][cell.k].push_back(i);
  }
}

template <class Visit>
void ZeroIndex::scan(Complex z, double& bound, Visit&& visit) const {
  // bound is a rho threshold: cells whose lower bound is >= bound are skipped.
  // visit(id) may shrink it.
  const double r = std::abs(z);
  const double one_minus_r2 = (1.0 - r) * (1.0 + r);

  // Levels ordered by the radial part of the lower bound, nearest annulus first.
  std::vector<std::pair<double, int>> order;
  for (int j = 0; j <= max_level_ + 1; ++j) {
    if (levels_[static_cast<std::size_t>(j)].empty()) continue;
    const CellBounds b = whitney_bounds({j, 1});
    order.emplace_back(rho_lower_bound(level_radial_gap(r, b), one_minus_r2), j);
  }
  std::sort(order.begin(), order.end());

  for (const auto& [level_lb, j] : order) {
    if (level_lb >= bound) break;
    const auto& slots = levels_[static_cast<std::size_t>(j)];
    if (j == 0) {
      for (std::size_t id : slots.begin()->second) visit(id);
      continue;
    }
    // Walk outward from the query's angular slot in both directions; the
    // distance to a sector grows with the angular gap, so each walk stops at
    // the first cell that cannot beat the bound.
    const std::uint64_t nslots = std::uint64_t{1} << j;
    const double theta = raw::arg0(z);
    auto home = static_cast<std::uint64_t>(std::floor(theta / kTwoPi * static_cast<double>(nslots))) + 1;
    home = std::clamp<std::uint64_t>(home, 1, nslots);

    auto cell_lb = [&](std::uint64_t k) {
      return rho_lower_bound(distance_to_sector(z, whitney_bounds({j, k})), one_minus_r2);
    };
    // Forward offsets 0..h and backward offsets 1..h-1 partition the ring.
    // Along each direction the angular gap to z is non-decreasing, so a walk
    // can stop at the first cell whose bound fails.
    const std::uint64_t h = nslots / 2;
    const std::size_t n = slots.size();
    const auto start = slots.lower_bound(home);

    auto f = start == slots.end() ? slots.begin() : start;
    for (std::size_t step = 0; step < n; ++step) {
      const std::uint64_t off = (f->first + nslots - home) % nslots;
      if (off > h || cell_lb(f->first) >= bound) break;
      for (std::size_t id : f->second) visit(id);
      if (++f == slots.end()) f = slots.begin();
    }

    auto b = start == slots.begin() ? slots.end() : start;
    for (std::size_t step = 0; step < n; ++step) {
      --b;
      const std::uint64_t off = (home + nslots - b->first) % nslots;
      if (off == 0 || off >= h || cell_lb(b->first) >= bound) break;
      for (std::size_t id : b->second) visit(id);
      if (b == slots.begin()) b = slots.end();
    }
  }
}

std::optional<NearestZero> ZeroIndex::nearest(Complex z) const {
  if (zeros_.empty()) return std::nullopt;
  NearestZero best{2.0, 0};
  double bound = 2.0;
  scan(z, bound, [&](std::size_t id) {
    const double d = raw::rho(z, zeros_[id].z);
    if (d < best.rho || (d == best.rho && id < best.id)) {
      best = {d, id};
      bound = d;
    }
  });
  return best;
}

double ZeroIndex::distance(Complex z) const {
  const auto n = nearest(z);
  return n ? n->rho : 1.0;
}

std::vector<std::size_t> ZeroIndex::within(Complex z, double radius) const {
  std::vector<std::size_t> out;
  double bound = radius;
  scan(z, bound, [&](std::size_t id) {
    if (raw::rho(z, zeros_[id].z) < radius) out.push_back(id);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cninner
