#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cninner/analysis.hpp"

namespace cninner {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Zeros (with multiplicity) inside the delta-disk around zero i.
std::size_t disk_count(const ZeroIndex& idx, std::size_t i, double delta) {
  std::size_t c = 0;
  for (std::size_t id : idx.within(idx.zeros()[i].z, delta)) c += static_cast<std::size_t>(idx.zeros()[id].multiplicity);
  return c;
}

}  // namespace

DecompositionResult decompose_interpolating(const ZeroSequence& zeros, int n, double A) {
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be at least 1");
  DecompositionResult out;
  out.n = n;
  out.A = A;
  out.subsets.assign(static_cast<std::size_t>(n), ZeroSequence{});
  out.subset_ids.assign(static_cast<std::size_t>(n), {});
  if (zeros.empty()) {
    out.delta = 0.5;
    out.carleson_constants.assign(static_cast<std::size_t>(n), 1.0);
    return out;
  }
  const ZeroIndex idx(zeros);
  const std::size_t limit = static_cast<std::size_t>(n);
  auto admissible = [&](int t) {
    const double delta = std::ldexp(1.0, -t);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      if (disk_count(idx, i, delta) > limit) return false;
    }
    return true;
  };

  // Largest admissible delta = 2^-t, t in [1, kMinDeltaExponent]; admissibility
  // is monotone in delta, so bisect on t.
  if (!admissible(kMinDeltaExponent)) {
    const double delta = std::ldexp(1.0, -kMinDeltaExponent);
    std::size_t worst = 0, worst_count = 0;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      const std::size_t c = disk_count(idx, i, delta);
      if (c > worst_count) {
        worst_count = c;
        worst = i;
      }
    }
    std::ostringstream os;
    os.precision(17);
    os << "input violates multiplicity bound: the disk of radius 2^-" << kMinDeltaExponent << " around ("
       << zeros[worst].z.real() << ", " << zeros[worst].z.imag() << ") holds " << worst_count << " zeros, more than n = "
       << n;
    throw MultiplicityError(os.str(), zeros[worst].z, delta, worst_count);
  }
  int lo = 0, hi = kMinDeltaExponent;  // lo inadmissible (or 1/1), hi admissible
  if (admissible(1)) {
    hi = 1;
  } else {
    lo = 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (admissible(mid) ? hi : lo) = mid;
    }
  }
  out.delta = std::ldexp(1.0, -hi);

  // Expand multiplicities into individual points.
  std::vector<Complex> pts;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    for (int m = 0; m < zeros[i].multiplicity; ++m) {
      pts.push_back(zeros[i].z);
      origin.push_back(i);
    }
  }
  UnionFind uf(pts.size());
  const double edge = out.delta / (2.0 * n);
  std::vector<std::size_t> first_copy(zeros.size());
  for (std::size_t p = pts.size(); p-- > 0;) first_copy[origin[p]] = p;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    uf.unite(p, first_copy[origin[p]]);
    for (std::size_t id : idx.within(pts[p], edge)) uf.unite(p, first_copy[id]);
  }

  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t p = 0; p < pts.size(); ++p) comps[uf.find(p)].push_back(p);
  out.components = comps.size();
  for (const auto& [root, members] : comps) {
    ++out.component_sizes[members.size()];
    if (members.size() > limit) {
      fail(ErrorCode::invariant, "component of size " + std::to_string(members.size()) + " exceeds n = " +
                                     std::to_string(n) + " at delta = " + std::to_string(out.delta));
    }
  }

  // Global round-robin in (|z|, arg z) order, skipping subsets the point's
  // component already uses.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = std::abs(pts[a]), rb = std::abs(pts[b]);
    if (ra != rb) return ra < rb;
    const double ta = raw::arg0(pts[a]), tb = raw::arg0(pts[b]);
    if (ta != tb) return ta < tb;
    return a < b;
  });
  std::map<std::size_t, std::vector<bool>> used;
  std::size_t next = 0;
  for (std::size_t p : order) {
    auto& u = used.try_emplace(uf.find(p), limit, false).first->second;
    std::size_t s = next % limit;
    while (u[s]) s = (s + 1) % limit;
    u[s] = true;
    out.subsets[s].add(pts[p]);
    out.subset_ids[s].push_back(p);
    next = s + 1;
  }
  for (const auto& sub : out.subsets) out.carleson_constants.push_back(carleson_condition(sub).delta);
  return out;
}

}  // namespace cninner
