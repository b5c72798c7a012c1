#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "cninner/geometry.hpp"
#include "cninner/zero_sequence.hpp"

namespace cninner {

struct NearestZero {
  double rho;
  std::size_t id;  // index into ZeroIndex::zeros()
};

/// Bucketed spatial index over the Whitney cells. Read-only after
/// construction, so concurrent queries are safe.
class ZeroIndex {
 public:
  explicit ZeroIndex(ZeroSequence zeros, int max_level = kDefaultMaxLevel);

  const ZeroSequence& zeros() const noexcept { return zeros_; }
  int max_level() const noexcept { return max_level_; }
  bool empty() const noexcept { return zeros_.empty(); }

  /// Exact nearest zero in the pseudo-hyperbolic metric; nullopt when empty.
  std::optional<NearestZero> nearest(Complex z) const;
  std::optional<NearestZero> nearest(DiscPoint z) const { return nearest(z.value()); }

  /// rho(z, Z), with the convention rho = 1 for an empty index.
  double distance(Complex z) const;

  /// Ids of all zeros w with rho(z, w) < radius, sorted ascending.
  std::vector<std::size_t> within(Complex z, double radius) const;

  /// Bucket contents keyed by cell.
  const std::map<WhitneyIndex, std::vector<std::size_t>>& buckets() const noexcept { return buckets_; }

 private:
  template <class Visit>
  void scan(Complex z, double& bound, Visit&& visit) const;

  ZeroSequence zeros_;
  int max_level_;
  std::map<WhitneyIndex, std::vector<std::size_t>> buckets_;
  // levels_[j] maps slot k -> ids, only for nonempty cells; a zero with
  // 1 - |z| >= 2^-J sits at level J + 1 at most
  std::vector<std::map<std::uint64_t, std::vector<std::size_t>>> levels_;
};

}  // namespace cninner
