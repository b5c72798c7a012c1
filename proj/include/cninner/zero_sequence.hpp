#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "cninner/geometry.hpp"

namespace cninner {

struct ZeroEntry {
  Complex z;
  int multiplicity = 1;
};

/// Finite multiset of disc zeros with its Blaschke sum sum mult * (1 - |z|).
class ZeroSequence {
 public:
  ZeroSequence() = default;
  explicit ZeroSequence(std::vector<ZeroEntry> entries);

  void add(Complex z, int multiplicity = 1);
  void append(const ZeroSequence& other);

  const std::vector<ZeroEntry>& entries() const noexcept { return entries_; }
  const ZeroEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Number of zeros counted with multiplicity.
  std::size_t degree() const noexcept { return degree_; }
  double blaschke_sum() const noexcept { return blaschke_sum_; }

 private:
  std::vector<ZeroEntry> entries_;
  std::size_t degree_ = 0;
  double blaschke_sum_ = 0.0;
};

/// Source of a possibly infinite zero sequence. Generators must declare a
/// majorant for the tail of the Blaschke sum; nothing is assumed about
/// convergence otherwise.
class ZeroGenerator {
 public:
  virtual ~ZeroGenerator() = default;

  virtual ZeroEntry at(std::size_t index) const = 0;
  /// Number of entries, or nullopt for an infinite sequence.
  virtual std::optional<std::size_t> size() const = 0;
  /// Upper bound for sum_{i >= index} mult_i (1 - |z_i|); nullopt when the
  /// generator cannot certify its tail.
  virtual std::optional<double> tail_majorant(std::size_t index) const = 0;
};

/// z_i = 1 - scale * 2^{-(i+1)} (times a unimodular direction), i = 0, 1, ...
class RadialDyadicZeros final : public ZeroGenerator {
 public:
  explicit RadialDyadicZeros(double scale = 1.0, Complex direction = 1.0);

  ZeroEntry at(std::size_t index) const override;
  std::optional<std::size_t> size() const override { return std::nullopt; }
  std::optional<double> tail_majorant(std::size_t index) const override;

  double scale() const noexcept { return scale_; }
  Complex direction() const noexcept { return direction_; }

 private:
  double scale_;
  Complex direction_;
};

/// Wraps a finite sequence; its tail majorant is computed exactly.
class FiniteZeros final : public ZeroGenerator {
 public:
  explicit FiniteZeros(ZeroSequence zeros);

  ZeroEntry at(std::size_t index) const override { return zeros_[index]; }
  std::optional<std::size_t> size() const override { return zeros_.size(); }
  std::optional<double> tail_majorant(std::size_t index) const override;

  const ZeroSequence& zeros() const noexcept { return zeros_; }

 private:
  ZeroSequence zeros_;
  std::vector<double> suffix_;
};

}  // namespace cninner
