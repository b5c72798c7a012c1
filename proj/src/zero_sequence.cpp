#include "cninner/zero_sequence.hpp"

#include <cmath>

namespace cninner {

ZeroSequence::ZeroSequence(std::vector<ZeroEntry> entries) {
  entries_.reserve(entries.size());
  for (const auto& e : entries) add(e.z, e.multiplicity);
}

void ZeroSequence::add(Complex z, int multiplicity) {
  DiscPoint checked(z);
  if (multiplicity < 1) fail(ErrorCode::invalid_argument, "zero multiplicity must be positive");
  entries_.push_back({checked.value(), multiplicity});
  degree_ += static_cast<std::size_t>(multiplicity);
  blaschke_sum_ += multiplicity * (1.0 - checked.abs());
}

void ZeroSequence::append(const ZeroSequence& other) {
  for (const auto& e : other.entries()) add(e.z, e.multiplicity);
}

RadialDyadicZeros::RadialDyadicZeros(double scale, Complex direction) : scale_(scale), direction_(direction) {
  if (!(scale > 0.0 && scale < 2.0)) fail(ErrorCode::invalid_argument, "radial scale must lie in (0,2)");
  if (std::abs(std::abs(direction) - 1.0) > 1e-12) fail(ErrorCode::invalid_argument, "direction must be unimodular");
}

ZeroEntry RadialDyadicZeros::at(std::size_t index) const {
  const double d = scale_ * std::ldexp(1.0, -static_cast<int>(index) - 1);
  return {direction_ * (1.0 - d), 1};
}

std::optional<double> RadialDyadicZeros::tail_majorant(std::size_t index) const {
  // sum_{i >= index} scale 2^{-(i+1)} = scale 2^{-index}
  return scale_ * std::ldexp(1.0, -static_cast<int>(index));
}

FiniteZeros::FiniteZeros(ZeroSequence zeros) : zeros_(std::move(zeros)), suffix_(zeros_.size() + 1, 0.0) {
  for (std::size_t i = zeros_.size(); i-- > 0;) {
    suffix_[i] = suffix_[i + 1] + zeros_[i].multiplicity * (1.0 - std::abs(zeros_[i].z));
  }
}

std::optional<double> FiniteZeros::tail_majorant(std::size_t index) const {
  return index >= zeros_.size() ? 0.0 : suffix_[index];
}

}  // namespace cninner
