#pragma once

#include <compare>
#include <complex>
#include <cstdint>

#include "cninner/error.hpp"

namespace cninner {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A point of the open unit disc. Construction checks |z| < 1.
class DiscPoint {
 public:
  constexpr DiscPoint() = default;
  DiscPoint(double re, double im) : DiscPoint(Complex(re, im)) {}
  explicit DiscPoint(Complex z);

  Complex value() const noexcept { return z_; }
  double re() const noexcept { return z_.real(); }
  double im() const noexcept { return z_.imag(); }
  double abs() const noexcept { return std::abs(z_); }

  friend bool operator==(const DiscPoint&, const DiscPoint&) = default;

 private:
  Complex z_{0.0, 0.0};
};

/// A point of the open upper half-plane. Construction checks y > 0.
class HalfPlanePoint {
 public:
  HalfPlanePoint(double x, double y) : HalfPlanePoint(Complex(x, y)) {}
  explicit HalfPlanePoint(Complex z);

  Complex value() const noexcept { return z_; }
  double x() const noexcept { return z_.real(); }
  double y() const noexcept { return z_.imag(); }

 private:
  Complex z_;
};

// Unchecked kernels shared by the hot loops. Callers guarantee the
// preconditions of the checked wrappers below.
namespace raw {

/// |z - w| / |1 - conj(z) w|
inline double rho(Complex z, Complex w) noexcept {
  return std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
}

/// (a - z) / (1 - z conj(a)); an involution of the disc swapping a and 0.
inline Complex mobius(Complex a, Complex z) noexcept { return (a - z) / (1.0 - z * std::conj(a)); }

/// |z - w| / |z - conj(w)| in the upper half-plane.
inline double rho_halfplane(Complex z, Complex w) noexcept {
  return std::abs(z - w) / std::abs(z - std::conj(w));
}

inline Complex cayley(Complex p) noexcept { return (p - Complex(0, 1)) / (p + Complex(0, 1)); }
inline Complex cayley_inv(Complex q) noexcept { return Complex(0, 1) * (1.0 + q) / (1.0 - q); }

/// Argument in [0, 2pi).
double arg0(Complex z) noexcept;

}  // namespace raw

double rho(DiscPoint z, DiscPoint w) noexcept;
DiscPoint mobius(DiscPoint a, DiscPoint z);
double rho_halfplane(HalfPlanePoint z, HalfPlanePoint w) noexcept;

DiscPoint cayley(HalfPlanePoint p);
HalfPlanePoint cayley_inv(DiscPoint q);

/// Dyadic annulus-sector cell. Level j covers 1 - 2^{1-j} <= |z| < 1 - 2^{-j}
/// (so j = 1 is the disc |z| < 1/2), slot k covers
/// 2pi (k-1) 2^{-j} <= arg z < 2pi k 2^{-j}. The pair (0, 1) is the sentinel
/// root cell used by the zero index for |z| < 1/2.
struct WhitneyIndex {
  int j = 0;
  std::uint64_t k = 1;

  friend auto operator<=>(const WhitneyIndex&, const WhitneyIndex&) = default;
};

inline constexpr int kDefaultMaxLevel = 52;

/// The square Q_{jk} containing z, j >= 1 for every z in the disc.
WhitneyIndex whitney_square(DiscPoint z);

/// Index cell: whitney_square(z) for |z| >= 1/2, the root cell (0, 1) otherwise.
WhitneyIndex whitney_cell(DiscPoint z);

/// True when z satisfies both defining inequalities of Q_{jk} (j >= 1).
bool in_whitney_square(DiscPoint z, WhitneyIndex cell);

/// Radial bounds [r0, r1) and angular bounds [theta0, theta1) of Q_{jk};
/// the root cell maps to the disc of radius 1/2.
struct CellBounds {
  double r0, r1, theta0, theta1;
};
CellBounds whitney_bounds(WhitneyIndex cell);

/// Euclidean distance from z to the closed annular sector.
double distance_to_sector(Complex z, const CellBounds& cell) noexcept;

/// Pseudo-hyperbolic disk {w : rho(center, w) < radius}.
class HyperbolicDisk {
 public:
  HyperbolicDisk(DiscPoint center, double radius);

  DiscPoint center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  bool contains(DiscPoint z) const noexcept { return rho(center_, z) < radius_; }

  /// The disk is a Euclidean disk; these give its center and radius.
  Complex euclidean_center() const noexcept;
  double euclidean_radius() const noexcept;

 private:
  DiscPoint center_;
  double radius_;
};

}  // namespace cninner
