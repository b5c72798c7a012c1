#include "cninner/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cninner {

namespace {

std::string describe(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

double slot_lower(int j, std::uint64_t k) { return kTwoPi * std::ldexp(static_cast<double>(k - 1), -j); }
double slot_upper(int j, std::uint64_t k) { return kTwoPi * std::ldexp(static_cast<double>(k), -j); }

// Shortest angular distance between two angles, in [0, pi].
double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return d > kPi ? kTwoPi - d : d;
}

}  // namespace

DiscPoint::DiscPoint(Complex z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) >= 1.0) {
    fail(ErrorCode::domain, "point " + describe(z) + " is not inside the unit disc");
  }
}

HalfPlanePoint::HalfPlanePoint(Complex z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.imag() > 0.0)) {
    fail(ErrorCode::domain, "point " + describe(z) + " is not in the upper half-plane");
  }
}

double raw::arg0(Complex z) noexcept {
  double t = std::atan2(z.imag(), z.real());
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double rho(DiscPoint z, DiscPoint w) noexcept { return raw::rho(z.value(), w.value()); }

DiscPoint mobius(DiscPoint a, DiscPoint z) { return DiscPoint(raw::mobius(a.value(), z.value())); }

double rho_halfplane(HalfPlanePoint z, HalfPlanePoint w) noexcept {
  return raw::rho_halfplane(z.value(), w.value());
}

DiscPoint cayley(HalfPlanePoint p) { return DiscPoint(raw::cayley(p.value())); }

HalfPlanePoint cayley_inv(DiscPoint q) { return HalfPlanePoint(raw::cayley_inv(q.value())); }

WhitneyIndex whitney_square(DiscPoint z) {
  const double r = z.abs();
  int j = 1;
  if (r >= 0.5) {
    j = static_cast<int>(std::floor(-std::log2(1.0 - r))) + 1;
    j = std::max(j, 1);
    while (j > 1 && r < 1.0 - std::ldexp(1.0, 1 - j)) --j;
    while (!(r < 1.0 - std::ldexp(1.0, -j))) ++j;
  }
  const double theta = raw::arg0(z.value());
  const std::uint64_t slots = std::uint64_t{1} << j;
  auto k = static_cast<std::uint64_t>(std::floor(theta / kTwoPi * std::ldexp(1.0, j))) + 1;
  k = std::clamp<std::uint64_t>(k, 1, slots);
  while (k > 1 && theta < slot_lower(j, k)) --k;
  while (k < slots && theta >= slot_upper(j, k)) ++k;
  return {j, k};
}

WhitneyIndex whitney_cell(DiscPoint z) {
  if (z.abs() < 0.5) return {0, 1};
  return whitney_square(z);
}

bool in_whitney_square(DiscPoint z, WhitneyIndex cell) {
  if (cell.j < 1 || cell.k < 1 || cell.k > (std::uint64_t{1} << cell.j)) return false;
  const double r = z.abs();
  const double theta = raw::arg0(z.value());
  return 1.0 - std::ldexp(1.0, 1 - cell.j) <= r && r < 1.0 - std::ldexp(1.0, -cell.j) &&
         slot_lower(cell.j, cell.k) <= theta && theta < slot_upper(cell.j, cell.k);
}

CellBounds whitney_bounds(WhitneyIndex cell) {
  if (cell.j == 0) return {0.0, 0.5, 0.0, kTwoPi};
  return {1.0 - std::ldexp(1.0, 1 - cell.j), 1.0 - std::ldexp(1.0, -cell.j), slot_lower(cell.j, cell.k),
          slot_upper(cell.j, cell.k)};
}

double distance_to_sector(Complex z, const CellBounds& cell) noexcept {
  const double r = std::abs(z);
  double gap = 0.0;
  if (cell.theta1 - cell.theta0 < kTwoPi) {
    const double phi = raw::arg0(z);
    const bool inside = (phi >= cell.theta0 && phi <= cell.theta1) ||
                        (phi + kTwoPi >= cell.theta0 && phi + kTwoPi <= cell.theta1);
    if (!inside) gap = std::min(angular_gap(phi, cell.theta0), angular_gap(phi, cell.theta1));
  }
  const double c = std::cos(gap);
  const double s = std::clamp(r * c, cell.r0, cell.r1);
  return std::sqrt(std::max(0.0, r * r + s * s - 2.0 * r * s * c));
}

HyperbolicDisk::HyperbolicDisk(DiscPoint center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0 && radius < 1.0)) fail(ErrorCode::domain, "hyperbolic disk radius must lie in (0,1)");
}

Complex HyperbolicDisk::euclidean_center() const noexcept {
  const double d2 = radius_ * radius_;
  const double a2 = std::norm(center_.value());
  return center_.value() * ((1.0 - d2) / (1.0 - d2 * a2));
}

double HyperbolicDisk::euclidean_radius() const noexcept {
  const double d2 = radius_ * radius_;
  const double a2 = std::norm(center_.value());
  return radius_ * (1.0 - a2) / (1.0 - d2 * a2);
}

}  // namespace cninner
