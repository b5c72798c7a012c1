#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cninner/inner.hpp"

namespace cninner {

/// Annular sector r0 <= |z| <= r1, theta0 <= arg z <= theta1.
struct PolarBox {
  double r0, r1, theta0, theta1;
};

/// Rectangle x0 <= x <= x1, y0 <= y <= y1 in the upper half-plane.
struct HalfPlaneBox {
  double x0, x1, y0, y1;
};

/// Hyperbolic centre of a box and a bound h on rho(centre, z) over the box:
/// disc boxes use d <= (artanh r1 - artanh r0)/2 + r1 (dtheta/2)/(1 - r1^2),
/// half-plane boxes d <= ln(y1/y0)/4 + (dx/2)/(2 y0); then h = tanh(d).
Complex box_center(const PolarBox& b);
double box_rho_radius(const PolarBox& b);
Complex box_center(const HalfPlaneBox& b);
double box_rho_radius(const HalfPlaneBox& b);

/// Schwarz-Pick: |g| on a set of pseudo-hyperbolic radius h around a point
/// where |g| = s lies in [(s - h)/(1 - s h), (s + h)/(1 + s h)].
double schwarz_pick_lower(double s, double h) noexcept;
double schwarz_pick_upper(double s, double h) noexcept;

enum class CellStatus { inside, outside, boundary };

struct CoverCell {
  double a0, a1, b0, b1;  // (r0, r1, theta0, theta1) or (x0, x1, y0, y1)
  CellStatus status;
  int level;              // Whitney level (disc), or strips below the top one (half-plane)
};

struct RegionCover {
  BoundaryModel model = BoundaryModel::disc;
  double eps = 0.0;
  int depth = 0;
  std::vector<CoverCell> cells;  // outside cells are not stored
  std::size_t evaluations = 0;
  std::size_t pruned_columns = 0;
  int first_level = 0;  // half-plane: level 0 is the strip 2^-first_level <= y < 2^(1-first_level)
};

struct CoverOptions {
  int max_subdivision = 10;  // rounds of quartering below a root cell (done as 2x bisections)
  int threads = 1;
};

/// Certified cover of {|f| < eps} inside |z| <= 1 - 2^-depth. Root cells are
/// the Whitney cells of levels 1..depth.
RegionCover level_set_cover(const InnerExpr& f, double eps, int depth, const CoverOptions& options = {});

/// Cover of {|S_mu| < eps} = {(P * mu) > log(1/eps)} for a half-plane measure,
/// restricted to 2^-depth <= y. Columns whose atoms cannot lift P * mu above
/// the threshold anywhere below them are pruned wholesale.
RegionCover level_set_cover_halfplane(const AtomicMeasure& mu, double eps, int depth,
                                      const CoverOptions& options = {});

// ---------------------------------------------------------------------------
// Weighted areas: integral of dm_2 / (1 - |z|) (disc) or dm_2 / Im z (half-plane)

double weighted_area(const PolarBox& b);      // closed form
double weighted_area(const HalfPlaneBox& b);  // closed form

struct AreaResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::vector<double> per_level;     // contribution of inside cells, by level (index = level)
  std::vector<double> partial_sums;  // running sums of per_level
};

/// Inside cells integrate exactly; boundary cells go to the error bound.
AreaResult weighted_area(const RegionCover& cover);

/// Inside-cell area of the cover clipped to a polar box.
double weighted_area_within(const RegionCover& cover, const PolarBox& clip);

/// Pseudo-hyperbolic disk, by tanh-sinh quadrature.
AreaResult weighted_area(const HyperbolicDisk& d);

// ---------------------------------------------------------------------------
// Condition (A) trend

inline constexpr double kTrendFraction = 0.05;

/// "growing" when each of the last three levels adds >= q times the running
/// total before it, "bounded" when those three add <= q times the total,
/// "indeterminate" otherwise. A finite-scale observation, not a proof.
std::string classify_trend(const std::vector<double>& per_level, double q = kTrendFraction);

struct ConditionAEntry {
  double eps = 0.0;
  int depth = 0;
  AreaResult area;
  std::string trend;
  std::size_t cells = 0;
};

std::vector<ConditionAEntry> condition_A_report(const InnerExpr& f, const std::vector<double>& eps_list, int depth,
                                                double q = kTrendFraction, const CoverOptions& options = {});
std::vector<ConditionAEntry> condition_A_report(const AtomicMeasure& halfplane_mu, const std::vector<double>& eps_list,
                                                int depth, double q = kTrendFraction,
                                                const CoverOptions& options = {});

}  // namespace cninner
