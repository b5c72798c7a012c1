#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cninner/inner.hpp"
#include "cninner/zero_index.hpp"

namespace cninner {

// ---------------------------------------------------------------------------
// Sample grids

/// Whitney-stratified lattice. Level j cells (j = 1..levels) each receive an
/// m_r x m_theta sub-lattice scaled by 2^refinement on both axes; lattices at
/// successive refinements are nested. Each chart c adds the image of the
/// lattice under phi_c, which keeps the hyperbolic density around c.
struct GridSpec {
  int levels = 8;
  int m_r = 4;
  int m_theta = 4;
  int refinement = 0;
  std::vector<Complex> charts{Complex(0.0, 0.0)};
};

struct SampleGrid {
  std::vector<Complex> points;
  std::map<WhitneyIndex, std::size_t> per_cell;  // counts of the base-chart lattice
  int refinement_level = 0;
  int levels = 0;
  std::size_t quota = 0;    // points per cell (the central disc gets more)
  double resolution = 0.0;  // radial spacing of the lattice in the central disc, 0.25 / m_r
};

SampleGrid make_grid(const GridSpec& spec);

/// Evaluates f and rho(., Z) at every point. threads <= 1 runs inline.
struct PointSample {
  Complex z;
  double log_modulus;  // -inf at zeros
  double rho;          // 1 when Z is empty
};
std::vector<PointSample> sample_points(const InnerExpr& f, const ZeroIndex& zeros, const std::vector<Complex>& pts,
                                       int threads = 1);

/// Points phi_w(eps e^{i theta}) on the pseudo-hyperbolic circle of radius eps
/// around each zero, nudged outward by a relative 1e-12 so that rounding
/// never puts them inside the circle.
std::vector<Complex> shell_points(const ZeroSequence& zeros, double eps, int count);

// ---------------------------------------------------------------------------
// Indicator and constants

struct WepOptions {
  bool shells = true;      // add the eps-shells around zeros to the point set
  int shell_points = 64;   // per zero, doubled with each grid refinement
  bool certify = false;    // attempt a Schwarz-Pick cell certificate (finite products)
  int threads = 1;
};

struct WepEntry {
  double eps = 0.0;
  double eta = 1.0;            // min |f| over sampled points with rho >= eps
  bool vacuous = false;        // no sampled point with rho >= eps
  bool certified = false;      // certified_lower > 0 was proved
  double certified_lower = 0;  // |f| < certified_lower implies rho < eps
  Complex witness{0.0, 0.0};
};

struct WepProfile {
  std::vector<WepEntry> entries;
  int refinement = 0;
  std::size_t points = 0;
};

WepProfile wep_indicator(const InnerExpr& f, const ZeroIndex& zeros, const std::vector<double>& eps_list,
                         const SampleGrid& grid, const WepOptions& options = {});

/// min |f(z)| / rho(z, Z) over the grid, points at zeros skipped.
double vasyunin_constant(const InnerExpr& f, const ZeroIndex& zeros, const SampleGrid& grid, int threads = 1);

struct CnStage {
  std::string label;
  InnerExpr f;
  std::shared_ptr<const ZeroIndex> zeros;
  SampleGrid grid;
};

struct CnFit {
  std::vector<std::string> stage_labels;
  std::vector<std::vector<double>> A;  // A[stage][n - 1] = min |f| / rho^n
  std::vector<bool> decaying;          // per n, over the last two transitions
  std::optional<int> exponent;         // first n that does not decay
  std::string verdict;                 // always an empirical statement
};

/// A stage transition decays when A drops below this fraction of its previous value.
inline constexpr double kDecayRatio = 0.99;

CnFit cn_exponent_fit(const std::vector<CnStage>& stages, int n_max, int threads = 1);
/// Stages are grid refinements 0..stages-1 of one expression.
CnFit cn_exponent_fit(const InnerExpr& f, std::shared_ptr<const ZeroIndex> zeros, GridSpec grid, int n_max,
                      int stages = 3, int threads = 1);

// ---------------------------------------------------------------------------
// Carleson condition and the decomposition into interpolating pieces

struct CarlesonResult {
  double delta = 1.0;        // min_k prod_{j != k} rho(z_j, z_k)
  std::size_t argmin = 0;
};
CarlesonResult carleson_condition(const ZeroSequence& zeros);

struct DecompositionResult {
  double delta = 0.0;  // dyadic separation radius found by bisection
  int n = 1;
  double A = 0.0;      // the caller's constant, recorded only
  std::vector<ZeroSequence> subsets;
  std::vector<std::vector<std::size_t>> subset_ids;  // indices into the expanded input
  std::vector<double> carleson_constants;
  std::size_t components = 0;
  std::map<std::size_t, std::size_t> component_sizes;  // size -> count
};

/// Raised when no dyadic delta >= 2^-20 keeps every delta-disk at <= n zeros.
class MultiplicityError : public Error {
 public:
  MultiplicityError(const std::string& what, Complex center, double radius, std::size_t count)
      : Error(ErrorCode::invariant, what), center_(center), radius_(radius), count_(count) {}
  Complex center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  std::size_t count() const noexcept { return count_; }

 private:
  Complex center_;
  double radius_;
  std::size_t count_;
};

inline constexpr int kMinDeltaExponent = 20;

DecompositionResult decompose_interpolating(const ZeroSequence& zeros, int n, double A = 1.0);

// ---------------------------------------------------------------------------
// Level sets of finite products

struct LevelRoot {
  Complex z;
  int multiplicity = 1;
  double residual = 0.0;  // |f(z) - gamma|
};

struct LevelSolveResult {
  std::vector<LevelRoot> roots;
  double radius = 0.0;      // |z| <= radius encloses every root
  int winding = 0;          // winding number of f - gamma on |z| = radius
  std::size_t cells = 0;    // subdivision cells examined
  std::size_t retries = 0;  // perturbed re-subdivisions
};

/// Solves f = gamma for a finite Blaschke expression. Throws on failure to
/// account for every root.
LevelSolveResult level_solve(const InnerExpr& f, Complex gamma);

}  // namespace cninner
