#pragma once

#include <cstdint>
#include <vector>

#include "cninner/analysis.hpp"
#include "cninner/cover.hpp"
#include "cninner/inner.hpp"

namespace cninner {

// ---------------------------------------------------------------------------
// Sigma_N: (N - j)^+ points in every Whitney cell Q_jk

enum class SigmaPlacement {
  adapted,  // rows by the cell's hyperbolic aspect ratio, points per row by row length
  square,   // first N - j nodes of an m x m sub-grid, m = ceil(sqrt(N - j))
};

inline constexpr int kMaxSigmaN = 12;
inline constexpr double kSeparationLow = 0.3;
inline constexpr double kSeparationHigh = 3.0;

struct SigmaFamilySpec {
  int N = 1;
  SigmaPlacement placement = SigmaPlacement::adapted;
  int gap_samples = 8;  // per axis, for the covering-radius check
};

/// Per level j, in units of (N - j)^{-1/2}.
struct SeparationStats {
  int j = 0;
  int per_cell = 0;
  int rows = 0, columns = 0;  // columns: most points in one row
  double min_sibling = 0.0;  // min over level-j points of rho to the nearest other point
  double max_sibling = 0.0;
  double max_gap = 0.0;      // max over cell samples of rho to the family
};

struct SigmaFamily {
  int N = 1;
  ZeroSequence zeros;
  std::vector<int> levels;  // Whitney level of each zero
  std::vector<SeparationStats> stats;
};

/// Deterministic placement: rows uniform in artanh r, points evenly spaced in
/// angle within a row. Throws invariant if the separation brackets [0.3, 3]
/// are violated.
SigmaFamily sigma_family(const SigmaFamilySpec& spec);

// ---------------------------------------------------------------------------
// Product of precomposed Sigma families, B = prod B_k(phi_{w_k})

struct Prop3Spec {
  std::vector<int> N_list;  // increasing
  double r_start = 0.25;    // first trial for 1 - w_k, halved until certified
  double r_floor = 1e-13;
};

struct Prop3Factor {
  int k = 0;
  int N = 0;
  double w = 0.0;  // real, w_1 = 0
  double r = 1.0;  // 1 - w
  std::size_t zero_count = 0;
  double worst_bound = 0.0;  // largest certified |log|B_k o phi_w|| over earlier protected regions
  int halvings = 0;
};

struct Prop3Product {
  InnerExpr expr = InnerExpr::identity();
  ZeroSequence zeros;  // phi_{w_k}(Sigma_{N_k}), all k
  std::vector<Prop3Factor> factors;
  std::vector<InnerExpr> partials;  // partials[k - 1] = product of factors 1..k
};

/// Chooses w_k = 1 - r_k so that factor k changes log|B| by at most 2^{-k-1}
/// on every earlier protected region: the disk |z| <= 1 - 2 r_j and the
/// chart disk phi_{w_j}(|zeta| <= 1 - 2^{-(N_j + 1)}). Summed over k > j this
/// keeps the tail below 2^{-j}.
Prop3Product prop3_product(const Prop3Spec& spec);

/// The default schedule N_k = k, k = 1..k_max.
Prop3Spec prop3_default(int k_max);

/// Grid with a chart at every w_k.
GridSpec prop3_grid_spec(const Prop3Product& p, GridSpec base);
SampleGrid prop3_grid(const Prop3Product& p, GridSpec base);

/// Lower envelope of min |B| against x = rho(z, Z) in bins, fitted as
/// c1 x exp(-c / x^4).
struct PsiProfile {
  std::vector<double> x;      // bin lower edges
  std::vector<double> min_b;  // min |B| in the bin, 0 if empty
  double c = 0.0;
  double c1 = 0.0;
};
PsiProfile psi_profile(const InnerExpr& f, const ZeroIndex& zeros, const SampleGrid& grid,
                       const std::vector<double>& bins, int threads = 1);

// ---------------------------------------------------------------------------
// Dyadic singular measure: blocks of n_k atoms of mass eps_k at 2 pi m / N_k

struct Thm1Block {
  int k = 0;
  double eps = 0.0;      // 2^{-k^2}
  std::uint64_t n = 0;   // 2^{k^2 - k}
  std::uint64_t N = 0;   // k 2^{k^2}
};

inline constexpr int kThm1MaxK = 4;

Thm1Block thm1_block(int k);
AtomicMeasure thm1_measure(int k_max);
AtomicMeasure thm1_block_measure(int k);

struct Thm1RegionBound {
  int k = 0;
  PolarBox sector{0, 0, 0, 0};  // 1/N < 1 - |z| < n/N, 0 < arg z < 2 pi n / N
  bool empty = false;
  double area = 0.0;            // closed form
  double lower = 0.0, upper = 0.0;  // (1 - n/N)(2 pi n/N) ln n and (2 pi n/N) ln n
  double c_hat = 0.0;           // min of (P * mu_k) / (eps_k N_k) over the closed sector
  int samples = 0;              // grid intervals per axis, log-spaced in 1 - |z|
};

Thm1RegionBound thm1_region_bound(int k, int samples = 64);

// ---------------------------------------------------------------------------
// Half-plane blocks: 2^{2n} atoms at (s n^{2/3} 2^n + m) / N, mass n^{1/3} / N

struct E8Block {
  int j = 0;
  int n = 0;
  double N = 0.0;
};

inline constexpr int kE8MaxJ = 3;
inline constexpr std::size_t kE8MaxAtoms = 65536;

struct E8MeasureSpec {
  int j_max = 1;
  std::vector<E8Block> blocks;  // empty: the default n_j = 2^j, N_j = ceil(n_j^{4/3}) 2^{2 n_j}
};

E8Block e8_default_block(int j);
std::vector<E8Block> e8_blocks(const E8MeasureSpec& spec);
AtomicMeasure e8_block_measure(const E8Block& b);
AtomicMeasure e8_measure(const E8MeasureSpec& spec);

struct E8VerifyOptions {
  int samples = 8;      // per box axis on Omega_j
  double delta = 0.5;   // level for {u_j > delta}
  int extra_depth = 6;  // cover depth below -log2(1/N_j)
  int max_subdivision = 6;
  bool level_cover = true;  // the cover is the expensive part; j = 3 is out of desk reach
  int threads = 1;
};

struct E8Report {
  E8Block block;
  double min_u_ratio = 0.0;       // min u_j / n_j^{1/3} on the Omega_j sample
  double min_u_ratio_fine = 0.0;  // same at twice the sampling
  HalfPlaneBox E{0, 0, 0, 0};
  double area_E = 0.0;            // weighted_area(E)
  double area_E_closed = 0.0;     // n^{5/3} 2^{2n} ln 2 / N
  double level_area = 0.0;        // cover estimate of A({u_j > delta})
  double level_area_error = 0.0;
  double level_ratio = 0.0;       // level_area N / (n 2^{2n})
  int depth = 0;
};

/// u_j is the Poisson sum of block j with kernel y / ((x - t)^2 + y^2), that
/// is -log|S_{mu_j}|.
E8Report e8_verify(int j, const E8VerifyOptions& options = {});
E8Report e8_verify(const E8Block& block, const E8VerifyOptions& options = {});

}  // namespace cninner
