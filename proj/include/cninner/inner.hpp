#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cninner/geometry.hpp"
#include "cninner/zero_sequence.hpp"

namespace cninner {

enum class BoundaryModel { disc, halfplane };

struct Atom {
  double position;  // angle on the circle, or a real t on the line
  double mass;
};

class AtomicMeasure {
 public:
  explicit AtomicMeasure(BoundaryModel model = BoundaryModel::disc) : model_(model) {}
  AtomicMeasure(BoundaryModel model, std::vector<Atom> atoms);

  void add(double position, double mass);

  BoundaryModel model() const noexcept { return model_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double total_mass() const noexcept { return total_mass_; }

 private:
  BoundaryModel model_;
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

/// Disc Poisson kernel (1 - |z|^2) / |e^{i theta} - z|^2.
double poisson_disc(Complex z, double theta) noexcept;
/// Half-plane kernel y / ((x - t)^2 + y^2), without the 1/pi.
double poisson_halfplane(Complex h, double t) noexcept;
/// (P * mu)(z) for a disc measure, or (P * mu)(h) for a half-plane measure.
double poisson_integral(const AtomicMeasure& mu, Complex point) noexcept;

class InnerExpr;
struct ExprNode;

struct BlaschkeNode {
  ZeroSequence zeros;
  std::shared_ptr<const ZeroGenerator> generator;  // set for infinite products
};
struct SingularNode {
  AtomicMeasure measure;
};

/// Immutable composition tree. Copies share structure.
class InnerExpr {
 public:
  static InnerExpr blaschke(ZeroSequence zeros);
  static InnerExpr blaschke(std::shared_ptr<const ZeroGenerator> generator);
  static InnerExpr singular(AtomicMeasure measure);
  /// phi_gamma o child, phi_gamma(w) = (gamma - w) / (1 - conj(gamma) w).
  static InnerExpr frostman(Complex gamma, InnerExpr child);
  /// child o phi_a.
  static InnerExpr precompose(Complex a, InnerExpr child);
  static InnerExpr product(std::vector<InnerExpr> children);
  /// f(z) = z.
  static InnerExpr identity();

  const ExprNode& node() const noexcept { return *node_; }

 private:
  explicit InnerExpr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct FrostmanNode {
  Complex gamma;
  InnerExpr child;
};
struct PrecomposeNode {
  Complex a;
  InnerExpr child;
};
struct ProductNode {
  std::vector<InnerExpr> children;
};

struct ExprNode {
  std::variant<BlaschkeNode, SingularNode, FrostmanNode, PrecomposeNode, ProductNode> v;
};

/// Truncation budget for infinite Blaschke products.
struct TailPolicy {
  double budget = 1e-10;          // target bound on the log-modulus error
  std::size_t max_terms = 1u << 22;
};

/// A factor with rho(z, zero) below this is reported as "at zero".
inline constexpr double kAtZeroRho = 1e-14;

struct CertifiedValue {
  double log_modulus = 0.0;
  double abs_error_bound = 0.0;
  std::optional<Complex> phase;  // unimodular; absent when not tracked
  bool at_zero = false;
  bool budget_met = true;
};

CertifiedValue eval_log_modulus(const InnerExpr& f, DiscPoint z, const TailPolicy& policy = {});

/// f(z) as a complex number; requires a tracked phase.
Complex eval_value(const InnerExpr& f, DiscPoint z, const TailPolicy& policy = {});

/// |f(z)| with 0 at zeros. Convenience for scans; ignores the error bound.
double eval_modulus(const InnerExpr& f, Complex z);

InnerExpr frostman_shift(const InnerExpr& f, Complex gamma);

struct Truncation {
  ZeroSequence prefix;
  double tail_bound = 0.0;
  bool budget_met = true;
};

/// Bound used for every truncation certificate: for |z| <= R and
/// x = C(R)(1 - |w|) < 1, -log rho(z, w) <= x / (2 (1 - x)), where
/// C(R) = 2 (1 + R) / (1 - R) comes from
///   1 - rho^2 = (1 - |z|^2)(1 - |w|^2) / |1 - conj(z) w|^2 <= (1 + R)/(1 - R) * 2 (1 - |w|).
double truncation_constant(double R);
double tail_log_bound(double R, double tail_sum);

Truncation blaschke_truncate(const ZeroGenerator& seq, double R, double budget,
                             std::size_t max_terms = 1u << 22);

/// Zeros of f inside the disc when f is built from Blaschke, precompose and
/// product nodes over finite sequences; nullopt otherwise.
std::optional<ZeroSequence> expr_zeros(const InnerExpr& f);

/// True when the tree contains only finite Blaschke parts.
bool is_finite_blaschke(const InnerExpr& f);

}  // namespace cninner
