#include "cninner/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cninner {

AtomicMeasure::AtomicMeasure(BoundaryModel model, std::vector<Atom> atoms) : model_(model) {
  atoms_.reserve(atoms.size());
  for (const auto& a : atoms) add(a.position, a.mass);
}

void AtomicMeasure::add(double position, double mass) {
  if (!std::isfinite(position)) fail(ErrorCode::invalid_argument, "atom position must be finite");
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorCode::invalid_argument, "atom mass must be positive");
  atoms_.push_back({position, mass});
  total_mass_ += mass;
}

double poisson_disc(Complex z, double theta) noexcept {
  const Complex zeta = std::polar(1.0, theta);
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r) / std::norm(zeta - z);
}

double poisson_halfplane(Complex h, double t) noexcept {
  const double dx = h.real() - t;
  const double y = h.imag();
  return y / (dx * dx + y * y);
}

double poisson_integral(const AtomicMeasure& mu, Complex point) noexcept {
  double s = 0.0;
  if (mu.model() == BoundaryModel::disc) {
    for (const auto& a : mu.atoms()) s += a.mass * poisson_disc(point, a.position);
  } else {
    for (const auto& a : mu.atoms()) s += a.mass * poisson_halfplane(point, a.position);
  }
  return s;
}

InnerExpr InnerExpr::blaschke(ZeroSequence zeros) {
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{BlaschkeNode{std::move(zeros), nullptr}}));
}

InnerExpr InnerExpr::blaschke(std::shared_ptr<const ZeroGenerator> generator) {
  if (!generator) fail(ErrorCode::invalid_argument, "null zero generator");
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{BlaschkeNode{{}, std::move(generator)}}));
}

InnerExpr InnerExpr::singular(AtomicMeasure measure) {
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{SingularNode{std::move(measure)}}));
}

InnerExpr InnerExpr::frostman(Complex gamma, InnerExpr child) {
  const double g = std::abs(gamma);
  if (!(g > 0.0 && g < 1.0)) fail(ErrorCode::domain, "Frostman parameter must satisfy 0 < |gamma| < 1");
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{FrostmanNode{gamma, std::move(child)}}));
}

InnerExpr InnerExpr::precompose(Complex a, InnerExpr child) {
  DiscPoint checked(a);
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{PrecomposeNode{checked.value(), std::move(child)}}));
}

InnerExpr InnerExpr::product(std::vector<InnerExpr> children) {
  return InnerExpr(std::make_shared<const ExprNode>(ExprNode{ProductNode{std::move(children)}}));
}

InnerExpr InnerExpr::identity() {
  ZeroSequence z;
  z.add(0.0);
  return blaschke(std::move(z));
}

InnerExpr frostman_shift(const InnerExpr& f, Complex gamma) { return InnerExpr::frostman(gamma, f); }

double truncation_constant(double R) { return 2.0 * (1.0 + R) / (1.0 - R); }

double tail_log_bound(double R, double tail_sum) {
  const double x = truncation_constant(R) * tail_sum;
  if (!(x < 1.0)) return std::numeric_limits<double>::infinity();
  return x / (2.0 * (1.0 - x));
}

Truncation blaschke_truncate(const ZeroGenerator& seq, double R, double budget, std::size_t max_terms) {
  if (!(R >= 0.0 && R < 1.0)) fail(ErrorCode::domain, "truncation radius must lie in [0, 1)");
  if (!(budget > 0.0)) fail(ErrorCode::invalid_argument, "truncation budget must be positive");
  Truncation out;
  auto take = [&](std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const ZeroEntry e = seq.at(i);
      out.prefix.add(e.z, e.multiplicity);
    }
  };
  if (const auto n = seq.size(); n && *n <= max_terms) {
    take(*n);
    return out;
  }
  auto bound_at = [&](std::size_t k) {
    const auto t = seq.tail_majorant(k);
    if (!t) fail(ErrorCode::unsupported, "zero generator does not certify its tail");
    return tail_log_bound(R, *t);
  };
  if (bound_at(0) <= budget) return out;
  // Exponential search, then bisection for the shortest certified prefix.
  std::size_t hi = 1;
  while (hi < max_terms && bound_at(hi) > budget) hi = std::min(max_terms, hi * 2);
  if (bound_at(hi) > budget) {
    take(hi);
    out.tail_bound = bound_at(hi);
    out.budget_met = false;
    return out;
  }
  std::size_t lo = hi / 2;  // bound_at(lo) > budget
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (bound_at(mid) <= budget ? hi : lo) = mid;
  }
  take(hi);
  out.tail_bound = bound_at(hi);
  return out;
}

namespace {

// log rho(z, a) computed through 1 - rho^2 when rho is close to 1.
struct FactorTerm {
  double log_rho;
  Complex unit;  // (z - a) / (1 - conj(a) z) normalised
  bool at_zero;
};

FactorTerm blaschke_factor(Complex z, Complex a) {
  const Complex num = z - a;
  const Complex den = 1.0 - std::conj(a) * z;
  const double nn = std::abs(num);
  const double dd = std::abs(den);
  const double rho = nn / dd;
  if (rho < kAtZeroRho) return {-std::numeric_limits<double>::infinity(), Complex(1.0, 0.0), true};
  const double rz = std::abs(z);
  const double ra = std::abs(a);
  const double x = (1.0 - rz) * (1.0 + rz) * (1.0 - ra) * (1.0 + ra) / (dd * dd);
  const double lr = x < 0.5 ? 0.5 * std::log1p(-x) : std::log(rho);
  return {lr, (num / nn) * (dd / den), false};
}

struct Acc {
  double log_modulus = 0.0;
  double err = 0.0;
  Complex phase{1.0, 0.0};
  bool has_phase = true;
  bool at_zero = false;
  bool budget_met = true;

  void absorb(const Acc& o) {
    log_modulus += o.log_modulus;
    err += o.err;
    at_zero = at_zero || o.at_zero;
    budget_met = budget_met && o.budget_met;
    if (has_phase && o.has_phase) {
      phase *= o.phase;
      phase /= std::abs(phase);
    } else {
      has_phase = false;
    }
  }
};

void add_zeros(Acc& acc, Complex z, const std::vector<ZeroEntry>& zeros, bool track_phase) {
  for (const auto& e : zeros) {
    const FactorTerm t = blaschke_factor(z, e.z);
    if (t.at_zero) {
      acc.at_zero = true;
      continue;
    }
    acc.log_modulus += e.multiplicity * t.log_rho;
    if (track_phase) {
      for (int m = 0; m < e.multiplicity; ++m) acc.phase *= t.unit;
      acc.phase /= std::abs(acc.phase);
    }
  }
}

Acc eval_node(const InnerExpr& f, Complex z, const TailPolicy& policy);

Acc eval_blaschke(const BlaschkeNode& b, Complex z, const TailPolicy& policy) {
  Acc acc;
  if (!b.generator) {
    add_zeros(acc, z, b.zeros.entries(), true);
    return acc;
  }
  // The phase of an infinite product with these factors does not converge,
  // so only the modulus is certified.
  acc.has_phase = false;
  const double R = std::abs(z);
  const Truncation t = blaschke_truncate(*b.generator, R, policy.budget, policy.max_terms);
  add_zeros(acc, z, t.prefix.entries(), false);
  acc.err = t.tail_bound;
  acc.budget_met = t.budget_met;
  return acc;
}

Acc eval_singular(const SingularNode& s, Complex z) {
  Acc acc;
  double angle = 0.0;
  if (s.measure.model() == BoundaryModel::disc) {
    // log S = -sum m (zeta + z) / (zeta - z)
    for (const auto& a : s.measure.atoms()) {
      const Complex zeta = std::polar(1.0, a.position);
      const double d2 = std::norm(zeta - z);
      acc.log_modulus -= a.mass * poisson_disc(z, a.position);
      angle -= a.mass * 2.0 * std::imag(z * std::conj(zeta)) / d2;
    }
  } else {
    // log S = i sum m / (t - h), h the half-plane image of z
    const Complex h = raw::cayley_inv(z);
    for (const auto& a : s.measure.atoms()) {
      const double dx = a.position - h.real();
      const double d2 = dx * dx + h.imag() * h.imag();
      acc.log_modulus -= a.mass * h.imag() / d2;
      angle += a.mass * dx / d2;
    }
  }
  acc.phase = std::polar(1.0, std::remainder(angle, kTwoPi));
  return acc;
}

// Range of log |phi_gamma(u)| over the annulus lo <= |u| <= hi, any argument.
std::pair<double, double> frostman_annulus_range(double g, double lo, double hi) {
  const double near = (lo <= g && g <= hi) ? 0.0 : std::min(std::abs(g - lo) / (1.0 - g * lo), std::abs(g - hi) / (1.0 - g * hi));
  const double far = (g + hi) / (1.0 + g * hi);
  return {near > 0.0 ? std::log(near) : -std::numeric_limits<double>::infinity(), std::log(far)};
}

Acc eval_frostman(const FrostmanNode& fr, Complex z, const TailPolicy& policy) {
  const Acc c = eval_node(fr.child, z, policy);
  Acc acc;
  const Complex g = fr.gamma;
  if (c.at_zero && c.err == 0.0) {
    acc.log_modulus = std::log(std::abs(g));
    acc.phase = g / std::abs(g);
    return acc;
  }
  if (c.has_phase && c.err == 0.0) {
    const Complex u = std::exp(c.log_modulus) * c.phase;
    const Complex num = g - u;
    const Complex den = 1.0 - std::conj(g) * u;
    const double rho = std::abs(num) / std::abs(den);
    if (rho < kAtZeroRho) {
      acc.at_zero = true;
      acc.log_modulus = -std::numeric_limits<double>::infinity();
      return acc;
    }
    acc.log_modulus = std::log(rho);
    acc.phase = (num / den) / rho;
    return acc;
  }
  // Only |u| is known up to the child's error: bracket over the annulus.
  acc.has_phase = false;
  acc.budget_met = c.budget_met;
  const double lo = c.at_zero ? 0.0 : std::exp(c.log_modulus - c.err);
  const double hi = c.at_zero ? 0.0 : std::min(1.0, std::exp(c.log_modulus + c.err));
  const auto [a, b] = frostman_annulus_range(std::abs(g), lo, hi);
  if (!std::isfinite(a)) {
    acc.log_modulus = b;
    acc.err = std::numeric_limits<double>::infinity();
    acc.budget_met = false;
    return acc;
  }
  acc.log_modulus = 0.5 * (a + b);
  acc.err = 0.5 * (b - a);
  return acc;
}

Acc eval_node(const InnerExpr& f, Complex z, const TailPolicy& policy) {
  const auto& v = f.node().v;
  if (const auto* b = std::get_if<BlaschkeNode>(&v)) return eval_blaschke(*b, z, policy);
  if (const auto* s = std::get_if<SingularNode>(&v)) return eval_singular(*s, z);
  if (const auto* fr = std::get_if<FrostmanNode>(&v)) return eval_frostman(*fr, z, policy);
  if (const auto* p = std::get_if<PrecomposeNode>(&v)) {
    Complex w = raw::mobius(p->a, z);
    // Rounding can push the image onto the circle when z hugs it.
    if (std::abs(w) >= 1.0) w *= std::nextafter(1.0, 0.0) / std::abs(w);
    return eval_node(p->child, w, policy);
  }
  const auto& prod = std::get<ProductNode>(v);
  Acc acc;
  for (const auto& c : prod.children) acc.absorb(eval_node(c, z, policy));
  return acc;
}

}  // namespace

CertifiedValue eval_log_modulus(const InnerExpr& f, DiscPoint z, const TailPolicy& policy) {
  const Acc a = eval_node(f, z.value(), policy);
  CertifiedValue out;
  out.at_zero = a.at_zero;
  out.log_modulus = a.at_zero ? -std::numeric_limits<double>::infinity() : std::min(a.log_modulus, 0.0);
  out.abs_error_bound = a.err;
  out.budget_met = a.budget_met && a.err <= policy.budget;
  if (a.has_phase) out.phase = a.phase;
  return out;
}

Complex eval_value(const InnerExpr& f, DiscPoint z, const TailPolicy& policy) {
  const CertifiedValue v = eval_log_modulus(f, z, policy);
  if (v.at_zero) return 0.0;
  if (!v.phase) fail(ErrorCode::unsupported, "expression does not track its phase at this point");
  return std::exp(v.log_modulus) * *v.phase;
}

double eval_modulus(const InnerExpr& f, Complex z) {
  const Acc a = eval_node(f, z, TailPolicy{});
  return a.at_zero ? 0.0 : std::exp(std::min(a.log_modulus, 0.0));
}

std::optional<ZeroSequence> expr_zeros(const InnerExpr& f) {
  const auto& v = f.node().v;
  if (const auto* b = std::get_if<BlaschkeNode>(&v)) {
    if (b->generator) return std::nullopt;
    return b->zeros;
  }
  if (std::holds_alternative<SingularNode>(v)) return ZeroSequence{};
  if (std::holds_alternative<FrostmanNode>(v)) return std::nullopt;
  if (const auto* p = std::get_if<PrecomposeNode>(&v)) {
    auto inner = expr_zeros(p->child);
    if (!inner) return std::nullopt;
    ZeroSequence out;
    for (const auto& e : inner->entries()) out.add(raw::mobius(p->a, e.z), e.multiplicity);
    return out;
  }
  ZeroSequence out;
  for (const auto& c : std::get<ProductNode>(v).children) {
    auto part = expr_zeros(c);
    if (!part) return std::nullopt;
    out.append(*part);
  }
  return out;
}

bool is_finite_blaschke(const InnerExpr& f) {
  const auto& v = f.node().v;
  if (const auto* b = std::get_if<BlaschkeNode>(&v)) return !b->generator;
  if (const auto* p = std::get_if<PrecomposeNode>(&v)) return is_finite_blaschke(p->child);
  if (const auto* p = std::get_if<ProductNode>(&v)) {
    return std::all_of(p->children.begin(), p->children.end(), [](const InnerExpr& c) { return is_finite_blaschke(c); });
  }
  return false;
}

}  // namespace cninner
