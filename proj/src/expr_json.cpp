#include "cninner/expr_json.hpp"

namespace cninner {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::parse, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad("complex value must be [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

ZeroSequence zeros_from_json(const json& j) {
  const json& list = j.is_object() ? field(j, "zeros") : j;
  if (!list.is_array()) bad("zeros must be a list of [re, im, mult]");
  ZeroSequence out;
  for (const auto& e : list) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) bad("zero entry must be [re, im] or [re, im, mult]");
    int mult = 1;
    if (e.size() == 3) {
      if (!e[2].is_number_integer()) bad("multiplicity must be an integer");
      mult = e[2].get<int>();
    }
    out.add({number(e[0], "zero re"), number(e[1], "zero im")}, mult);
  }
  return out;
}

json zeros_to_json(const ZeroSequence& z) {
  json list = json::array();
  for (const auto& e : z.entries()) list.push_back(json::array({e.z.real(), e.z.imag(), e.multiplicity}));
  return list;
}

AtomicMeasure measure_from_json(const json& j) {
  BoundaryModel model = BoundaryModel::disc;
  if (j.contains("model")) {
    const auto m = field(j, "model");
    if (m == "disc") {
      model = BoundaryModel::disc;
    } else if (m == "halfplane") {
      model = BoundaryModel::halfplane;
    } else {
      bad("model must be \"disc\" or \"halfplane\"");
    }
  }
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array()) bad("atoms must be a list of [position, mass]");
  AtomicMeasure mu(model);
  for (const auto& a : atoms) {
    if (!a.is_array() || a.size() != 2) bad("atom must be [position, mass]");
    mu.add(number(a[0], "atom position"), number(a[1], "atom mass"));
  }
  return mu;
}

json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(json::array({a.position, a.mass}));
  return {{"kind", "singular"},
          {"model", mu.model() == BoundaryModel::disc ? "disc" : "halfplane"},
          {"atoms", std::move(atoms)}};
}

InnerExpr expr_from_json(const json& j) {
  if (!j.is_object()) bad("expression node must be an object");
  const json& kind_j = field(j, "kind");
  if (!kind_j.is_string()) bad("kind must be a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "identity") return InnerExpr::identity();
    if (kind == "blaschke") {
      if (j.contains("generator")) {
        const json& g = j.at("generator");
        if (field(g, "type") != "radial_dyadic") bad("unknown generator type");
        const double scale = g.contains("scale") ? number(g.at("scale"), "scale") : 1.0;
        const Complex dir = g.contains("direction") ? complex_from_json(g.at("direction")) : Complex(1.0, 0.0);
        return InnerExpr::blaschke(std::make_shared<const RadialDyadicZeros>(scale, dir));
      }
      return InnerExpr::blaschke(zeros_from_json(field(j, "zeros")));
    }
    if (kind == "singular") return InnerExpr::singular(measure_from_json(j));
    if (kind == "frostman") {
      return InnerExpr::frostman(complex_from_json(field(j, "gamma")), expr_from_json(field(j, "child")));
    }
    if (kind == "precompose") {
      return InnerExpr::precompose(complex_from_json(field(j, "a")), expr_from_json(field(j, "child")));
    }
    if (kind == "product") {
      const json& ch = field(j, "children");
      if (!ch.is_array()) bad("children must be a list");
      std::vector<InnerExpr> children;
      for (const auto& c : ch) children.push_back(expr_from_json(c));
      return InnerExpr::product(std::move(children));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse) throw;
    bad(kind + " node: " + e.what());
  }
  bad("unknown node kind '" + kind + "'");
}

json expr_to_json(const InnerExpr& f) {
  const auto& v = f.node().v;
  if (const auto* b = std::get_if<BlaschkeNode>(&v)) {
    if (!b->generator) return {{"kind", "blaschke"}, {"zeros", zeros_to_json(b->zeros)}};
    if (const auto* r = dynamic_cast<const RadialDyadicZeros*>(b->generator.get())) {
      return {{"kind", "blaschke"},
              {"generator", {{"type", "radial_dyadic"}, {"scale", r->scale()}, {"direction", complex_to_json(r->direction())}}}};
    }
    if (const auto* fz = dynamic_cast<const FiniteZeros*>(b->generator.get())) {
      return {{"kind", "blaschke"}, {"zeros", zeros_to_json(fz->zeros())}};
    }
    fail(ErrorCode::unsupported, "generator cannot be serialised");
  }
  if (const auto* s = std::get_if<SingularNode>(&v)) return measure_to_json(s->measure);
  if (const auto* fr = std::get_if<FrostmanNode>(&v)) {
    return {{"kind", "frostman"}, {"gamma", complex_to_json(fr->gamma)}, {"child", expr_to_json(fr->child)}};
  }
  if (const auto* p = std::get_if<PrecomposeNode>(&v)) {
    return {{"kind", "precompose"}, {"a", complex_to_json(p->a)}, {"child", expr_to_json(p->child)}};
  }
  json children = json::array();
  for (const auto& c : std::get<ProductNode>(v).children) children.push_back(expr_to_json(c));
  return {{"kind", "product"}, {"children", std::move(children)}};
}

}  // namespace cninner
