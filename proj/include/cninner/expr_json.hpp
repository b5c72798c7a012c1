#pragma once

#include <json.hpp>

#include "cninner/inner.hpp"

namespace cninner {

// Node tree:
//   {"kind": "blaschke", "zeros": [[re, im, mult], ...]}
//   {"kind": "blaschke", "generator": {"type": "radial_dyadic", "scale": s, "direction": [re, im]}}
//   {"kind": "singular", "model": "disc" | "halfplane", "atoms": [[theta_or_t, mass], ...]}
//   {"kind": "frostman", "gamma": [re, im], "child": {...}}
//   {"kind": "precompose", "a": [re, im], "child": {...}}
//   {"kind": "product", "children": [{...}, ...]}
//   {"kind": "identity"}
// Parse failures throw Error with ErrorCode::parse.

InnerExpr expr_from_json(const nlohmann::json& j);
nlohmann::json expr_to_json(const InnerExpr& f);

ZeroSequence zeros_from_json(const nlohmann::json& j);  // [[re, im(, mult)], ...] or {"zeros": [...]}
nlohmann::json zeros_to_json(const ZeroSequence& z);

AtomicMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const AtomicMeasure& mu);

Complex complex_from_json(const nlohmann::json& j);  // [re, im] or a bare number
nlohmann::json complex_to_json(Complex z);

}  // namespace cninner
