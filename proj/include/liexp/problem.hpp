#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/fixtures.hpp"
#include "liexp/lie_core.hpp"
#include "liexp/repspace.hpp"
#include "liexp/semigroup.hpp"

namespace liexp {

/// Malformed problem input: bad JSON (with line/column) or a field that
/// fails validation (with its path).
class SpecError : public Error {
 public:
  SpecError(const std::string& field, const std::string& what, int line = 0, int column = 0)
      : Error(format(field, what, line, column)), field_(field), line_(line), column_(column) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& field, const std::string& what, int line, int column) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
    if (!field.empty()) s += "field '" + field + "': ";
    return s + what;
  }
  std::string field_;
  int line_, column_;
};

struct Grids {
  std::vector<double> t;
  std::vector<double> eps;
  std::vector<double> mu;
  std::vector<double> smoothing_t;
};

struct Tolerances {
  double identity = 1e-9;
  double duhamel = 1e-7;
};

/// Validated problem: algebra, representation, seminorm family, elliptic
/// operator, grids, tolerances and seed, with fixtures expanded.
struct ProblemSpec {
  std::string algebra_fixture;  // empty when given by structure constants
  LieAlgebra algebra{fixtures::zero_tensor(1), "abelian-1"};
  std::string representation_fixture;  // empty when given by matrices
  MatrixRep representation;
  json seminorm_specs = json::array();
  SeminormFamily seminorms;
  bool minus_laplacian_operator = true;
  OrderedPoly elliptic_operator;
  Grids grids;
  Tolerances tolerances;
  std::uint64_t seed = 1;
  std::vector<std::string> defaulted;
};

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw SpecError(path.empty() ? key : path + "." + key, "missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  return j.get<double>();
}

inline cplx complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw SpecError(path, "expected a number or a [re, im] pair");
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Mat matrix(const json& j, const std::string& path, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw SpecError(path, "expected " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
      throw SpecError(rp, "expected " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m(r, c) = complex_entry(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline StructureTensor tensor(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a nonempty d x d x d array");
  const std::size_t d = j.size();
  StructureTensor c(d);
  for (std::size_t a = 0; a < d; ++a) {
    const std::string pa = path + "[" + std::to_string(a) + "]";
    if (!j[a].is_array() || j[a].size() != d) throw SpecError(pa, "expected " + std::to_string(d) + " entries");
    c[a].resize(d);
    for (std::size_t b = 0; b < d; ++b) {
      const std::string pb = pa + "[" + std::to_string(b) + "]";
      if (!j[a][b].is_array() || j[a][b].size() != d)
        throw SpecError(pb, "expected " + std::to_string(d) + " entries");
      for (std::size_t k = 0; k < d; ++k)
        c[a][b].push_back(number(j[a][b][k], pb + "[" + std::to_string(k) + "]"));
    }
  }
  return c;
}

inline Seminorm seminorm(const json& j, const std::string& path, int n) {
  const json& kind_j = require(j, "kind", path);
  if (!kind_j.is_string()) throw SpecError(path + ".kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  auto weights = [&]() {
    if (!j.contains("weights")) return std::vector<double>(n, 1.0);
    std::vector<double> w = number_list(j.at("weights"), path + ".weights");
    if (static_cast<int>(w.size()) != n)
      throw SpecError(path + ".weights", "expected " + std::to_string(n) + " weights");
    for (double v : w)
      if (v < 0.0) throw SpecError(path + ".weights", "weights must be nonnegative");
    return w;
  };
  if (kind == "weighted_l2") return Seminorm::weighted_l2(weights());
  if (kind == "weighted_linf") return Seminorm::weighted_linf(weights());
  if (kind == "quotient_l2") return Seminorm::quotient_l2(matrix(require(j, "projection", path), path + ".projection", n));
  if (kind == "matrix_op") {
    const int b = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (b * b != n) throw SpecError(path, "matrix_op needs a square representation dimension");
    return Seminorm::matrix_op(b);
  }
  throw SpecError(path + ".kind", "unknown seminorm kind '" + kind +
                                      "'; known: weighted_l2 weighted_linf quotient_l2 matrix_op");
}

/// Entries {alpha: [..], re, im} (ordered form) or {word: [..], re, im}
/// (free form, letters 1-based, straightened through the algebra).
inline OrderedPoly ordered_poly(const json& j, const LieAlgebra& g, const std::string& path) {
  const int d = g.dim();
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a nonempty array of terms");
  OrderedPoly p(d);
  EnvElement free_terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) throw SpecError(tp, "expected an object");
    const double re = j[i].contains("re") ? number(j[i]["re"], tp + ".re") : 0.0;
    const double im = j[i].contains("im") ? number(j[i]["im"], tp + ".im") : 0.0;
    const bool has_alpha = j[i].contains("alpha"), has_word = j[i].contains("word");
    if (has_alpha == has_word) throw SpecError(tp, "expected exactly one of 'alpha' or 'word'");
    const json& idx = has_alpha ? j[i]["alpha"] : j[i]["word"];
    const std::string ip = tp + (has_alpha ? ".alpha" : ".word");
    const std::size_t cap = has_alpha ? 64 : 12;
    if (!idx.is_array() || idx.size() > cap)
      throw SpecError(ip, "expected an array of at most " + std::to_string(cap) + " integers");
    std::vector<int> v;
    for (const auto& a : idx) {
      if (!a.is_number_integer()) throw SpecError(ip, "expected integers");
      const long long x = a.get<long long>();
      if (has_alpha ? (x < 0 || x > 64) : (x < 1 || x > d))
        throw SpecError(ip, has_alpha ? "exponents must lie in 0..64" : "letters must lie in 1.." + std::to_string(d));
      v.push_back(static_cast<int>(has_alpha ? x : x - 1));
    }
    if (has_alpha) {
      if (static_cast<int>(v.size()) != d) throw SpecError(ip, "expected " + std::to_string(d) + " exponents");
      p.add(v, cplx(re, im));
    } else {
      free_terms.add(v, cplx(re, im));
    }
  }
  const OrderedPoly straightened = pbw_normal_form(g, free_terms);
  for (const auto& [alpha, c] : straightened.terms()) p.add(alpha, c);
  return p;
}

inline json ordered_poly_json(const OrderedPoly& p) {
  json terms = json::array();
  for (const auto& [alpha, c] : p.terms()) terms.push_back(json{{"alpha", alpha}, {"re", c.real()}, {"im", c.imag()}});
  return terms;
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline std::vector<double> default_t_grid() { return linear_grid(-2.0, 2.0, 64); }

/// Parses and validates a problem document. Missing optional fields are
/// filled with defaults and listed in `defaulted`.
inline ProblemSpec parse_spec_json(const json& j) {
  if (!j.is_object()) throw SpecError("", "top level must be an object");
  static const std::vector<std::string> known = {"algebra", "representation", "seminorms", "elliptic_operator",
                                                 "grids",   "tolerances",     "seed"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw SpecError(key, "unknown field");

  ProblemSpec s;
  const json& alg = detail::require(j, "algebra", "");
  if (alg.is_string()) {
    s.algebra_fixture = alg.get<std::string>();
    s.algebra = fixtures::algebra(s.algebra_fixture);
  } else if (alg.is_object()) {
    const StructureTensor c = detail::tensor(detail::require(alg, "structure_constants", "algebra"),
                                             "algebra.structure_constants");
    const Report v = validate_algebra(c);
    if (!v.pass) throw SpecError("algebra.structure_constants", v.notes.empty() ? "not a Lie algebra" : v.notes.front());
    s.algebra = LieAlgebra(c, alg.contains("name") && alg["name"].is_string() ? alg["name"].get<std::string>() : "custom");
  } else {
    throw SpecError("algebra", "expected a fixture name or an object with structure_constants");
  }
  const int d = s.algebra.dim();

  const json& rep = detail::require(j, "representation", "");
  if (rep.is_string()) {
    if (s.algebra_fixture.empty())
      throw SpecError("representation", "fixture representations need a fixture algebra");
    s.representation_fixture = rep.get<std::string>();
    s.representation = fixtures::representation(s.algebra_fixture, s.representation_fixture);
  } else if (rep.is_object()) {
    const json& mats = detail::require(rep, "matrices", "representation");
    if (!mats.is_array() || static_cast<int>(mats.size()) != d)
      throw SpecError("representation.matrices", "expected " + std::to_string(d) + " matrices");
    if (!mats[0].is_array() || mats[0].empty()) throw SpecError("representation.matrices[0]", "expected a matrix");
    const int n = static_cast<int>(mats[0].size());
    s.representation.space_dim = n;
    for (int k = 0; k < d; ++k) {
      s.representation.matrices.push_back(
          detail::matrix(mats[k], "representation.matrices[" + std::to_string(k) + "]", n));
      s.representation.labels.push_back("B" + std::to_string(k + 1));
    }
  } else {
    throw SpecError("representation", "expected a fixture name or an object with matrices");
  }
  try {
    validate_rep(s.algebra, s.representation);
  } catch (const Error& e) {
    throw SpecError("representation", e.what());
  }
  const int n = s.representation.space_dim;

  if (!j.contains("seminorms") || (j["seminorms"].is_array() && j["seminorms"].empty())) {
    s.seminorm_specs = json::array({json{{"kind", "weighted_l2"}}});
    s.defaulted.push_back("seminorms");
  } else {
    if (!j["seminorms"].is_array()) throw SpecError("seminorms", "expected an array");
    s.seminorm_specs = j["seminorms"];
  }
  std::vector<Seminorm> leaves;
  for (std::size_t i = 0; i < s.seminorm_specs.size(); ++i)
    leaves.push_back(detail::seminorm(s.seminorm_specs[i], "seminorms[" + std::to_string(i) + "]", n));
  s.seminorms = saturate(SeminormFamily{leaves, false, 1});

  if (!j.contains("elliptic_operator") || j["elliptic_operator"] == "minus_laplacian") {
    s.minus_laplacian_operator = true;
    s.elliptic_operator = minus_laplacian(d);
    if (!j.contains("elliptic_operator")) s.defaulted.push_back("elliptic_operator");
  } else {
    s.minus_laplacian_operator = false;
    s.elliptic_operator = detail::ordered_poly(j["elliptic_operator"], s.algebra, "elliptic_operator");
    if (s.elliptic_operator.order() < 2) throw SpecError("elliptic_operator", "order must be at least 2");
  }

  const json grids = j.contains("grids") ? j["grids"] : json::object();
  if (!grids.is_object()) throw SpecError("grids", "expected an object");
  for (const auto& [key, value] : grids.items())
    if (key != "t" && key != "eps" && key != "mu" && key != "smoothing_t") throw SpecError("grids." + key, "unknown grid");
  auto grid = [&](const char* key, std::vector<double> fallback, double lo, double hi, bool open_lo) {
    if (!grids.contains(key)) {
      s.defaulted.push_back(std::string("grids.") + key);
      return fallback;
    }
    std::vector<double> g = detail::number_list(grids[key], std::string("grids.") + key);
    for (double v : g)
      if (v > hi || v < lo || (open_lo && v == lo))
        throw SpecError(std::string("grids.") + key, "value " + std::to_string(v) + " out of range");
    return g;
  };
  s.grids.t = grid("t", default_t_grid(), -50.0, 50.0, false);
  s.grids.eps = grid("eps", default_eps_grid(), 0.0, 1.0, true);
  s.grids.mu = grid("mu", default_mu_grid(), 0.0, 1e8, true);
  s.grids.smoothing_t = grid("smoothing_t", default_smoothing_grid(), 0.0, 1.0, true);

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw SpecError("tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      const double v = detail::number(value, "tolerances." + key);
      if (!(v > 0.0)) throw SpecError("tolerances." + key, "must be positive");
      if (key == "identity")
        s.tolerances.identity = v;
      else if (key == "duhamel")
        s.tolerances.duhamel = v;
      else
        throw SpecError("tolerances." + key, "unknown tolerance");
    }
    if (!t.contains("identity")) s.defaulted.push_back("tolerances.identity");
    if (!t.contains("duhamel")) s.defaulted.push_back("tolerances.duhamel");
  } else {
    s.defaulted.push_back("tolerances");
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SpecError("seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  } else {
    s.defaulted.push_back("seed");
  }
  return s;
}

inline ProblemSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw SpecError("", "malformed JSON", line, col);
  }
  return parse_spec_json(j);
}

inline ProblemSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

/// Canonical document with every default written out; parsing it gives the
/// same spec back.
inline json emit_spec(const ProblemSpec& s) {
  json j;
  if (!s.algebra_fixture.empty()) {
    j["algebra"] = s.algebra_fixture;
  } else {
    j["algebra"] = json{{"name", s.algebra.name()}, {"structure_constants", s.algebra.tensor()}};
  }
  if (!s.representation_fixture.empty()) {
    j["representation"] = s.representation_fixture;
  } else {
    json mats = json::array();
    for (const Mat& m : s.representation.matrices) mats.push_back(detail::matrix_json(m));
    j["representation"] = json{{"matrices", mats}};
  }
  j["seminorms"] = s.seminorm_specs;
  j["elliptic_operator"] =
      s.minus_laplacian_operator ? json("minus_laplacian") : detail::ordered_poly_json(s.elliptic_operator);
  j["grids"] = json{{"t", s.grids.t}, {"eps", s.grids.eps}, {"mu", s.grids.mu}, {"smoothing_t", s.grids.smoothing_t}};
  j["tolerances"] = json{{"identity", s.tolerances.identity}, {"duhamel", s.tolerances.duhamel}};
  j["seed"] = s.seed;
  return j;
}

/// JSON Schema of the problem document.
inline json problem_schema() {
  const json number_list = {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 1}};
  const json entry = {{"oneOf", json::array({{{"type", "number"}},
                                             {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2},
                                              {"maxItems", 2}}})}};
  const json matrix = {{"type", "array"}, {"items", {{"type", "array"}, {"items", entry}}}};
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "liexp problem"},
      {"type", "object"},
      {"additionalProperties", false},
      {"required", json::array({"algebra", "representation"})},
      {"properties",
       {{"algebra",
         {{"oneOf", json::array({{{"type", "string"}, {"description", "heisenberg | so3 | sl2 | abelian-<n>"}},
                                 {{"type", "object"},
                                  {"required", json::array({"structure_constants"})},
                                  {"properties",
                                   {{"name", {{"type", "string"}}},
                                    {"structure_constants",
                                     {{"type", "array"},
                                      {"description", "c[i][j][k]: coefficient of e_k in [e_i, e_j]"},
                                      {"items", {{"type", "array"}, {"items", number_list}}}}}}}}})}}},
        {"representation",
         {{"oneOf", json::array({{{"type", "string"}, {"description", "fixture name, see `liexp fixtures`"}},
                                 {{"type", "object"},
                                  {"required", json::array({"matrices"})},
                                  {"properties", {{"matrices", {{"type", "array"}, {"items", matrix}}}}}}})}}},
        {"seminorms",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"required", json::array({"kind"})},
            {"properties",
             {{"kind", {{"enum", json::array({"weighted_l2", "weighted_linf", "quotient_l2", "matrix_op"})}}},
              {"weights", number_list},
              {"projection", matrix}}}}}}},
        {"elliptic_operator",
         {{"oneOf", json::array({{{"const", "minus_laplacian"}},
                                 {{"type", "array"},
                                  {"items",
                                   {{"type", "object"},
                                    {"properties",
                                     {{"alpha", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 0}}}}},
                                      {"word", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 1}}}}},
                                      {"re", {{"type", "number"}}},
                                      {"im", {{"type", "number"}}}}}}}}})}}},
        {"grids",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"t", number_list}, {"eps", number_list}, {"mu", number_list}, {"smoothing_t", number_list}}}}},
        {"tolerances",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"identity", {{"type", "number"}}}, {"duhamel", {{"type", "number"}}}}}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}}}}};
}

}  // namespace liexp
