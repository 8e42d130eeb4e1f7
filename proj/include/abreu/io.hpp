#pragma once

// JSON forms of polytopes and potentials.
//
//   polytope:  {"dim": n, "facets": [{"normal": [int...], "support": number | ["num", "den"]}, ...]}
//   potential: {"kind": "guillemin"}
//              {"kind": "parametrized", "coeffs": {"guillemin_scale": s, "terms": [{"exponents": [..], "coeff": c}, ...]}}
//              {"kind": "affine", "coeffs": {"a0": c, "a": [..]}}
//              {"kind": "pl", "coeffs": {"pieces": [{"a0": c, "a": [..]}, ...]}}

#include "abreu/error.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace abreu::io {

using nlohmann::json;

/// Parses text; syntax errors become ParseError with line and column.
inline json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                                           e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string());
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

inline const json& field(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) schema_error(ctx + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const std::string& ctx) {
  if (!j.is_number()) schema_error(ctx + ": expected a number");
  return j.get<double>();
}

inline long long integer_of(const json& j, const std::string& ctx) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (!s.empty() && end && *end == '\0') return v;
  }
  schema_error(ctx + ": expected an integer");
}

inline Vec vec_of(const json& j, int dim, const std::string& ctx) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    schema_error(ctx + ": expected an array of length " + std::to_string(dim));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = number(j[i], ctx);
  return v;
}

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline AffineFunction affine_of(const json& j, int dim, const std::string& ctx) {
  return {number(field(j, "a0", ctx), ctx + ".a0"), vec_of(field(j, "a", ctx), dim, ctx + ".a")};
}

}  // namespace detail

inline json affine_to_json(const AffineFunction& f) { return {{"a0", f.a0}, {"a", detail::vec_json(f.a)}}; }

inline std::vector<Facet> facets_from_json(const json& j, int& dim) {
  const std::string ctx = "polytope";
  const json& d = detail::field(j, "dim", ctx);
  if (!d.is_number_integer()) detail::schema_error(ctx + ".dim: expected an integer");
  dim = d.get<int>();
  if (dim < 1 || dim > kMaxDim) detail::schema_error(ctx + ".dim: must be 1, 2 or 3");
  const json& fs = detail::field(j, "facets", ctx);
  if (!fs.is_array()) detail::schema_error(ctx + ".facets: expected an array");
  std::vector<Facet> facets;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string fc = ctx + ".facets[" + std::to_string(i) + "]";
    const json& nrm = detail::field(fs[i], "normal", fc);
    if (!nrm.is_array() || static_cast<int>(nrm.size()) != dim)
      detail::schema_error(fc + ".normal: expected " + std::to_string(dim) + " integers");
    IVec l(dim);
    for (int k = 0; k < dim; ++k) {
      if (!nrm[k].is_number_integer()) detail::schema_error(fc + ".normal: entries must be integers");
      l(k) = nrm[k].get<long long>();
    }
    const json& sup = detail::field(fs[i], "support", fc);
    if (sup.is_array()) {
      if (sup.size() != 2) detail::schema_error(fc + ".support: rational must be [num, den]");
      const Rational r{detail::integer_of(sup[0], fc + ".support"), detail::integer_of(sup[1], fc + ".support")};
      if (r.den == 0) detail::schema_error(fc + ".support: zero denominator");
      facets.emplace_back(l, r);
    } else {
      facets.emplace_back(l, detail::number(sup, fc + ".support"));
    }
  }
  return facets;
}

/// Builds and validates the polytope; Delzant failures propagate as their own error kinds.
inline DelzantPolytope polytope_from_json(const json& j) {
  int dim = 0;
  auto facets = facets_from_json(j, dim);
  return DelzantPolytope(dim, std::move(facets));
}

inline json polytope_to_json(const DelzantPolytope& p) {
  json fs = json::array();
  for (const auto& f : p.facets()) {
    json nrm = json::array();
    for (Eigen::Index k = 0; k < f.normal.size(); ++k) nrm.push_back(f.normal(k));
    json sup = f.exact_support ? json::array({std::to_string(f.exact_support->num), std::to_string(f.exact_support->den)})
                               : json(f.support);
    fs.push_back({{"normal", nrm}, {"support", sup}});
  }
  return {{"dim", p.dim()}, {"facets", fs}};
}

inline Potential potential_from_json(const json& j, const DelzantPolytope& p) {
  const std::string ctx = "potential";
  const json& kind = detail::field(j, "kind", ctx);
  if (!kind.is_string()) detail::schema_error(ctx + ".kind: expected a string");
  const std::string k = kind.get<std::string>();
  const int n = p.dim();
  if (k == "guillemin") return ParametrizedPotential(p);
  const json& c = detail::field(j, "coeffs", ctx);
  if (k == "affine") return detail::affine_of(c, n, ctx + ".coeffs");
  if (k == "pl") {
    const json& pieces = detail::field(c, "pieces", ctx + ".coeffs");
    if (!pieces.is_array() || pieces.empty()) detail::schema_error(ctx + ".coeffs.pieces: expected a non-empty array");
    PLFunction f;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      f.pieces.push_back(detail::affine_of(pieces[i], n, ctx + ".coeffs.pieces[" + std::to_string(i) + "]"));
    return f;
  }
  if (k == "parametrized") {
    double scale = 1.0;
    if (c.contains("guillemin_scale")) scale = detail::number(c["guillemin_scale"], ctx + ".coeffs.guillemin_scale");
    Polynomial v(n);
    if (c.contains("terms")) {
      const json& terms = c["terms"];
      if (!terms.is_array()) detail::schema_error(ctx + ".coeffs.terms: expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tc = ctx + ".coeffs.terms[" + std::to_string(i) + "]";
        const json& e = detail::field(terms[i], "exponents", tc);
        if (!e.is_array() || static_cast<int>(e.size()) != n)
          detail::schema_error(tc + ".exponents: expected " + std::to_string(n) + " integers");
        Exponent ex{0, 0, 0};
        for (int a = 0; a < n; ++a) {
          if (!e[a].is_number_integer() || e[a].get<int>() < 0)
            detail::schema_error(tc + ".exponents: entries must be non-negative integers");
          ex[a] = e[a].get<int>();
        }
        if (v.find(ex) >= 0) detail::schema_error(tc + ": duplicate monomial");
        v.add_term(ex, detail::number(detail::field(terms[i], "coeff", tc), tc + ".coeff"));
      }
    }
    return ParametrizedPotential(p, v, scale);
  }
  detail::schema_error(ctx + ".kind: unknown kind \"" + k + "\"");
}

inline json potential_to_json(const Potential& u) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ParametrizedPotential>) {
          if (f.guillemin_scale == 1.0 && f.smooth.size() == 0) return {{"kind", "guillemin"}};
          json terms = json::array();
          for (std::size_t k = 0; k < f.smooth.size(); ++k) {
            json e = json::array();
            for (int a = 0; a < f.dim(); ++a) e.push_back(f.smooth.exponents()[k][a]);
            terms.push_back({{"exponents", e}, {"coeff", f.smooth.coeffs()(k)}});
          }
          return {{"kind", "parametrized"}, {"coeffs", {{"guillemin_scale", f.guillemin_scale}, {"terms", terms}}}};
        } else if constexpr (std::is_same_v<T, PLFunction>) {
          json pieces = json::array();
          for (const auto& piece : f.pieces) pieces.push_back(affine_to_json(piece));
          return {{"kind", "pl"}, {"coeffs", {{"pieces", pieces}}}};
        } else {
          return {{"kind", "affine"}, {"coeffs", affine_to_json(f)}};
        }
      },
      u);
}

/// Float text with 17 significant digits; always carries a '.' or exponent so it reads back as a float.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string t(buf);
  if (t.find_first_of(".eE") == std::string::npos) t += ".0";
  return t;
}

namespace detail {

inline void dump_into(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const std::string sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad + json(it.key()).dump() + sep;
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += close + '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        out += pad;
        dump_into(j[i], indent, depth + 1, out);
      }
      out += close + ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Like json::dump, but floats use format_double.
inline std::string dump(const json& j, int indent = -1) {
  std::string out;
  detail::dump_into(j, indent, 0, out);
  return out;
}

/// Resolves a file path, a file in $ABREU_KIT_PRESETS, or a built-in preset name.
inline DelzantPolytope load_polytope(const std::string& spec) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(spec)) return polytope_from_json(read_json_file(spec));
  if (const char* dir = std::getenv("ABREU_KIT_PRESETS")) {
    const fs::path candidate = fs::path(dir) / (spec + ".json");
    if (fs::is_regular_file(candidate)) return polytope_from_json(read_json_file(candidate));
  }
  if (auto p = presets::by_name(spec)) return *p;
  throw Error(ErrorKind::ParseError, "unknown polytope \"" + spec + "\" (not a file or preset)");
}

/// "guillemin" or a potential JSON file.
inline Potential load_potential(const std::string& spec, const DelzantPolytope& p) {
  if (spec == "guillemin") return ParametrizedPotential(p);
  if (!std::filesystem::is_regular_file(spec))
    throw Error(ErrorKind::ParseError, "unknown potential \"" + spec + "\" (not a file or \"guillemin\")");
  return potential_from_json(read_json_file(spec), p);
}

}  // namespace abreu::io
