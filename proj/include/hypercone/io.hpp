#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "frames.hpp"
#include "majorize.hpp"
#include "system.hpp"

namespace hypercone::io {

// Insertion order is preserved so that serialized documents are
// byte-reproducible across runs with identical content.
using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string(what) + " is missing required field \"" + key + "\"");
  return j.at(key);
}

inline Eigen::VectorXd dense_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  int i = 0;
  for (const auto& entry : j) {
    if (!entry.is_number()) throw std::invalid_argument(std::string(what) + " must contain only numbers");
    v[i++] = entry.get<double>();
  }
  return v;
}

inline Json json_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Polynomial: {"dim": d, "terms": [{"exp": [ints], "coef": number} ...]}
// --------------------------------------------------------------------------

inline Json poly_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [exp, coef] : p.terms()) {
    Json t;
    t["exp"] = exp;
    t["coef"] = coef;
    terms.push_back(std::move(t));
  }
  Json out;
  out["dim"] = p.dim();
  out["terms"] = std::move(terms);
  return out;
}

inline Polynomial poly_from_json(const Json& j) {
  const int dim = detail::require(j, "dim", "polynomial").get<int>();
  Polynomial p(dim);
  const Json& terms = detail::require(j, "terms", "polynomial");
  if (!terms.is_array()) throw std::invalid_argument("polynomial \"terms\" must be an array");
  for (const auto& t : terms) {
    const Json& je = detail::require(t, "exp", "polynomial term");
    if (!je.is_array()) throw std::invalid_argument("term \"exp\" must be an array of integers");
    Exponents exp;
    for (const auto& e : je) {
      if (!e.is_number_integer()) throw std::invalid_argument("term \"exp\" must contain integers");
      exp.push_back(e.get<int>());
    }
    const Json& jc = detail::require(t, "coef", "polynomial term");
    if (!jc.is_number()) throw std::invalid_argument("term \"coef\" must be a number");
    p.add_term(exp, jc.get<double>());
  }
  if (!p.empty() && !p.homogeneity().degree) {
    std::string sums;
    for (const auto& [exp, c] : p.terms()) sums += " " + std::to_string(Polynomial::total_degree(exp));
    throw std::invalid_argument("loaded polynomial is not homogeneous; term degrees:" + sums);
  }
  return p;
}

// --------------------------------------------------------------------------
// System: {"dim", "poly", "direction", "tol": {"root","rank","cone"}?}
// --------------------------------------------------------------------------

inline Json system_to_json(const SystemDef& sys) {
  Json out;
  out["dim"] = sys.dim();
  out["poly"] = poly_to_json(sys.poly());
  out["direction"] = detail::json_vector(sys.direction());
  Json tol;
  tol["root"] = sys.tol().root_tol;
  tol["rank"] = sys.tol().rank_tol;
  tol["cone"] = sys.tol().cone_tol;
  out["tol"] = std::move(tol);
  return out;
}

inline SystemDef system_from_json(const Json& j) {
  const int dim = detail::require(j, "dim", "system").get<int>();
  Polynomial p = poly_from_json(detail::require(j, "poly", "system"));
  if (p.dim() != dim)
    throw std::invalid_argument("system \"dim\" disagrees with the polynomial dimension");
  const Eigen::VectorXd e = detail::dense_vector(detail::require(j, "direction", "system"), "direction");
  ToleranceProfile tol;
  if (j.contains("tol")) {
    const Json& jt = j.at("tol");
    if (jt.contains("root")) tol.root_tol = jt.at("root").get<double>();
    if (jt.contains("rank")) tol.rank_tol = jt.at("rank").get<double>();
    if (jt.contains("cone")) tol.cone_tol = jt.at("cone").get<double>();
  }
  return SystemDef(std::move(p), e, tol);
}

// --------------------------------------------------------------------------
// Frame: {"elements": [[numbers]...], "kind": "scaled"|"jordan"}
// --------------------------------------------------------------------------

inline Json frame_to_json(const FrameSet& f) {
  Json elements = Json::array();
  for (const auto& c : f.elements) elements.push_back(detail::json_vector(c));
  Json out;
  out["elements"] = std::move(elements);
  out["kind"] = f.kind == FrameSet::Kind::Jordan ? "jordan" : "scaled";
  return out;
}

inline FrameSet frame_from_json(const Json& j) {
  FrameSet f;
  const Json& elements = detail::require(j, "elements", "frame");
  if (!elements.is_array()) throw std::invalid_argument("frame \"elements\" must be an array");
  for (const auto& e : elements) f.elements.push_back(detail::dense_vector(e, "frame element"));
  const std::string kind = detail::require(j, "kind", "frame").get<std::string>();
  if (kind == "jordan")
    f.kind = FrameSet::Kind::Jordan;
  else if (kind == "scaled")
    f.kind = FrameSet::Kind::Scaled;
  else
    throw std::invalid_argument("frame \"kind\" must be \"scaled\" or \"jordan\", got \"" + kind +
                                "\"");
  return f;
}

// --------------------------------------------------------------------------
// Tuple: {"elements": [[numbers]...]}; matrix: {"rows": [[numbers]...]}
// --------------------------------------------------------------------------

inline Json tuple_to_json(const ETuple& t) {
  Json elements = Json::array();
  for (const auto& a : t.elements) elements.push_back(detail::json_vector(a));
  Json out;
  out["elements"] = std::move(elements);
  return out;
}

inline ETuple tuple_from_json(const Json& j) {
  ETuple t;
  const Json& elements = detail::require(j, "elements", "tuple");
  if (!elements.is_array()) throw std::invalid_argument("tuple \"elements\" must be an array");
  for (const auto& e : elements) t.elements.push_back(detail::dense_vector(e, "tuple element"));
  return t;
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(detail::json_vector(m.row(r).transpose()));
  Json out;
  out["rows"] = std::move(rows);
  return out;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
  const Json& rows = detail::require(j, "rows", "matrix");
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("matrix \"rows\" must be a non-empty array");
  std::vector<Eigen::VectorXd> parsed;
  for (const auto& r : rows) parsed.push_back(detail::dense_vector(r, "matrix row"));
  Eigen::MatrixXd m(static_cast<int>(parsed.size()), parsed.front().size());
  for (std::size_t r = 0; r < parsed.size(); ++r) {
    if (parsed[r].size() != m.cols()) throw std::invalid_argument("matrix rows have unequal lengths");
    m.row(static_cast<int>(r)) = parsed[r].transpose();
  }
  return m;
}

inline Json vector_to_json(const Eigen::VectorXd& v) { return detail::json_vector(v); }

inline Eigen::VectorXd vector_from_json(const Json& j) { return detail::dense_vector(j, "vector"); }

// --------------------------------------------------------------------------
// Files and command-line points
// --------------------------------------------------------------------------

inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& ex) {
    throw std::invalid_argument("failed to parse " + path + ": " + ex.what());
  }
}

inline void save_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// Comma-separated decimals, e.g. "1,0,-2.5".
inline Eigen::VectorXd parse_point(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
      if (used != field.size()) throw std::invalid_argument("trailing characters");
      vals.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse coordinate \"" + field + "\" in point \"" + text +
                                  "\"");
    }
  }
  if (vals.empty()) throw std::invalid_argument("point \"" + text + "\" has no coordinates");
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
}

// Stable identity of a system: hash of its canonical serialization.
inline std::uint64_t system_hash(const SystemDef& sys) {
  return fnv1a(system_to_json(sys).dump());
}

}  // namespace hypercone::io
