// Copyright 2026 The schur-stream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON input formats.
//
//   complex   : 0.5 | [re, im] | {"re": .., "im": ..}
//   vector    : [complex, ...]
//   matrix    : [[complex, ...], ...]   (row major)
//   stream    : [element, ...] | {"stream": [element, ...]}
//               | {"iid": {"state": vector | "rho": matrix, "n": N}}
//   element   : vector | {"state": vector} | {"rho": matrix}
//   state     : vector | {"state": vector} | {"rho": matrix}

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "schur/common.hpp"
#include "schur/sampler.hpp"

namespace schur::io {

using json = nlohmann::ordered_json;

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + what + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

inline cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object() && j.contains("re")) {
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    return {j.at("re").get<double>(), im};
  }
  throw ValidationError(where + ": expected a number, [re, im] or {\"re\", \"im\"}");
}

inline CVector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline CMatrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw ValidationError(where + ": matrix must be square");
    }
    for (Eigen::Index c = 0; c < rows; ++c)
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline QuditInput parse_element(const json& j, const std::string& where) {
  if (j.is_object()) {
    if (j.contains("rho")) return QuditInput::mixed(parse_matrix(j.at("rho"), where + ".rho"));
    if (j.contains("state")) return QuditInput::pure(parse_vector(j.at("state"), where + ".state"));
    throw ValidationError(where + ": expected \"state\" or \"rho\"");
  }
  return QuditInput::pure(parse_vector(j, where));
}

/// Parses and validates a stream of d-dimensional qudits.
inline Stream parse_stream(const json& j, int d) {
  Stream stream;
  if (j.is_object() && j.contains("iid")) {
    const json& iid = j.at("iid");
    if (!iid.is_object() || !iid.contains("n")) throw ValidationError("iid: expected {\"n\": N, ...}");
    const json& nj = iid.at("n");
    if (!nj.is_number_integer() || nj.get<long>() < 1) throw ValidationError("iid.n must be a positive integer");
    QuditInput element = parse_element(iid, "iid");
    stream.assign(nj.get<std::size_t>(), element);
  } else {
    const json& list = j.is_object() && j.contains("stream") ? j.at("stream") : j;
    if (!list.is_array()) throw ValidationError("stream: expected an array of qudit states");
    for (std::size_t i = 0; i < list.size(); ++i)
      stream.push_back(parse_element(list[i], "stream[" + std::to_string(i) + "]"));
  }
  validate_stream(stream, d);
  return stream;
}

using FullState = std::variant<CVector, CMatrix>;

inline FullState parse_state(const json& j) {
  if (j.is_object() && j.contains("rho")) return parse_matrix(j.at("rho"), "rho");
  if (j.is_object() && j.contains("state")) return parse_vector(j.at("state"), "state");
  if (j.is_array()) return parse_vector(j, "state");
  throw ValidationError("state: expected an amplitude array, {\"state\": ...} or {\"rho\": ...}");
}

/// %.17g: round-trips every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

inline json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_pair(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_pair(v(i)));
  return out;
}

inline std::string big_string(const BigInt& v) { return v.str(); }

/// JSON Schemas (draft-07) for the input files and reports.
inline json schemas() {
  json complex = {{"oneOf",
                   json::array({{{"type", "number"}},
                                {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2}, {"maxItems", 2}},
                                {{"type", "object"},
                                 {"properties", {{"re", {{"type", "number"}}}, {"im", {{"type", "number"}}}}},
                                 {"required", json::array({"re"})}}})}};
  json vector = {{"type", "array"}, {"items", {{"$ref", "#/definitions/complex"}}}, {"minItems", 1}};
  json matrix = {{"type", "array"}, {"items", {{"$ref", "#/definitions/vector"}}}, {"minItems", 1}};
  json element = {{"oneOf", json::array({{{"$ref", "#/definitions/vector"}},
                                         {{"type", "object"},
                                          {"properties", {{"state", {{"$ref", "#/definitions/vector"}}}}},
                                          {"required", json::array({"state"})}},
                                         {{"type", "object"},
                                          {"properties", {{"rho", {{"$ref", "#/definitions/matrix"}}}}},
                                          {"required", json::array({"rho"})}}})}};
  json defs = {{"complex", complex}, {"vector", vector}, {"matrix", matrix}, {"element", element}};

  json stream = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "schur stream input"},
      {"definitions", defs},
      {"oneOf",
       json::array({{{"type", "array"}, {"items", {{"$ref", "#/definitions/element"}}}},
                    {{"type", "object"},
                     {"properties", {{"stream", {{"type", "array"}, {"items", {{"$ref", "#/definitions/element"}}}}}}},
                     {"required", json::array({"stream"})}},
                    {{"type", "object"},
                     {"properties",
                      {{"iid",
                        {{"type", "object"},
                         {"properties",
                          {{"n", {{"type", "integer"}, {"minimum", 1}}},
                           {"state", {{"$ref", "#/definitions/vector"}}},
                           {"rho", {{"$ref", "#/definitions/matrix"}}}}},
                         {"required", json::array({"n"})}}}}},
                     {"required", json::array({"iid"})}}})}};
  json state = {{"$schema", "http://json-schema.org/draft-07/schema#"},
                {"title", "schur full-state input"},
                {"definitions", defs},
                {"oneOf", json::array({{{"$ref", "#/definitions/vector"}},
                                       {{"type", "object"},
                                        {"properties", {{"state", {{"$ref", "#/definitions/vector"}}}}},
                                        {"required", json::array({"state"})}},
                                       {{"type", "object"},
                                        {"properties", {{"rho", {{"$ref", "#/definitions/matrix"}}}}},
                                        {"required", json::array({"rho"})}}})}};
  json report = {{"$schema", "http://json-schema.org/draft-07/schema#"},
                 {"title", "schur report (common envelope)"},
                 {"type", "object"},
                 {"properties",
                  {{"tool", {{"const", "schur"}}},
                   {"version", {{"type", "string"}}},
                   {"command", {{"enum", json::array({"sample", "dist", "full", "oracle", "cg", "resources"})}}},
                   {"config", {{"type", "object"}}},
                   {"seed", {{"type", {"integer", "null"}}}},
                   {"result", {{"type", "object"}}}}},
                 {"required", json::array({"tool", "version", "command", "config", "seed", "result"})}};
  return {{"stream", stream}, {"state", state}, {"report", report}};
}

}  // namespace schur::io
