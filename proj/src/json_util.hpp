/*
 * qrsum - query-relevant video summarization
 *
 * Licensed under the terms of the Apache 2.0 License.
 * See LICENSE file in the project root for terms.
 */

#pragma once

#include "qrsum/common.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace qrsum::jsonio {

using json = nlohmann::json;

inline json read_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open file: " + path);
  try {
    return json::parse(file);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const json& value) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << value.dump(2) << '\n';
  if (!file) throw std::runtime_error("write failed: " + path);
}

inline double as_finite(const json& value, const std::string& context) {
  if (!value.is_number()) {
    throw std::runtime_error(context + ": expected a number");
  }
  const double d = value.get<double>();
  if (!std::isfinite(d)) {
    throw std::runtime_error(context + ": value must be finite");
  }
  return d;
}

inline Vector to_vector(const json& value, const std::string& context) {
  if (!value.is_array()) {
    throw std::runtime_error(context + ": expected an array");
  }
  Vector v(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    v[static_cast<int>(i)] = as_finite(value[i], context);
  }
  return v;
}

inline Matrix to_matrix(const json& value, const std::string& context) {
  if (!value.is_array() || value.empty()) {
    throw std::runtime_error(context + ": expected a non-empty array of rows");
  }
  const std::size_t cols = value[0].size();
  Matrix m(value.size(), cols);
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_array() || value[i].size() != cols) {
      throw std::runtime_error(context + ": ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<int>(i), static_cast<int>(j)) =
          as_finite(value[i][j], context);
    }
  }
  return m;
}

inline json from_vector(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline json from_matrix(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

/// Accepts either a bare array or an object wrapping the array under `key`
/// (the wrapped form carries a `config` header written by the CLI).
inline json payload(const json& doc, const std::string& key,
                    const std::string& path) {
  if (doc.is_array()) return doc;
  if (doc.is_object() && doc.contains(key) && doc[key].is_array()) {
    return doc[key];
  }
  throw std::runtime_error(path + ": expected an array or an object with '" +
                           key + "'");
}

}  // namespace qrsum::jsonio
