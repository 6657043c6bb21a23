//
// Copyright 2026 The dpgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#ifndef DPGRAPH_IO_HPP_
#define DPGRAPH_IO_HPP_

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/graph_model.hpp"

namespace dpgraph {

namespace internal {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return value;
}

inline std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string line_error(const std::string& what, std::size_t line,
                              const std::string& msg) {
  return what + ": line " + std::to_string(line) + ": " + msg;
}

}  // namespace internal

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path);
  out << contents;
  if (!out) throw ValidationError("write failed for " + path);
}

// 64-bit FNV-1a, used to identify inputs across runs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Edge-list text:
//   #nodes <n>
//   u<TAB>v<TAB>pub|pri
// Other lines starting with '#' and blank lines are ignored. A line with only
// u<TAB>v is an unlabeled (public) edge, as written by stripped releases.
inline PrivacyGraph parse_graph(std::string_view text) {
  std::optional<std::size_t> n;
  std::vector<Edge> pub, pri;
  std::set<Edge> seen;
  std::size_t line_no = 0;
  for (std::string_view raw : internal::split(text, '\n')) {
    ++line_no;
    const std::string_view line = internal::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.substr(0, 6) == "#nodes") {
        if (n) throw ValidationError(internal::line_error("graph", line_no, "second #nodes header"));
        const auto v = internal::parse_number<std::size_t>(line.substr(6));
        if (!v) throw ValidationError(internal::line_error("graph", line_no, "bad #nodes header"));
        n = *v;
      }
      continue;
    }
    if (!n) throw ValidationError(internal::line_error("graph", line_no, "edge before #nodes header"));
    const auto fields = internal::split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3)
      throw ValidationError(internal::line_error("graph", line_no, "expected u<TAB>v<TAB>pub|pri"));
    const auto u = internal::parse_number<NodeId>(fields[0]);
    const auto v = internal::parse_number<NodeId>(fields[1]);
    if (!u || !v) throw ValidationError(internal::line_error("graph", line_no, "bad node id"));
    if (*u >= *n || *v >= *n)
      throw ValidationError(internal::line_error("graph", line_no, "node id out of range"));
    if (*u == *v) throw ValidationError(internal::line_error("graph", line_no, "self-loop"));
    EdgeClass cls = EdgeClass::kPublic;
    if (fields.size() == 3) {
      const std::string_view tag = internal::trim(fields[2]);
      if (tag == "pri") {
        cls = EdgeClass::kPrivate;
      } else if (tag != "pub") {
        throw ValidationError(internal::line_error("graph", line_no, "edge class must be pub or pri"));
      }
    }
    const Edge e(*u, *v);
    if (!seen.insert(e).second)
      throw ValidationError(internal::line_error("graph", line_no, "duplicate edge"));
    (cls == EdgeClass::kPublic ? pub : pri).push_back(e);
  }
  if (!n) throw ValidationError("graph: missing #nodes header");
  return PrivacyGraph(*n, std::move(pub), std::move(pri));
}

inline PrivacyGraph load_graph(const std::string& path) {
  return parse_graph(read_file(path));
}

// Canonical text: header, then all edges sorted by (u, v) with u < v.
inline std::string format_graph(const PrivacyGraph& g, bool strip_labels = false) {
  std::vector<std::pair<Edge, EdgeClass>> all;
  for (const Edge& e : g.pub_edges()) all.emplace_back(e, EdgeClass::kPublic);
  for (const Edge& e : g.pri_edges()) all.emplace_back(e, EdgeClass::kPrivate);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "#nodes " + std::to_string(g.node_count()) + "\n";
  for (const auto& [e, cls] : all) {
    out += std::to_string(e.u);
    out += '\t';
    out += std::to_string(e.v);
    if (!strip_labels) {
      out += '\t';
      out += to_string(cls);
    }
    out += '\n';
  }
  return out;
}

inline void save_graph(const PrivacyGraph& g, const std::string& path,
                       bool strip_labels = false) {
  write_file(path, format_graph(g, strip_labels));
}

namespace internal {

inline std::vector<double> parse_row(std::string_view line, std::size_t line_no,
                                     const char* what) {
  std::vector<double> row;
  for (std::string_view cell : split(line, ',')) {
    const auto v = parse_number<double>(cell);
    if (!v) {
      throw ValidationError(line_error(what, line_no, "non-numeric cell '" +
                                                          std::string(trim(cell)) + "'"));
    }
    row.push_back(*v);
  }
  return row;
}

}  // namespace internal

// Comma-separated rows, one per node. '#' lines and blank lines are ignored.
inline FeatureMatrix parse_features(std::string_view text,
                                    std::optional<std::size_t> expected_rows = {}) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0, line_no = 0;
  for (std::string_view raw : internal::split(text, '\n')) {
    ++line_no;
    const std::string_view line = internal::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<double> row = internal::parse_row(line, line_no, "features");
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ValidationError(internal::line_error("features", line_no,
                                                 "expected " + std::to_string(cols) + " columns"));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ValidationError("features: no rows");
  if (expected_rows && rows != *expected_rows) {
    throw ValidationError("features: " + std::to_string(rows) + " rows for a graph with " +
                          std::to_string(*expected_rows) + " nodes");
  }
  return FeatureMatrix(rows, cols, std::move(values));
}

inline FeatureMatrix load_features(const std::string& path,
                                   std::optional<std::size_t> expected_rows = {}) {
  return parse_features(read_file(path), expected_rows);
}

inline std::string format_features(const FeatureMatrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += internal::format_double(m.at(r, c));
    }
    out += '\n';
  }
  return out;
}

inline void save_features(const FeatureMatrix& m, const std::string& path) {
  write_file(path, format_features(m));
}

// Embedding z, masked embedding z^ and raw SHAP values, one row each:
//   #z
//   0.2,0.5,0.9
//   #z_masked
//   0.1,0.5,0.6
//   #shap
//   3,-1,1
struct ScoreInputs {
  std::vector<double> z;
  std::vector<double> z_masked;
  std::vector<double> shap;

  std::size_t dimension() const { return z.size(); }
};

inline ScoreInputs parse_scores(std::string_view text,
                                std::optional<std::size_t> expected_dim = {}) {
  ScoreInputs s;
  std::vector<double>* target = nullptr;
  bool has_z = false, has_masked = false, has_shap = false;
  std::size_t line_no = 0;
  for (std::string_view raw : internal::split(text, '\n')) {
    ++line_no;
    const std::string_view line = internal::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view name = internal::trim(line.substr(1));
      if (name == "z") {
        target = &s.z, has_z = true;
      } else if (name == "z_masked") {
        target = &s.z_masked, has_masked = true;
      } else if (name == "shap") {
        target = &s.shap, has_shap = true;
      } else {
        target = nullptr;
      }
      continue;
    }
    if (target == nullptr)
      throw ValidationError(internal::line_error("scores", line_no, "row outside a named section"));
    if (!target->empty())
      throw ValidationError(internal::line_error("scores", line_no, "section has more than one row"));
    *target = internal::parse_row(line, line_no, "scores");
  }
  if (!has_z || !has_masked || !has_shap)
    throw ValidationError("scores: need #z, #z_masked and #shap sections");
  if (s.z.size() != s.z_masked.size() || s.z.size() != s.shap.size())
    throw ValidationError("scores: sections differ in length");
  if (expected_dim && s.z.size() != *expected_dim) {
    throw ValidationError("scores: dimension " + std::to_string(s.z.size()) +
                          " does not match " + std::to_string(*expected_dim) +
                          " feature columns");
  }
  return s;
}

inline ScoreInputs load_scores(const std::string& path,
                               std::optional<std::size_t> expected_dim = {}) {
  return parse_scores(read_file(path), expected_dim);
}

}  // namespace dpgraph

#endif  // DPGRAPH_IO_HPP_
