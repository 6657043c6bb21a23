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
#ifndef DPGRAPH_GRAPH_MODEL_HPP_
#define DPGRAPH_GRAPH_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpgraph/error.hpp"

namespace dpgraph {

using NodeId = std::uint32_t;

// Unordered node pair, stored with u <= v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class EdgeClass { kPublic, kPrivate };

inline const char* to_string(EdgeClass c) {
  return c == EdgeClass::kPublic ? "pub" : "pri";
}

// Undirected graph with edges partitioned into a public and a private class.
//
// Edge lists are canonicalized (u <= v, sorted, de-duplicated within a class)
// but not validated: self-loops, out-of-range endpoints and dual-class pairs
// are kept so that validate_graph() can report them. The node sets V_pub and
// V_pri are derived from incidence and ignore out-of-range endpoints.
class PrivacyGraph {
 public:
  PrivacyGraph() = default;

  PrivacyGraph(std::size_t n, std::vector<Edge> pub_edges,
               std::vector<Edge> pri_edges)
      : n_(n),
        pub_edges_(canonical(std::move(pub_edges))),
        pri_edges_(canonical(std::move(pri_edges))) {
    is_pub_node_ = incidence(pub_edges_);
    is_pri_node_ = incidence(pri_edges_);
  }

  std::size_t node_count() const { return n_; }
  const std::vector<Edge>& pub_edges() const { return pub_edges_; }
  const std::vector<Edge>& pri_edges() const { return pri_edges_; }

  bool is_pub_node(NodeId v) const { return v < n_ && is_pub_node_[v]; }
  bool is_pri_node(NodeId v) const { return v < n_ && is_pri_node_[v]; }
  const std::vector<bool>& pub_mask() const { return is_pub_node_; }
  const std::vector<bool>& pri_mask() const { return is_pri_node_; }

  std::vector<NodeId> pub_nodes() const { return members(is_pub_node_); }
  std::vector<NodeId> pri_nodes() const { return members(is_pri_node_); }

  bool has_pub_edge(Edge e) const {
    return std::binary_search(pub_edges_.begin(), pub_edges_.end(), e);
  }
  bool has_pri_edge(Edge e) const {
    return std::binary_search(pri_edges_.begin(), pri_edges_.end(), e);
  }
  bool has_edge(Edge e) const { return has_pub_edge(e) || has_pri_edge(e); }

  // Subgraph with only the public edges (same node set).
  PrivacyGraph public_subgraph() const { return {n_, pub_edges_, {}}; }

  friend bool operator==(const PrivacyGraph& a, const PrivacyGraph& b) {
    return a.n_ == b.n_ && a.pub_edges_ == b.pub_edges_ &&
           a.pri_edges_ == b.pri_edges_;
  }

 private:
  static std::vector<Edge> canonical(std::vector<Edge> edges) {
    for (Edge& e : edges) e = Edge(e.u, e.v);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
  }

  std::vector<bool> incidence(const std::vector<Edge>& edges) const {
    std::vector<bool> mask(n_, false);
    for (const Edge& e : edges) {
      if (e.u == e.v) continue;
      if (e.u < n_) mask[e.u] = true;
      if (e.v < n_) mask[e.v] = true;
    }
    return mask;
  }

  static std::vector<NodeId> members(const std::vector<bool>& mask) {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) out.push_back(static_cast<NodeId>(i));
    return out;
  }

  std::size_t n_ = 0;
  std::vector<Edge> pub_edges_;
  std::vector<Edge> pri_edges_;
  std::vector<bool> is_pub_node_;
  std::vector<bool> is_pri_node_;
};

// Returns one message per invariant violation; empty iff the graph is valid.
inline std::vector<std::string> validate_graph(const PrivacyGraph& g) {
  std::vector<std::string> report;
  const std::size_t n = g.node_count();
  auto check = [&](const std::vector<Edge>& edges, const char* cls) {
    for (const Edge& e : edges) {
      if (e.u == e.v) report.push_back("self-loop at " + std::to_string(e.u));
      if (e.v >= n) {
        report.push_back(std::string("endpoint out of range in ") + cls +
                         " edge (" + std::to_string(e.u) + "," +
                         std::to_string(e.v) + ")");
      }
    }
  };
  check(g.pub_edges(), "pub");
  check(g.pri_edges(), "pri");
  // Both lists are sorted, so a merge finds the shared pairs.
  std::vector<Edge> shared;
  std::set_intersection(g.pub_edges().begin(), g.pub_edges().end(),
                        g.pri_edges().begin(), g.pri_edges().end(),
                        std::back_inserter(shared));
  for (const Edge& e : shared) {
    report.push_back("dual-class edge (" + std::to_string(e.u) + "," +
                     std::to_string(e.v) + ")");
  }
  return report;
}

// Dense row-major n x d matrix of per-node features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
      throw ValidationError("feature matrix: value count does not match shape");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Per-column min-max scaling to [0, 1]. Constant columns map to 0.
inline FeatureMatrix normalize_features(const FeatureMatrix& raw) {
  if (raw.rows() == 0 || raw.cols() == 0)
    throw ValidationError("normalize_features: empty matrix");
  FeatureMatrix out(raw.rows(), raw.cols());
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    double lo = raw.at(0, c);
    double hi = raw.at(0, c);
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double x = raw.at(r, c);
      if (!std::isfinite(x)) {
        throw ValidationError("normalize_features: non-finite value in column " +
                              std::to_string(c));
      }
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double range = hi - lo;
    for (std::size_t r = 0; r < raw.rows(); ++r)
      out.at(r, c) = range > 0.0 ? (raw.at(r, c) - lo) / range : 0.0;
  }
  return out;
}

}  // namespace dpgraph

#endif  // DPGRAPH_GRAPH_MODEL_HPP_
