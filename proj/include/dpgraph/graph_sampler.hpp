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
#ifndef DPGRAPH_GRAPH_SAMPLER_HPP_
#define DPGRAPH_GRAPH_SAMPLER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/rng.hpp"

namespace dpgraph {

// Draws an edge for every unordered pair of private nodes with probability
// ptilde at the pair's lowest common ancestor. The pairs whose LCA is r are
// exactly (private leaves under left(r)) x (private leaves under right(r)), so
// each internal node is visited once with its own split stream.
inline std::vector<Edge> sample_private_graph(const Dendrogram& d,
                                              const std::vector<bool>& pri_mask,
                                              const RngStream& rng) {
  if (!d.has_stats()) throw ValidationError("sample_private_graph: stats missing");
  if (pri_mask.size() != d.leaf_count())
    throw ValidationError("sample_private_graph: mask size mismatch");
  auto private_leaves = [&](int id) {
    std::vector<NodeId> out;
    for (NodeId x : d.leaves_under(id))
      if (pri_mask[x]) out.push_back(x);
    return out;
  };
  std::vector<Edge> edges;
  for (int id = d.first_internal(); id < static_cast<int>(d.node_count()); ++id) {
    const double p = d.stats_at(id).ptilde;
    if (p <= 0.0) continue;
    const std::vector<NodeId> left = private_leaves(d.left(id));
    if (left.empty()) continue;
    const std::vector<NodeId> right = private_leaves(d.right(id));
    RngStream node_rng = rng.split(static_cast<std::uint64_t>(id));
    for (NodeId x : left) {
      for (NodeId y : right) {
        if (p >= 1.0 || node_rng.bernoulli(p)) edges.emplace_back(x, y);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

struct SanitizedGraph {
  PrivacyGraph graph;  // public edges verbatim, sampled edges as private
  double eps_e1 = 0.0;
  double eps_e2 = 0.0;
  std::uint64_t seed = 0;

  double eps_e() const { return eps_e1 + eps_e2; }
};

// E_pub union sampled; a sampled pair that is already public stays public.
inline SanitizedGraph merge(const PrivacyGraph& g,
                            const std::vector<Edge>& sampled_pri, double eps_e1,
                            double eps_e2, std::uint64_t seed) {
  std::vector<Edge> pri;
  pri.reserve(sampled_pri.size());
  for (const Edge& e : sampled_pri) {
    if (!g.is_pri_node(e.u) || !g.is_pri_node(e.v) || e.u == e.v) {
      throw ValidationError("merge: sampled edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ") leaves the private node set");
    }
    if (!g.has_pub_edge(e)) pri.push_back(e);
  }
  return {PrivacyGraph(g.node_count(), g.pub_edges(), std::move(pri)), eps_e1,
          eps_e2, seed};
}

}  // namespace dpgraph

#endif  // DPGRAPH_GRAPH_SAMPLER_HPP_
