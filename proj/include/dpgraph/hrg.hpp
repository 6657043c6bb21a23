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
#ifndef DPGRAPH_HRG_HPP_
#define DPGRAPH_HRG_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/rng.hpp"

namespace dpgraph {

// Counts and probabilities at one internal node r. Unbarred fields refer to
// public edges and to leaves in V_pub, barred fields to private edges and
// leaves in V_pri. A node in both sets is counted on both sides.
struct InternalStats {
  std::int64_t e = 0;
  std::int64_t ebar = 0;
  std::int64_t L = 0;
  std::int64_t R = 0;
  std::int64_t Lbar = 0;
  std::int64_t Rbar = 0;
  double p = 0.0;
  double pbar = 0.0;
  double ptilde = 0.0;

  std::int64_t N() const { return L * R; }
  std::int64_t Nbar() const { return Lbar * Rbar; }
};

enum class EdgeSide { kPublic, kPrivate };

// chi(tau) = tau log tau + (1 - tau) log(1 - tau), with 0 log 0 = 0.
inline double chi(double tau) {
  double out = 0.0;
  if (tau > 0.0) out += tau * std::log(tau);
  if (tau < 1.0) out += (1.0 - tau) * std::log1p(-tau);
  return out;
}

// N * chi(e / N) evaluated from integer counts; 0 when N = 0.
inline double node_log_likelihood(std::int64_t e, std::int64_t n_pairs) {
  if (n_pairs <= 0 || e <= 0 || e >= n_pairs) return 0.0;
  const double ed = static_cast<double>(e);
  const double nd = static_cast<double>(n_pairs);
  return ed * std::log(ed / nd) + (nd - ed) * std::log((nd - ed) / nd);
}

// Full binary tree over n leaves. Leaf i is graph node i; internal nodes have
// ids n .. 2n-2. Left/right order carries no meaning for the likelihood.
class Dendrogram {
 public:
  static constexpr int kNone = -1;

  Dendrogram() = default;

  // children[i] holds the two children of internal node n + i.
  Dendrogram(std::size_t n, const std::vector<std::array<int, 2>>& children,
             int root)
      : n_(n),
        left_(slots(n), kNone),
        right_(slots(n), kNone),
        parent_(slots(n), kNone),
        root_(root) {
    if (children.size() != n - 1)
      throw ValidationError("dendrogram: need n - 1 internal nodes");
    const int total = static_cast<int>(2 * n - 1);
    for (std::size_t i = 0; i < children.size(); ++i) {
      const int id = static_cast<int>(n + i);
      for (int c : children[i]) {
        if (c < 0 || c >= total || c == id)
          throw ValidationError("dendrogram: bad child reference");
        if (parent_[c] != kNone)
          throw ValidationError("dendrogram: node with two parents");
        parent_[c] = id;
      }
      left_[id] = children[i][0];
      right_[id] = children[i][1];
    }
    if (root_ < static_cast<int>(n) || root_ >= total || parent_[root_] != kNone)
      throw ValidationError("dendrogram: bad root");
    for (int id = 0; id < total; ++id) {
      if (id != root_ && parent_[id] == kNone)
        throw ValidationError("dendrogram: node without parent");
    }
    if (static_cast<std::size_t>(subtree_size(root_)) != 2 * n - 1)
      throw ValidationError("dendrogram: not a single tree");
  }

  std::size_t leaf_count() const { return n_; }
  std::size_t internal_count() const { return n_ - 1; }
  std::size_t node_count() const { return 2 * n_ - 1; }
  int root() const { return root_; }
  bool is_leaf(int id) const { return id < static_cast<int>(n_); }
  int left(int id) const { return left_[id]; }
  int right(int id) const { return right_[id]; }
  int parent(int id) const { return parent_[id]; }
  int sibling(int id) const {
    const int p = parent_[id];
    return left_[p] == id ? right_[p] : left_[p];
  }
  int first_internal() const { return static_cast<int>(n_); }
  std::size_t internal_index(int id) const {
    return static_cast<std::size_t>(id) - n_;
  }

  // Leaves below id (id itself for a leaf), in left-to-right order.
  std::vector<NodeId> leaves_under(int id) const {
    std::vector<NodeId> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (is_leaf(x)) {
        out.push_back(static_cast<NodeId>(x));
      } else {
        stack.push_back(right_[x]);
        stack.push_back(left_[x]);
      }
    }
    return out;
  }

  // Internal nodes of the subtree rooted at id, preorder.
  std::vector<int> internals_under(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (is_leaf(x)) continue;
      out.push_back(x);
      stack.push_back(right_[x]);
      stack.push_back(left_[x]);
    }
    return out;
  }

  void swap_children(int id) {
    std::swap(left_[id], right_[id]);
    if (!stats_.empty()) {
      InternalStats& s = stats_[internal_index(id)];
      std::swap(s.L, s.R);
      std::swap(s.Lbar, s.Rbar);
    }
  }

  // Regroups the three subtrees around a non-root internal node r with
  // children (a, b) and sibling c. Alternative 0 yields r = (a, c) with
  // sibling b; alternative 1 yields r = (c, b) with sibling a. Stats are
  // dropped because they no longer describe the tree.
  void rotate(int r, int alternative) {
    if (is_leaf(r) || r == root_)
      throw ValidationError("rotate: node must be a non-root internal node");
    const int p = parent_[r];
    const int c = sibling(r);
    const int a = left_[r];
    const int b = right_[r];
    const bool r_is_left = left_[p] == r;
    int moved_out;
    if (alternative == 0) {
      right_[r] = c;
      moved_out = b;
    } else {
      left_[r] = c;
      moved_out = a;
    }
    parent_[c] = r;
    parent_[moved_out] = p;
    if (r_is_left) {
      right_[p] = moved_out;
    } else {
      left_[p] = moved_out;
    }
    stats_.clear();
  }

  // Sorts children by smallest leaf id and prints a nested tuple, so two
  // trees compare equal iff they have the same unordered labeled shape.
  std::string canonical_form() const {
    std::string out;
    canonical(root_, out);
    return out;
  }

  bool has_stats() const { return !stats_.empty(); }
  const std::vector<InternalStats>& stats() const { return stats_; }
  const InternalStats& stats_at(int id) const {
    return stats_[internal_index(id)];
  }
  InternalStats& mutable_stats_at(int id) { return stats_[internal_index(id)]; }
  void set_stats(std::vector<InternalStats> stats) { stats_ = std::move(stats); }

  // Edge list view of the structure, children[i] for internal node n + i.
  std::vector<std::array<int, 2>> children() const {
    std::vector<std::array<int, 2>> out(internal_count());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = {left_[n_ + i], right_[n_ + i]};
    return out;
  }

  friend bool operator==(const Dendrogram& a, const Dendrogram& b) {
    return a.n_ == b.n_ && a.root_ == b.root_ && a.left_ == b.left_ &&
           a.right_ == b.right_;
  }

 private:
  static std::size_t slots(std::size_t n) {
    if (n < 2) throw ValidationError("dendrogram: need at least 2 leaves");
    return 2 * n - 1;
  }

  int subtree_size(int id) const {
    int count = 0;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (++count > static_cast<int>(node_count())) return count;
      if (!is_leaf(x)) {
        stack.push_back(left_[x]);
        stack.push_back(right_[x]);
      }
    }
    return count;
  }

  NodeId canonical(int id, std::string& out) const {
    if (is_leaf(id)) {
      out += std::to_string(id);
      return static_cast<NodeId>(id);
    }
    std::string l, r;
    const NodeId ml = canonical(left_[id], l);
    const NodeId mr = canonical(right_[id], r);
    out += '(';
    out += ml < mr ? l : r;
    out += ',';
    out += ml < mr ? r : l;
    out += ')';
    return std::min(ml, mr);
  }

  std::size_t n_ = 0;
  std::vector<int> left_;
  std::vector<int> right_;
  std::vector<int> parent_;
  int root_ = kNone;
  std::vector<InternalStats> stats_;
};

// Adjacency and node-class membership in the form the likelihood code uses.
// The private membership mask can be overridden to hold the private node set
// fixed while private edges vary.
struct GraphIndex {
  std::size_t n = 0;
  std::vector<std::vector<NodeId>> pub_adj;
  std::vector<std::vector<NodeId>> pri_adj;
  std::vector<bool> pub_member;
  std::vector<bool> pri_member;
  std::size_t pub_node_count = 0;
  std::size_t pri_node_count = 0;

  static GraphIndex from(const PrivacyGraph& g) {
    GraphIndex idx;
    idx.n = g.node_count();
    idx.pub_adj.assign(idx.n, {});
    idx.pri_adj.assign(idx.n, {});
    for (const Edge& e : g.pub_edges()) {
      idx.pub_adj[e.u].push_back(e.v);
      idx.pub_adj[e.v].push_back(e.u);
    }
    for (const Edge& e : g.pri_edges()) {
      idx.pri_adj[e.u].push_back(e.v);
      idx.pri_adj[e.v].push_back(e.u);
    }
    idx.set_members(g.pub_mask(), g.pri_mask());
    return idx;
  }

  void set_members(std::vector<bool> pub, std::vector<bool> pri) {
    pub_member = std::move(pub);
    pri_member = std::move(pri);
    pub_node_count = static_cast<std::size_t>(
        std::count(pub_member.begin(), pub_member.end(), true));
    pri_node_count = static_cast<std::size_t>(
        std::count(pri_member.begin(), pri_member.end(), true));
  }

  const std::vector<std::vector<NodeId>>& adj(EdgeSide side) const {
    return side == EdgeSide::kPublic ? pub_adj : pri_adj;
  }
  const std::vector<bool>& members(EdgeSide side) const {
    return side == EdgeSide::kPublic ? pub_member : pri_member;
  }
};

inline void check_leaves_match(const Dendrogram& d, std::size_t n) {
  if (d.leaf_count() != n) {
    throw ValidationError("dendrogram has " + std::to_string(d.leaf_count()) +
                          " leaves, graph has " + std::to_string(n) + " nodes");
  }
}

// Per-internal-node counts and maximum-likelihood probabilities.
inline Dendrogram compute_stats(Dendrogram d, const GraphIndex& g) {
  check_leaves_match(d, g.n);
  std::vector<InternalStats> stats(d.internal_count());
  // side[x] == stamp marks leaf x as lying under the current right child.
  std::vector<int> side(g.n, -1);
  for (int id = d.first_internal(); id < static_cast<int>(d.node_count()); ++id) {
    InternalStats& s = stats[d.internal_index(id)];
    const std::vector<NodeId> left = d.leaves_under(d.left(id));
    const std::vector<NodeId> right = d.leaves_under(d.right(id));
    for (NodeId x : right) side[x] = id;
    for (NodeId x : left) {
      if (g.pub_member[x]) ++s.L;
      if (g.pri_member[x]) ++s.Lbar;
      for (NodeId y : g.pub_adj[x]) s.e += side[y] == id;
      for (NodeId y : g.pri_adj[x]) s.ebar += side[y] == id;
    }
    for (NodeId x : right) {
      if (g.pub_member[x]) ++s.R;
      if (g.pri_member[x]) ++s.Rbar;
    }
    s.p = s.N() > 0 ? static_cast<double>(s.e) / static_cast<double>(s.N()) : 0.0;
    s.pbar = s.Nbar() > 0
                 ? static_cast<double>(s.ebar) / static_cast<double>(s.Nbar())
                 : 0.0;
  }
  d.set_stats(std::move(stats));
  return d;
}

inline Dendrogram compute_stats(Dendrogram d, const PrivacyGraph& g) {
  return compute_stats(std::move(d), GraphIndex::from(g));
}

// Sum over internal nodes of N_r chi(p_r) (public) or Nbar_r chi(pbar_r)
// (private): the log of the likelihood at the ML probabilities.
inline double log_likelihood(const Dendrogram& d, EdgeSide side) {
  if (!d.has_stats()) throw ValidationError("log_likelihood: stats not computed");
  double total = 0.0;
  for (const InternalStats& s : d.stats()) {
    total += side == EdgeSide::kPublic ? node_log_likelihood(s.e, s.N())
                                       : node_log_likelihood(s.ebar, s.Nbar());
  }
  return total;
}

// The two regroupings of the three subtrees around non-root internal node r.
inline std::array<Dendrogram, 2> subtree_alternatives(const Dendrogram& d, int r) {
  if (d.is_leaf(r) || r == d.root())
    throw ValidationError("subtree_alternatives: r must be a non-root internal node");
  std::array<Dendrogram, 2> out{d, d};
  out[0].rotate(r, 0);
  out[1].rotate(r, 1);
  return out;
}

namespace internal {

// Growing tree used by random generation and enumeration: leaves are added
// one at a time by splitting an existing edge (or the edge above the root).
struct TreeBuilder {
  std::size_t n;
  std::vector<std::array<int, 2>> children;
  std::vector<int> parent;
  int root;
  int next_internal;

  explicit TreeBuilder(std::size_t leaves)
      : n(leaves),
        children(leaves - 1, {Dendrogram::kNone, Dendrogram::kNone}),
        parent(2 * leaves - 1, Dendrogram::kNone),
        root(static_cast<int>(leaves)),
        next_internal(static_cast<int>(leaves) + 1) {
    children[0] = {0, 1};
    parent[0] = parent[1] = root;
  }

  // Inserts leaf above node x; returns the new internal node.
  int insert(int leaf, int x, bool leaf_left) {
    const int w = next_internal++;
    const int px = parent[x];
    slot(w) = leaf_left ? std::array<int, 2>{leaf, x} : std::array<int, 2>{x, leaf};
    parent[w] = px;
    parent[x] = w;
    parent[leaf] = w;
    if (px == Dendrogram::kNone) {
      root = w;
    } else {
      auto& pc = slot(px);
      (pc[0] == x ? pc[0] : pc[1]) = w;
    }
    return w;
  }

  void undo(int leaf, int x, int w) {
    const int px = parent[w];
    parent[x] = px;
    parent[leaf] = Dendrogram::kNone;
    parent[w] = Dendrogram::kNone;
    if (px == Dendrogram::kNone) {
      root = x;
    } else {
      auto& pc = slot(px);
      (pc[0] == w ? pc[0] : pc[1]) = x;
    }
    slot(w) = {Dendrogram::kNone, Dendrogram::kNone};
    --next_internal;
  }

  std::array<int, 2>& slot(int id) { return children[static_cast<std::size_t>(id) - n]; }

  // Existing nodes once leaves 0..leaf-1 are placed.
  std::vector<int> existing(int leaf) const {
    std::vector<int> out;
    for (int x = 0; x < leaf; ++x) out.push_back(x);
    for (int w = static_cast<int>(n); w < next_internal; ++w) out.push_back(w);
    return out;
  }

  Dendrogram build() const { return Dendrogram(n, children, root); }
};

inline void enumerate(TreeBuilder& b, int leaf,
                      const std::function<void(const Dendrogram&)>& visit) {
  if (static_cast<std::size_t>(leaf) == b.n) {
    visit(b.build());
    return;
  }
  for (int x : b.existing(leaf)) {
    const int w = b.insert(leaf, x, false);
    enumerate(b, leaf + 1, visit);
    b.undo(leaf, x, w);
  }
}

}  // namespace internal

// Uniformly random labeled shape: each leaf in turn splits a uniformly chosen
// edge of the current tree (including the one above the root), which reaches
// each of the (2n-3)!! shapes through exactly one choice sequence.
inline Dendrogram random_dendrogram(std::size_t n, RngStream& rng) {
  if (n < 2) throw ValidationError("random_dendrogram: need at least 2 nodes");
  internal::TreeBuilder b(n);
  if (rng.bernoulli(0.5)) std::swap(b.children[0][0], b.children[0][1]);
  for (int leaf = 2; leaf < static_cast<int>(n); ++leaf) {
    // Nodes present: leaves 0..leaf-1 and internals n..next_internal-1.
    const std::uint64_t count = static_cast<std::uint64_t>(2 * leaf - 1);
    const int pick = static_cast<int>(rng.uniform_int(count));
    const int x = pick < leaf ? pick : static_cast<int>(n) + (pick - leaf);
    b.insert(leaf, x, rng.bernoulli(0.5));
  }
  return b.build();
}

// Calls visit once per labeled dendrogram shape on n leaves; (2n-3)!! calls.
inline void for_each_dendrogram(std::size_t n,
                                const std::function<void(const Dendrogram&)>& visit) {
  if (n < 2) throw ValidationError("for_each_dendrogram: need at least 2 leaves");
  internal::TreeBuilder b(n);
  internal::enumerate(b, 2, visit);
}

// (2n-3)!!
inline std::uint64_t dendrogram_count(std::size_t n) {
  std::uint64_t out = 1;
  for (std::uint64_t k = 3; k + 3 <= 2 * n; k += 2) out *= k;
  return out;
}

// Lowest common ancestor of two distinct leaves.
inline int lca(const Dendrogram& d, NodeId u, NodeId v) {
  if (u == v) throw ValidationError("lca: u and v must differ");
  if (u >= d.leaf_count() || v >= d.leaf_count())
    throw ValidationError("lca: node is not a leaf of the dendrogram");
  std::vector<bool> on_path(d.node_count(), false);
  for (int x = static_cast<int>(u); x != Dendrogram::kNone; x = d.parent(x))
    on_path[x] = true;
  int y = static_cast<int>(v);
  while (!on_path[y]) y = d.parent(y);
  return y;
}

namespace internal {

inline void append_number(std::string& out, double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

inline void newick(const Dendrogram& d, int id, std::string& out) {
  if (d.is_leaf(id)) {
    out += std::to_string(id);
    return;
  }
  out += '(';
  newick(d, d.left(id), out);
  out += ',';
  newick(d, d.right(id), out);
  out += ')';
  if (!d.has_stats()) return;
  const InternalStats& s = d.stats_at(id);
  out += "[&&NHX:e=" + std::to_string(s.e) + ":ebar=" + std::to_string(s.ebar) +
         ":L=" + std::to_string(s.L) + ":R=" + std::to_string(s.R) +
         ":Lbar=" + std::to_string(s.Lbar) + ":Rbar=" + std::to_string(s.Rbar) +
         ":p=";
  append_number(out, s.p);
  out += ":pbar=";
  append_number(out, s.pbar);
  out += ":ptilde=";
  append_number(out, s.ptilde);
  out += ']';
}

}  // namespace internal

// Newick text with NHX annotations (e, ebar, L, R, Lbar, Rbar, p, pbar,
// ptilde) on every internal node when stats are present.
inline std::string to_newick(const Dendrogram& d) {
  std::string out;
  internal::newick(d, d.root(), out);
  out += ";\n";
  return out;
}

}  // namespace dpgraph

#endif  // DPGRAPH_HRG_HPP_
