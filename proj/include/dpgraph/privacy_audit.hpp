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
#ifndef DPGRAPH_PRIVACY_AUDIT_HPP_
#define DPGRAPH_PRIVACY_AUDIT_HPP_

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/feature_rr.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/rng.hpp"
#include "dpgraph/scoring.hpp"

namespace dpgraph {

// One metric per line: name, value, and PASS/FAIL for checks.
struct ReportLine {
  std::string name;
  double value = 0.0;
  std::optional<bool> pass;
};

struct Report {
  std::vector<ReportLine> lines;

  void add(std::string name, double value) {
    lines.push_back({std::move(name), value, std::nullopt});
  }
  void check(std::string name, double value, bool pass) {
    lines.push_back({std::move(name), value, pass});
  }
  bool all_pass() const {
    return std::all_of(lines.begin(), lines.end(),
                       [](const ReportLine& l) { return l.pass.value_or(true); });
  }
  void append(const Report& other) {
    lines.insert(lines.end(), other.lines.begin(), other.lines.end());
  }

  std::string to_text() const {
    std::string out;
    for (const ReportLine& l : lines) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, l.value);
      out += l.name;
      out += '\t';
      out.append(buf, res.ptr);
      if (l.pass) out += *l.pass ? "\tPASS" : "\tFAIL";
      out += '\n';
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Feature-level LDP

struct FeatureLdpResult {
  std::size_t feature = 0;
  double eps = 0.0;
  LdpRatio worst;  // unset triple (all zero) for an infinite budget
  bool pass = false;
};

struct FeatureLdpAudit {
  std::vector<FeatureLdpResult> features;
  bool pass = true;
  Report report;
};

// Exact check of Pr(u|t) <= e^{eps_i} Pr(u|t') for every feature and every
// (u, t, t'), by enumeration. No sampling.
inline FeatureLdpAudit audit_feature_ldp(const BudgetAllocation& b,
                                         double tolerance = 1e-9) {
  if (b.k < 2) throw ValidationError("audit_feature_ldp: k must be >= 2");
  FeatureLdpAudit audit;
  for (std::size_t i = 0; i < b.feature_count(); ++i) {
    FeatureLdpResult r;
    r.feature = i;
    r.eps = b.eps_i[i];
    const std::string tag = "feature_ldp[" + std::to_string(i) + "]";
    if (std::isinf(r.eps)) {
      r.pass = true;
      audit.report.check(tag + ".max_ratio", 0.0, true);
    } else {
      r.worst = ldp_max_ratio(b.k, b.sigma_i[i]);
      r.pass = r.worst.ratio <= std::exp(r.eps) + tolerance;
      audit.report.check(tag + ".max_ratio", r.worst.ratio, r.pass);
      audit.report.add(tag + ".exp_eps", std::exp(r.eps));
      if (!r.pass) {
        audit.report.add(tag + ".violating_u", r.worst.u);
        audit.report.add(tag + ".violating_t", r.worst.t);
        audit.report.add(tag + ".violating_t_prime", r.worst.t_prime);
      }
    }
    audit.pass = audit.pass && r.pass;
    audit.features.push_back(r);
  }
  audit.report.check("feature_ldp", static_cast<double>(b.feature_count()),
                     audit.pass);
  return audit;
}

// ---------------------------------------------------------------------------
// Brute-force oracles over all dendrograms

inline constexpr std::size_t kMaxBruteForceNodes = 8;

enum class LikelihoodKind { kPublic, kPrivate, kCombined };

struct BruteForceBest {
  Dendrogram dendrogram;
  double likelihood = -std::numeric_limits<double>::infinity();
  std::uint64_t shapes = 0;
};

inline double likelihood_of(const Dendrogram& with_stats, LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::kPublic:
      return log_likelihood(with_stats, EdgeSide::kPublic);
    case LikelihoodKind::kPrivate:
      return log_likelihood(with_stats, EdgeSide::kPrivate);
    case LikelihoodKind::kCombined:
      break;
  }
  return log_likelihood(with_stats, EdgeSide::kPublic) +
         log_likelihood(with_stats, EdgeSide::kPrivate);
}

// Maximizer of the requested log-likelihood over all (2n-3)!! shapes.
inline BruteForceBest brute_force_best_dendrogram(const PrivacyGraph& g,
                                                  LikelihoodKind kind) {
  const std::size_t n = g.node_count();
  if (n < 2 || n > kMaxBruteForceNodes) {
    throw ValidationError("brute_force_best_dendrogram: n must be in [2, " +
                          std::to_string(kMaxBruteForceNodes) + "]");
  }
  const GraphIndex idx = GraphIndex::from(g);
  BruteForceBest best;
  for_each_dendrogram(n, [&](const Dendrogram& d) {
    ++best.shapes;
    Dendrogram s = compute_stats(d, idx);
    const double ll = likelihood_of(s, kind);
    if (ll > best.likelihood) {
      best.likelihood = ll;
      best.dendrogram = std::move(s);
    }
  });
  return best;
}

// max |L_pri(D; G) - L_pri(D; G')| over every private graph G on v nodes,
// every G' that adds one edge to G, and every dendrogram D. All v nodes are
// held in the private set, so the cross-pair counts Nbar_r are fixed.
inline double brute_force_delta_e(std::size_t v) {
  if (v < 2 || v > 5)
    throw ValidationError("brute_force_delta_e: v must be in [2, 5]");
  std::vector<Edge> pairs;
  for (NodeId a = 0; a < v; ++a)
    for (NodeId b = a + 1; b < v; ++b) pairs.emplace_back(a, b);
  auto pair_index = [&](NodeId a, NodeId b) {
    const Edge e(a, b);
    return static_cast<std::size_t>(
        std::lower_bound(pairs.begin(), pairs.end(), e) - pairs.begin());
  };
  const std::uint32_t graphs = std::uint32_t{1} << pairs.size();
  double best = 0.0;
  for_each_dendrogram(v, [&](const Dendrogram& d) {
    // Cross-pair masks per internal node.
    std::vector<std::uint32_t> cross;
    for (int id = d.first_internal(); id < static_cast<int>(d.node_count()); ++id) {
      std::uint32_t mask = 0;
      for (NodeId x : d.leaves_under(d.left(id)))
        for (NodeId y : d.leaves_under(d.right(id)))
          mask |= std::uint32_t{1} << pair_index(x, y);
      cross.push_back(mask);
    }
    std::vector<double> ll(graphs, 0.0);
    for (std::uint32_t m = 0; m < graphs; ++m) {
      for (std::uint32_t c : cross)
        ll[m] += node_log_likelihood(std::popcount(m & c), std::popcount(c));
    }
    for (std::uint32_t m = 0; m < graphs; ++m) {
      for (std::size_t bit = 0; bit < pairs.size(); ++bit) {
        const std::uint32_t f = std::uint32_t{1} << bit;
        if (m & f) continue;
        best = std::max(best, std::abs(ll[m] - ll[m | f]));
      }
    }
  });
  return best;
}

// ---------------------------------------------------------------------------
// Utility of a released graph

struct UtilityMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double degree_tv = 0.0;
  double edge_count_ratio = 0.0;

  Report report() const {
    Report r;
    r.add("private_precision", precision);
    r.add("private_recall", recall);
    r.add("private_f1", f1);
    r.add("degree_tv_distance", degree_tv);
    r.add("edge_count_ratio", edge_count_ratio);
    return r;
  }
};

inline std::vector<std::size_t> degrees(const PrivacyGraph& g) {
  std::vector<std::size_t> deg(g.node_count(), 0);
  for (const auto* list : {&g.pub_edges(), &g.pri_edges()}) {
    for (const Edge& e : *list) {
      ++deg[e.u];
      ++deg[e.v];
    }
  }
  return deg;
}

// Private-edge precision/recall/F1 of the release against the original, the
// total-variation distance between degree distributions, and total edges
// released over total edges original.
inline UtilityMetrics utility_metrics(const PrivacyGraph& g,
                                      const PrivacyGraph& released) {
  if (g.node_count() != released.node_count())
    throw ValidationError("utility_metrics: node sets differ");
  UtilityMetrics m;
  const auto& truth = g.pri_edges();
  const auto& guess = released.pri_edges();
  std::vector<Edge> hit;
  std::set_intersection(truth.begin(), truth.end(), guess.begin(), guess.end(),
                        std::back_inserter(hit));
  const double tp = static_cast<double>(hit.size());
  if (truth.empty() && guess.empty()) {
    m.precision = m.recall = m.f1 = 1.0;
  } else {
    m.precision = guess.empty() ? 0.0 : tp / static_cast<double>(guess.size());
    m.recall = truth.empty() ? 0.0 : tp / static_cast<double>(truth.size());
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  const std::vector<std::size_t> da = degrees(g);
  const std::vector<std::size_t> db = degrees(released);
  const std::size_t max_deg = std::max(
      da.empty() ? 0 : *std::max_element(da.begin(), da.end()),
      db.empty() ? 0 : *std::max_element(db.begin(), db.end()));
  std::vector<double> diff(max_deg + 1, 0.0);
  for (std::size_t x : da) diff[x] += 1.0;
  for (std::size_t x : db) diff[x] -= 1.0;
  double tv = 0.0;
  for (double x : diff) tv += std::abs(x);
  m.degree_tv = g.node_count() > 0 ? 0.5 * tv / static_cast<double>(g.node_count()) : 0.0;
  const double before = static_cast<double>(g.pub_edges().size() + g.pri_edges().size());
  const double after = static_cast<double>(released.pub_edges().size() +
                                           released.pri_edges().size());
  m.edge_count_ratio = before > 0.0 ? after / before : (after > 0.0 ? 0.0 : 1.0);
  return m;
}

// ---------------------------------------------------------------------------
// Baseline edge-inference attack

struct CandidatePair {
  NodeId u = 0;
  NodeId v = 0;
  bool positive = false;
};

// Mann-Whitney ROC-AUC; tied scores count one half.
inline double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size())
    throw ValidationError("roc_auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        pos += 1.0;
        rank_sum += avg_rank;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0)
    throw ValidationError("roc_auc: need both positive and negative labels");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

struct AttackResult {
  std::vector<double> scores;
  double auc = 0.5;
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return na > 0.0 && nb > 0.0 ? dot / std::sqrt(na * nb) : 0.0;
}

// Scores each candidate by
//   w * |N[u] ∩ N[v]| / max + (1 - w) * cos(x_u, x_v)
// where N[x] is x's closed neighborhood (neighbors and x itself) in the
// released graph, both edge classes. A released edge u-v therefore raises its
// own score by 2. Returns the scores and ROC-AUC against the labels.
inline AttackResult edge_inference_attack(const PrivacyGraph& released,
                                          std::span<const CandidatePair> candidates,
                                          const FeatureMatrix* features = nullptr,
                                          double structure_weight = 1.0) {
  if (!(structure_weight >= 0.0 && structure_weight <= 1.0))
    throw ValidationError("edge_inference_attack: weight must lie in [0, 1]");
  if (structure_weight < 1.0 &&
      (features == nullptr || features->rows() != released.node_count()))
    throw ValidationError("edge_inference_attack: features required for w < 1");
  const std::size_t n = released.node_count();
  std::vector<std::vector<NodeId>> closed(n);
  for (NodeId x = 0; x < n; ++x) closed[x].push_back(x);
  for (const auto* list : {&released.pub_edges(), &released.pri_edges()}) {
    for (const Edge& e : *list) {
      closed[e.u].push_back(e.v);
      closed[e.v].push_back(e.u);
    }
  }
  for (auto& nb : closed) std::sort(nb.begin(), nb.end());

  std::vector<double> overlap(candidates.size());
  double max_overlap = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& a = closed[candidates[i].u];
    const auto& b = closed[candidates[i].v];
    std::size_t count = 0;
    for (std::size_t x = 0, y = 0; x < a.size() && y < b.size();) {
      if (a[x] < b[y]) {
        ++x;
      } else if (b[y] < a[x]) {
        ++y;
      } else {
        ++count, ++x, ++y;
      }
    }
    overlap[i] = static_cast<double>(count);
    max_overlap = std::max(max_overlap, overlap[i]);
  }
  AttackResult res;
  res.scores.resize(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double s = structure_weight * (max_overlap > 0.0 ? overlap[i] / max_overlap : 0.0);
    if (structure_weight < 1.0) {
      s += (1.0 - structure_weight) *
           cosine_similarity(features->row(candidates[i].u), features->row(candidates[i].v));
    }
    res.scores[i] = s;
  }
  std::vector<bool> labels(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) labels[i] = candidates[i].positive;
  res.auc = roc_auc(res.scores, labels);
  return res;
}

// ---------------------------------------------------------------------------
// Synthetic planted-partition graphs

struct PlantedPartitionParams {
  std::size_t n = 100;
  std::size_t communities = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  double private_fraction = 0.2;  // rho

  Report report() const {
    Report r;
    r.add("generator.n", static_cast<double>(n));
    r.add("generator.communities", static_cast<double>(communities));
    r.add("generator.p_in", p_in);
    r.add("generator.p_out", p_out);
    r.add("generator.rho", private_fraction);
    return r;
  }
};

struct PlantedGraph {
  PrivacyGraph graph;
  std::vector<std::size_t> community;
  PlantedPartitionParams params;
};

// Node x belongs to community x mod c. Every pair is an edge independently
// (p_in inside a community, p_out across); then round(rho |E|) of the edges,
// chosen uniformly, become private.
inline PlantedGraph planted_partition(const PlantedPartitionParams& params,
                                      RngStream rng) {
  if (params.n < 2 || params.communities < 1)
    throw ValidationError("planted_partition: need n >= 2 and >= 1 community");
  PlantedGraph out;
  out.params = params;
  out.community.resize(params.n);
  for (std::size_t x = 0; x < params.n; ++x) out.community[x] = x % params.communities;
  std::vector<Edge> edges;
  for (NodeId a = 0; a < params.n; ++a) {
    for (NodeId b = a + 1; b < params.n; ++b) {
      const double p = out.community[a] == out.community[b] ? params.p_in : params.p_out;
      if (rng.bernoulli(p)) edges.emplace_back(a, b);
    }
  }
  shuffle(edges, rng);
  const auto n_pri = static_cast<std::size_t>(
      std::llround(params.private_fraction * static_cast<double>(edges.size())));
  std::vector<Edge> pri(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_pri));
  std::vector<Edge> pub(edges.begin() + static_cast<std::ptrdiff_t>(n_pri), edges.end());
  out.graph = PrivacyGraph(params.n, std::move(pub), std::move(pri));
  return out;
}

// Positives: every private edge. Negatives: for each positive (u, v), a pair
// (u, v') with v' a private node in v's community that is adjacent to u in
// neither class. Matching on u and on v's community keeps degree and
// community membership (public information) from separating the classes.
inline std::vector<CandidatePair> matched_candidates(
    const PrivacyGraph& g, const std::vector<std::size_t>& community,
    RngStream rng) {
  std::vector<std::vector<NodeId>> pool(
      community.empty() ? 1 : *std::max_element(community.begin(), community.end()) + 1);
  for (NodeId x : g.pri_nodes()) pool[community[x]].push_back(x);
  std::vector<CandidatePair> out;
  for (const Edge& e : g.pri_edges()) {
    out.push_back({e.u, e.v, true});
    // Randomize which endpoint is kept.
    const bool keep_u = rng.bernoulli(0.5);
    const NodeId anchor = keep_u ? e.u : e.v;
    const NodeId other = keep_u ? e.v : e.u;
    const auto& candidates = pool[community[other]];
    for (int attempt = 0; attempt < 64 && !candidates.empty(); ++attempt) {
      const NodeId w = candidates[rng.uniform_int(candidates.size())];
      if (w == anchor || g.has_edge(Edge(anchor, w))) continue;
      out.push_back({anchor, w, false});
      break;
    }
  }
  return out;
}

// Positives: every private edge. Negatives: as many uniformly drawn pairs of
// private nodes that are adjacent in neither class.
inline std::vector<CandidatePair> uniform_candidates(const PrivacyGraph& g,
                                                     RngStream rng) {
  const std::vector<NodeId> nodes = g.pri_nodes();
  std::vector<CandidatePair> out;
  for (const Edge& e : g.pri_edges()) out.push_back({e.u, e.v, true});
  const std::size_t want = g.pri_edges().size();
  std::size_t found = 0;
  for (std::size_t attempt = 0; found < want && attempt < 64 * want + 64; ++attempt) {
    const NodeId a = nodes[rng.uniform_int(nodes.size())];
    const NodeId b = nodes[rng.uniform_int(nodes.size())];
    if (a == b || g.has_edge(Edge(a, b))) continue;
    out.push_back({a, b, false});
    ++found;
  }
  return out;
}

}  // namespace dpgraph

#endif  // DPGRAPH_PRIVACY_AUDIT_HPP_
