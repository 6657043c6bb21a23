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
#ifndef DPGRAPH_MCMC_HPP_
#define DPGRAPH_MCMC_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/rng.hpp"

namespace dpgraph {

struct McmcConfig {
  double eps_e1 = 1.0;
  std::size_t max_steps = 100000;
  int pub_substeps = 1;
  int pri_substeps = 1;
  std::size_t convergence_window = 2000;
  double convergence_tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(eps_e1 > 0.0)) throw ValidationError("mcmc: eps_e1 must be > 0");
    if (max_steps < 1) throw ValidationError("mcmc: max_steps must be >= 1");
    if (convergence_window < 2)
      throw ValidationError("mcmc: convergence_window must be >= 2");
    if (pub_substeps < 0 || pri_substeps < 0)
      throw ValidationError("mcmc: substep counts must be >= 0");
  }
};

// Largest number of cross pairs an internal node can have over |V_pri| leaves.
inline double max_cross_pairs(std::size_t v_bar_count) {
  const double v = static_cast<double>(v_bar_count);
  return v_bar_count % 2 == 0 ? v * v / 4.0 : (v * v - 1.0) / 4.0;
}

// Global sensitivity of L_pri under adding or removing one private edge:
//   log N_max - (N_max - 1) log(1 - 1/N_max),
// i.e. |N chi(1/N)| at N = N_max. For |V_pri| = 2 (N_max = 1) the expression
// degenerates and ln 2 is used.
inline double delta_e(std::size_t v_bar_count) {
  if (v_bar_count < 2)
    throw ValidationError("delta_e: need at least 2 private nodes");
  if (v_bar_count == 2) return std::log(2.0);
  const double n_max = max_cross_pairs(v_bar_count);
  return std::log(n_max) - (n_max - 1.0) * std::log1p(-1.0 / n_max);
}

// min(1, exp(log_ratio)) without forming exp of a positive number.
inline double acceptance_probability(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

// Metropolis acceptance test done in log space.
inline bool accept_move(double log_ratio, RngStream& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform_open()) < log_ratio;
}

// A candidate regrouping at internal node r (see Dendrogram::rotate) together
// with the stats r and its parent would have after the move.
struct Proposal {
  int r = Dendrogram::kNone;
  int alternative = 0;
  InternalStats r_stats;
  InternalStats p_stats;
  double delta_pub = 0.0;
  double delta_pri = 0.0;
};

// Dendrogram plus incrementally maintained per-node stats and likelihoods.
// A rotation at r only changes the leaf sets under r, so only r and its
// parent need recounting; the three pairwise cross-edge counts between the
// subtrees involved come from one edge scan plus the two stored totals.
class HrgChain {
 public:
  HrgChain(const GraphIndex& g, Dendrogram initial)
      : g_(&g), d_(std::move(initial)) {
    check_leaves_match(d_, g.n);
    const std::size_t nodes = d_.node_count();
    words_ = (g.n + 63) / 64;
    bits_.assign(d_.internal_count(), std::vector<std::uint64_t>(words_, 0));
    size_.assign(nodes, 0);
    pub_count_.assign(nodes, 0);
    pri_count_.assign(nodes, 0);
    for (std::size_t x = 0; x < g.n; ++x) {
      size_[x] = 1;
      pub_count_[x] = g.pub_member[x] ? 1 : 0;
      pri_count_[x] = g.pri_member[x] ? 1 : 0;
    }
    // Internal ids are not topologically ordered; fill bottom-up by postorder.
    std::vector<int> order = d_.internals_under(d_.root());
    std::reverse(order.begin(), order.end());
    for (int id : order) refresh_node(id);
    stats_ = compute_stats(d_, g).stats();
    for (int id = d_.first_internal(); id < static_cast<int>(nodes); ++id)
      if (id != d_.root()) non_root_.push_back(id);
    recompute_likelihoods();
  }

  const Dendrogram& structure() const { return d_; }
  double log_likelihood_pub() const { return l_pub_; }
  double log_likelihood_pri() const { return l_pri_; }
  const InternalStats& stats_at(int id) const {
    return stats_[d_.internal_index(id)];
  }
  std::size_t movable_count() const { return non_root_.size(); }

  // Dendrogram copy carrying the current stats.
  Dendrogram dendrogram() const {
    Dendrogram out = d_;
    out.set_stats(stats_);
    return out;
  }

  Proposal evaluate(int r, int alternative) const {
    const int p = d_.parent(r);
    const int a = d_.left(r);
    const int b = d_.right(r);
    const int c = d_.sibling(r);
    const InternalStats& sr = stats_at(r);
    const InternalStats& sp = stats_at(p);
    const std::int64_t ac_pub = cross_edges(a, c, EdgeSide::kPublic);
    const std::int64_t ac_pri = cross_edges(a, c, EdgeSide::kPrivate);
    const std::int64_t ab_pub = sr.e, ab_pri = sr.ebar;
    const std::int64_t bc_pub = sp.e - ac_pub, bc_pri = sp.ebar - ac_pri;

    Proposal out;
    out.r = r;
    out.alternative = alternative;
    int x, y, out_child;
    std::int64_t r_pub, r_pri, p_pub, p_pri;
    if (alternative == 0) {
      x = a, y = c, out_child = b;
      r_pub = ac_pub, r_pri = ac_pri;
      p_pub = ab_pub + bc_pub, p_pri = ab_pri + bc_pri;
    } else {
      x = c, y = b, out_child = a;
      r_pub = bc_pub, r_pri = bc_pri;
      p_pub = ab_pub + ac_pub, p_pri = ab_pri + ac_pri;
    }
    out.r_stats = make_stats(r_pub, r_pri, x, y);
    const std::int64_t rp = pub_count_[x] + pub_count_[y];
    const std::int64_t rq = pri_count_[x] + pri_count_[y];
    if (d_.left(p) == r) {
      out.p_stats = make_stats(p_pub, p_pri, rp, rq, pub_count_[out_child],
                               pri_count_[out_child]);
    } else {
      out.p_stats = make_stats(p_pub, p_pri, pub_count_[out_child],
                               pri_count_[out_child], rp, rq);
    }
    out.delta_pub = node_log_likelihood(out.r_stats.e, out.r_stats.N()) +
                    node_log_likelihood(out.p_stats.e, out.p_stats.N()) -
                    node_log_likelihood(sr.e, sr.N()) -
                    node_log_likelihood(sp.e, sp.N());
    out.delta_pri = node_log_likelihood(out.r_stats.ebar, out.r_stats.Nbar()) +
                    node_log_likelihood(out.p_stats.ebar, out.p_stats.Nbar()) -
                    node_log_likelihood(sr.ebar, sr.Nbar()) -
                    node_log_likelihood(sp.ebar, sp.Nbar());
    return out;
  }

  // Uniform non-root internal node, then one of its two alternatives.
  std::optional<Proposal> propose(RngStream& rng) const {
    if (non_root_.empty()) return std::nullopt;
    const int r = non_root_[rng.uniform_int(non_root_.size())];
    const int alternative = static_cast<int>(rng.uniform_int(2));
    return evaluate(r, alternative);
  }

  void apply(const Proposal& m) {
    const int p = d_.parent(m.r);
    d_.rotate(m.r, m.alternative);
    stats_[d_.internal_index(m.r)] = m.r_stats;
    stats_[d_.internal_index(p)] = m.p_stats;
    refresh_node(m.r);
    l_pub_ += m.delta_pub;
    l_pri_ += m.delta_pri;
  }

  // Public move: accept with min(1, exp(L_pub(D') - L_pub(D))).
  bool public_step(RngStream& rng) {
    const std::optional<Proposal> m = propose(rng);
    if (!m || !accept_move(m->delta_pub, rng)) return false;
    apply(*m);
    return true;
  }

  // Private move: exponential mechanism with score L_pri and weight
  // scale = eps_e1 / delta_e.
  bool private_step(double scale, RngStream& rng) {
    const std::optional<Proposal> m = propose(rng);
    if (!m || !accept_move(scale * m->delta_pri, rng)) return false;
    apply(*m);
    return true;
  }

  // Resums the likelihoods from the stored stats to shed accumulated
  // floating-point drift.
  void recompute_likelihoods() {
    l_pub_ = 0.0;
    l_pri_ = 0.0;
    for (const InternalStats& s : stats_) {
      l_pub_ += node_log_likelihood(s.e, s.N());
      l_pri_ += node_log_likelihood(s.ebar, s.Nbar());
    }
  }

 private:
  bool contains(int node, NodeId leaf) const {
    if (d_.is_leaf(node)) return static_cast<NodeId>(node) == leaf;
    const auto& w = bits_[d_.internal_index(node)];
    return (w[leaf >> 6] >> (leaf & 63)) & 1U;
  }

  template <typename F>
  void for_each_leaf(int node, F&& f) const {
    if (d_.is_leaf(node)) {
      f(static_cast<NodeId>(node));
      return;
    }
    const auto& w = bits_[d_.internal_index(node)];
    for (std::size_t i = 0; i < words_; ++i) {
      std::uint64_t word = w[i];
      while (word != 0) {
        f(static_cast<NodeId>(i * 64 + std::countr_zero(word)));
        word &= word - 1;
      }
    }
  }

  std::int64_t cross_edges(int x, int y, EdgeSide side) const {
    if (size_[x] > size_[y]) std::swap(x, y);
    const auto& adj = g_->adj(side);
    std::int64_t count = 0;
    for_each_leaf(x, [&](NodeId leaf) {
      for (NodeId nb : adj[leaf]) count += contains(y, nb);
    });
    return count;
  }

  InternalStats make_stats(std::int64_t e, std::int64_t ebar, int x, int y) const {
    return make_stats(e, ebar, pub_count_[x], pri_count_[x], pub_count_[y],
                      pri_count_[y]);
  }

  static InternalStats make_stats(std::int64_t e, std::int64_t ebar,
                                  std::int64_t l_pub, std::int64_t l_pri,
                                  std::int64_t r_pub, std::int64_t r_pri) {
    InternalStats s;
    s.e = e;
    s.ebar = ebar;
    s.L = l_pub;
    s.R = r_pub;
    s.Lbar = l_pri;
    s.Rbar = r_pri;
    s.p = s.N() > 0 ? static_cast<double>(e) / static_cast<double>(s.N()) : 0.0;
    s.pbar = s.Nbar() > 0
                 ? static_cast<double>(ebar) / static_cast<double>(s.Nbar())
                 : 0.0;
    return s;
  }

  // Recomputes leaf bitset and counts of internal node id from its children.
  void refresh_node(int id) {
    auto& w = bits_[d_.internal_index(id)];
    std::fill(w.begin(), w.end(), 0);
    for (int child : {d_.left(id), d_.right(id)}) {
      if (d_.is_leaf(child)) {
        w[static_cast<std::size_t>(child) >> 6] |= std::uint64_t{1} << (child & 63);
      } else {
        const auto& cw = bits_[d_.internal_index(child)];
        for (std::size_t i = 0; i < words_; ++i) w[i] |= cw[i];
      }
    }
    size_[id] = size_[d_.left(id)] + size_[d_.right(id)];
    pub_count_[id] = pub_count_[d_.left(id)] + pub_count_[d_.right(id)];
    pri_count_[id] = pri_count_[d_.left(id)] + pri_count_[d_.right(id)];
  }

  const GraphIndex* g_;
  Dendrogram d_;
  std::vector<InternalStats> stats_;
  std::size_t words_ = 0;
  std::vector<std::vector<std::uint64_t>> bits_;
  std::vector<std::int64_t> size_;
  std::vector<std::int64_t> pub_count_;
  std::vector<std::int64_t> pri_count_;
  std::vector<int> non_root_;
  double l_pub_ = 0.0;
  double l_pri_ = 0.0;
};

struct TraceRecord {
  std::size_t step = 0;
  double l_pub = 0.0;
  double l_pri = 0.0;
  int pub_accepted = 0;
  int pri_accepted = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct McmcResult {
  Dendrogram final_dendrogram;  // D*, the released chain state
  Dendrogram best_dendrogram;   // highest combined objective seen
  double final_l_pub = 0.0;
  double final_l_pri = 0.0;
  double best_objective = 0.0;
  double best_l_pub = 0.0;  // highest L_pub seen at any outer step
  double delta_e = 0.0;     // 0 when the private side is inactive
  double private_scale = 0.0;
  std::size_t steps = 0;
  bool converged = false;
  std::size_t pub_accepted = 0;
  std::size_t pri_accepted = 0;
  std::size_t pub_proposed = 0;
  std::size_t pri_proposed = 0;
};

// Alternating public/private Metropolis chain from a random dendrogram.
//
// Each outer step runs pub_substeps public moves then pri_substeps private
// moves; a side with no edges is skipped (its likelihood is identically 0).
// Stops after max_steps or once the best combined objective
// L_pub + (eps_e1 / delta_e) L_pri has not improved by more than
// convergence_tol for convergence_window outer steps.
inline McmcResult run_mcmc(const GraphIndex& g, bool has_pub_edges,
                           bool has_pri_edges, const McmcConfig& config,
                           RngStream rng, const TraceSink& trace = {}) {
  config.validate();
  if (!has_pub_edges && !has_pri_edges)
    throw ValidationError("run_mcmc: graph has neither public nor private edges");
  RngStream init = rng.split(0);
  RngStream steps = rng.split(1);
  HrgChain chain(g, random_dendrogram(g.n, init));

  McmcResult res;
  const bool pri_active = has_pri_edges && g.pri_node_count >= 2;
  if (pri_active) {
    res.delta_e = delta_e(g.pri_node_count);
    res.private_scale = config.eps_e1 / res.delta_e;
  }
  auto objective = [&] {
    return chain.log_likelihood_pub() +
           res.private_scale * chain.log_likelihood_pri();
  };
  res.best_objective = objective();
  res.best_l_pub = chain.log_likelihood_pub();
  res.best_dendrogram = chain.structure();
  std::size_t last_improvement = 0;

  if (chain.movable_count() > 0) {
    for (std::size_t t = 1; t <= config.max_steps; ++t) {
      TraceRecord rec;
      rec.step = t;
      if (has_pub_edges) {
        for (int i = 0; i < config.pub_substeps; ++i) {
          ++res.pub_proposed;
          if (chain.public_step(steps)) ++rec.pub_accepted;
        }
      }
      if (pri_active) {
        for (int i = 0; i < config.pri_substeps; ++i) {
          ++res.pri_proposed;
          if (chain.private_step(res.private_scale, steps)) ++rec.pri_accepted;
        }
      }
      res.pub_accepted += static_cast<std::size_t>(rec.pub_accepted);
      res.pri_accepted += static_cast<std::size_t>(rec.pri_accepted);
      res.steps = t;
      if (t % 4096 == 0) chain.recompute_likelihoods();

      const double obj = objective();
      if (obj > res.best_objective + config.convergence_tol) {
        last_improvement = t;
        res.best_objective = obj;
        res.best_dendrogram = chain.structure();
      } else if (obj > res.best_objective) {
        res.best_objective = obj;
      }
      res.best_l_pub = std::max(res.best_l_pub, chain.log_likelihood_pub());
      if (trace) {
        rec.l_pub = chain.log_likelihood_pub();
        rec.l_pri = chain.log_likelihood_pri();
        trace(rec);
      }
      if (t - last_improvement >= config.convergence_window) {
        res.converged = true;
        break;
      }
    }
  } else {
    res.converged = true;
  }
  chain.recompute_likelihoods();
  res.final_dendrogram = chain.dendrogram();
  res.final_l_pub = chain.log_likelihood_pub();
  res.final_l_pri = chain.log_likelihood_pri();
  res.best_dendrogram = compute_stats(res.best_dendrogram, g);
  return res;
}

inline McmcResult run_mcmc(const PrivacyGraph& g, const McmcConfig& config,
                           const TraceSink& trace = {}) {
  const GraphIndex idx = GraphIndex::from(g);
  return run_mcmc(idx, !g.pub_edges().empty(), !g.pri_edges().empty(), config,
                  RngStream(config.seed, {streams::kMcmc, 0}), trace);
}

// Independent chains on split streams, run concurrently. The released result
// is the chain whose final state has the highest public log-likelihood, so
// the selection itself only reads public data. Only chain 0 is traced.
inline McmcResult run_chains(const PrivacyGraph& g, const McmcConfig& config,
                             std::size_t chains, const TraceSink& trace = {}) {
  if (chains < 1) throw ValidationError("run_chains: need at least one chain");
  const GraphIndex idx = GraphIndex::from(g);
  const bool has_pub = !g.pub_edges().empty();
  const bool has_pri = !g.pri_edges().empty();
  std::vector<std::future<McmcResult>> futures;
  for (std::size_t c = 0; c < chains; ++c) {
    futures.push_back(std::async(
        chains > 1 ? std::launch::async : std::launch::deferred,
        [&, c] {
          return run_mcmc(idx, has_pub, has_pri, config,
                          RngStream(config.seed, {streams::kMcmc, c}),
                          c == 0 ? trace : TraceSink{});
        }));
  }
  std::optional<McmcResult> best;
  for (auto& f : futures) {
    McmcResult r = f.get();
    if (!best || r.final_l_pub > best->final_l_pub) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace dpgraph

#endif  // DPGRAPH_MCMC_HPP_
