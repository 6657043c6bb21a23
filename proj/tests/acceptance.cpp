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
// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Each criterion also has a wall-clock limit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dpgraph/dpgraph.hpp"

namespace {

using namespace dpgraph;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

PrivacyGraph random_graph(NodeId n, double p_pub, double p_pri, RngStream& rng) {
  std::vector<Edge> pub, pri;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double x = rng.uniform();
      if (x < p_pub) {
        pub.push_back({u, v});
      } else if (x < p_pub + p_pri) {
        pri.push_back({u, v});
      }
    }
  }
  return PrivacyGraph(n, pub, pri);
}

// 1. Exact LDP conformance over a grid of (k, eps_f) with uniform theta.
Outcome ldp_conformance() {
  const std::size_t d = 5;
  double worst_gap = 0.0;
  for (int k : {2, 10, 100}) {
    for (double eps_f : {0.1, 1.0, 8.0}) {
      const BudgetAllocation b =
          allocate_budgets(std::vector<double>(d, 1.0 / d), eps_f, k);
      const FeatureLdpAudit a = audit_feature_ldp(b, 1e-9);
      if (!a.pass) return {false, fmt("audit failed at k=%g eps_f=%g", k, eps_f)};
      for (std::size_t i = 0; i < a.features.size(); ++i) {
        const FeatureLdpResult& f = a.features[i];
        // Ratio at the extremal triple, evaluated directly.
        const double at_extreme = rr_distribution(1, k, b.sigma_i[i]).prob(1) /
                                  rr_distribution(k, k, b.sigma_i[i]).prob(1);
        const double gap = std::max(std::abs(at_extreme - std::exp(f.eps)),
                                    std::abs(f.worst.ratio - std::exp(f.eps)));
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-9 || f.worst.u != 1 || f.worst.t != 1 || f.worst.t_prime != k)
          return {false, fmt("no equality at (1,1,k) for k=%g eps_f=%g, gap %g", k, eps_f, gap)};
      }
    }
  }
  return {true, fmt("9 configurations, max |ratio - e^eps| = %.3g", worst_gap)};
}

// 2. Budget conservation over random score sets.
Outcome budget_conservation() {
  RngStream rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.uniform_int(64);
    std::vector<double> z(d), zm(d), shap(d);
    for (std::size_t i = 0; i < d; ++i) {
      z[i] = rng.uniform();
      zm[i] = rng.uniform();
      shap[i] = 2 * rng.uniform() - 1;
    }
    const ScoreSet s = make_score_set(z, zm, shap, rng.uniform());
    const double eps_f = 0.01 + 20 * rng.uniform();
    const BudgetAllocation b =
        allocate_budgets(floor_theta(s.theta), eps_f, 2 + static_cast<int>(rng.uniform_int(99)));
    const double total = std::accumulate(b.eps_i.begin(), b.eps_i.end(), 0.0);
    worst = std::max(worst, std::abs(total - eps_f));
  }
  return {worst <= 1e-9, fmt("100 score sets, max |sum eps_i - eps_f| = %.3g", worst)};
}

// 3. Sum of N chi(p) equals the log of the product form on every 4-node
// graph (each pair absent, public or private) and every dendrogram.
Outcome likelihood_oracle() {
  std::vector<Edge> pairs;
  for (NodeId u = 0; u < 4; ++u)
    for (NodeId v = u + 1; v < 4; ++v) pairs.push_back({u, v});
  std::vector<Dendrogram> shapes;
  for_each_dendrogram(4, [&](const Dendrogram& d) { shapes.push_back(d); });
  double worst = 0.0;
  int checked = 0;
  for (int code = 0; code < 729; ++code) {
    std::vector<Edge> pub, pri;
    int c = code;
    for (const Edge& e : pairs) {
      if (c % 3 == 1) pub.push_back(e);
      if (c % 3 == 2) pri.push_back(e);
      c /= 3;
    }
    const PrivacyGraph g(4, pub, pri);
    for (const Dendrogram& shape : shapes) {
      const Dendrogram d = compute_stats(shape, g);
      double prod_pub = 1.0, prod_pri = 1.0;
      for (const InternalStats& s : d.stats()) {
        prod_pub *= std::pow(s.p, static_cast<double>(s.e)) *
                    std::pow(1 - s.p, static_cast<double>(s.N() - s.e));
        prod_pri *= std::pow(s.pbar, static_cast<double>(s.ebar)) *
                    std::pow(1 - s.pbar, static_cast<double>(s.Nbar() - s.ebar));
      }
      worst = std::max(worst, std::abs(log_likelihood(d, EdgeSide::kPublic) - std::log(prod_pub)));
      worst = std::max(worst, std::abs(log_likelihood(d, EdgeSide::kPrivate) - std::log(prod_pri)));
      ++checked;
    }
  }
  return {worst <= 1e-9 && checked == 729 * 15,
          fmt("%g (graph, dendrogram) pairs, max deviation %.3g", checked, worst)};
}

// 4. Brute-force sensitivity of L_pri against the closed form.
Outcome sensitivity_oracle() {
  const double b3 = brute_force_delta_e(3);
  const double b4 = brute_force_delta_e(4);
  const double b5 = brute_force_delta_e(5);
  const double f3 = delta_e(3), f4 = delta_e(4);
  const bool equal = std::abs(b3 - f3) <= 1e-9 && std::abs(b4 - f4) <= 1e-9;
  const bool monotone = b3 < b4 && b4 < b5;
  return {equal && monotone,
          fmt("brute force %.9f %.9f %.9f vs closed form %.9f", b3, b4, b5, f3) +
              fmt(" %.9f", f4)};
}

// 5. MCMC reaches the brute-force public optimum on two bridged triangles.
Outcome mcmc_quality() {
  const PrivacyGraph g(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}}, {});
  const BruteForceBest best = brute_force_best_dendrogram(g, LikelihoodKind::kPublic);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    McmcConfig c;
    c.max_steps = 10000;
    c.convergence_window = c.max_steps;
    c.seed = seed;
    const McmcResult r = run_mcmc(g, c);
    good += std::abs(r.best_l_pub - best.likelihood) <= 0.01 * std::abs(best.likelihood);
  }
  return {best.shapes == 945 && good >= 9,
          fmt("%g/10 seeds within 1%% of max L_pub %.6f over %g shapes", good, best.likelihood,
              static_cast<double>(best.shapes))};
}

// 6. Sampled edge frequencies match the LCA probabilities.
Outcome sampler_marginals() {
  const NodeId n = 12;
  RngStream rng(6);
  Dendrogram d = random_dendrogram(n, rng);
  std::vector<InternalStats> stats(d.internal_count());
  for (InternalStats& s : stats) s.ptilde = 0.05 + 0.9 * rng.uniform();
  d.set_stats(stats);
  const int samples = 10000;
  std::vector<std::vector<int>> counts(n, std::vector<int>(n, 0));
  const RngStream root(60);
  const std::vector<bool> all(n, true);
  for (int i = 0; i < samples; ++i)
    for (const Edge& e : sample_private_graph(d, all, root.split(i))) ++counts[e.u][e.v];
  int inside = 0, total = 0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = d.stats_at(lca(d, u, v)).ptilde;
      const double sd = std::sqrt(samples * p * (1 - p));
      inside += std::abs(counts[u][v] - samples * p) <= 3 * sd;
      ++total;
    }
  }
  const double frac = static_cast<double>(inside) / total;
  return {frac >= 0.95, fmt("%g of %g pairs within 3 sd (%.3f)", inside, total, frac)};
}

// 7. Zero noise reproduces the maximum-likelihood private probabilities.
Outcome zero_noise_regression() {
  RngStream rng(7);
  const double never = std::numeric_limits<double>::max();
  for (int trial = 0; trial < 50; ++trial) {
    const NodeId n = 3 + static_cast<NodeId>(rng.uniform_int(40));
    const PrivacyGraph g = random_graph(n, 0.1, 0.25, rng);
    const GraphIndex idx = GraphIndex::from(g);
    Dendrogram d = compute_stats(random_dendrogram(n, rng), idx);
    ZeroNoise zero;
    calculate_noisy_prob(d, idx, {1.0, never, never}, zero);
    for (const InternalStats& s : d.stats())
      if (s.ptilde != s.pbar) return {false, fmt("mismatch in trial %g", trial)};
  }
  return {true, "50 (graph, dendrogram) pairs reproduce pbar exactly"};
}

// 8. Every public edge survives sanitization.
Outcome public_edge_preservation() {
  RngStream rng(8);
  std::size_t checked = 0;
  for (int run = 0; run < 100; ++run) {
    const NodeId n = 5 + static_cast<NodeId>(rng.uniform_int(40));
    const PrivacyGraph g = random_graph(n, 0.15, 0.15, rng);
    PipelineConfig c;
    c.eps_e1 = 0.05 + 5 * rng.uniform();
    c.eps_e2 = 0.05 + 5 * rng.uniform();
    c.mcmc.max_steps = 500;
    c.seed = rng.next_u64();
    PipelineInputs in;
    in.graph = g;
    const PipelineOutputs out = run_pipeline(PipelineMode::kEdges, c, in);
    const auto& released = out.graph.pub_edges();
    if (!std::includes(released.begin(), released.end(), g.pub_edges().begin(),
                       g.pub_edges().end()))
      return {false, fmt("public edge lost in run %g", run)};
    checked += g.pub_edges().size();
  }
  return {true, fmt("100 runs, %g public edges all present", static_cast<double>(checked))};
}

// 9. Identical seed gives byte-identical outputs.
Outcome end_to_end_determinism() {
  PlantedPartitionParams p;
  p.n = 40;
  PipelineInputs in;
  in.graph = planted_partition(p, RngStream(9)).graph;
  FeatureMatrix f(40, 6);
  RngStream rng(90);
  for (std::size_t r = 0; r < 40; ++r)
    for (std::size_t c = 0; c < 6; ++c) f.at(r, c) = rng.uniform() * 100 - 50;
  in.features = f;
  in.scores = ScoreInputs{{0.1, 0.4, 0.3, 0.9, 0.2, 0.6},
                          {0.0, 0.1, 0.3, 0.5, 0.4, 0.2},
                          {0.5, -0.3, 0.2, 0.1, -0.9, 0.4}};
  in.input_hash = fnv1a64(format_graph(in.graph) + format_features(f));
  PipelineConfig c;
  c.seed = 2026;
  c.chains = 2;
  c.mcmc.max_steps = 5000;
  const PipelineOutputs a = run_pipeline(PipelineMode::kFull, c, in);
  const PipelineOutputs b = run_pipeline(PipelineMode::kFull, c, in);
  const bool same = format_graph(a.graph) == format_graph(b.graph) &&
                    format_features(*a.features) == format_features(*b.features) &&
                    a.metadata.dump(2) == b.metadata.dump(2);
  return {same, same ? "graph, features and metadata identical across two runs"
                     : "outputs differ between runs"};
}

// 10. Attack AUC on planted graphs: high on the original, near chance after
// sanitization, and non-increasing as the budget shrinks.
Outcome defense_trend() {
  const int seeds = 20;
  PlantedPartitionParams params;
  params.n = 100;
  params.private_fraction = 0.2;
  const std::vector<double> budgets{10.0, 1.0, 0.1};
  double original = 0.0;
  std::vector<std::vector<double>> auc(budgets.size());
  for (int s = 0; s < seeds; ++s) {
    const PlantedGraph planted = planted_partition(params, RngStream(1000 + s));
    const auto pairs = matched_candidates(planted.graph, planted.community, RngStream(2000 + s));
    original += edge_inference_attack(planted.graph, pairs).auc;
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      PipelineConfig c;
      c.eps_e1 = budgets[b] / 2;
      c.eps_e2 = budgets[b] / 2;
      c.mcmc.max_steps = 20000;
      c.seed = static_cast<std::uint64_t>(3000 + s);
      PipelineInputs in;
      in.graph = planted.graph;
      const PipelineOutputs out = run_pipeline(PipelineMode::kEdges, c, in);
      auc[b].push_back(edge_inference_attack(out.graph, pairs).auc);
    }
  }
  original /= seeds;
  std::vector<double> mean;
  for (const auto& a : auc) mean.push_back(std::accumulate(a.begin(), a.end(), 0.0) / seeds);
  // Non-increasing over the ensemble: no step may rise by more than two
  // standard errors of the paired per-seed difference.
  bool trend = true;
  std::string steps;
  for (std::size_t b = 0; b + 1 < budgets.size(); ++b) {
    double m = 0.0, v = 0.0;
    for (int s = 0; s < seeds; ++s) m += auc[b + 1][s] - auc[b][s];
    m /= seeds;
    for (int s = 0; s < seeds; ++s) v += std::pow(auc[b + 1][s] - auc[b][s] - m, 2);
    const double se = std::sqrt(v / (seeds - 1) / seeds);
    trend = trend && m <= 2.0 * se;
    steps += fmt(", rise %.4f (2se %.4f)", m, 2.0 * se);
  }
  const bool exposed = original > 0.85;
  const bool defended = mean[1] < 0.6;
  return {exposed && defended && trend,
          fmt("AUC original %.4f, eps_e=10 %.4f, eps_e=1 %.4f", original, mean[0], mean[1]) +
              fmt(", eps_e=0.1 %.4f", mean[2]) + steps};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact feature LDP conformance", 5, ldp_conformance},
      {2, "budget conservation", 5, budget_conservation},
      {3, "likelihood oracle equivalence", 10, likelihood_oracle},
      {4, "sensitivity closed form vs brute force", 120, sensitivity_oracle},
      {5, "MCMC optimization quality", 30, mcmc_quality},
      {6, "sampler marginal correctness", 60, sampler_marginals},
      {7, "zero-noise regression", 60, zero_noise_regression},
      {8, "public-edge preservation", 60, public_edge_preservation},
      {9, "end-to-end determinism", 60, end_to_end_determinism},
      {10, "defense trend", 300, defense_trend},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s: %s (%.2fs, limit %.0fs) %s%s\n", c.id,
                pass ? "PASS" : "FAIL", c.name, secs, c.limit_s, o.detail.c_str(),
                in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
