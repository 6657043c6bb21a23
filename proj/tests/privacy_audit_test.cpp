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
#include "dpgraph/privacy_audit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dpgraph/mcmc.hpp"
#include "dpgraph/pipeline.hpp"
#include "test_util.hpp"

namespace dpgraph {
namespace {

TEST(AuditFeatureLdp, MinimalSigmaPassesWithEquality) {
  const BudgetAllocation b = allocate_budgets(std::vector<double>{0.2, 0.3, 0.5}, 2.0, 10);
  const FeatureLdpAudit a = audit_feature_ldp(b);
  EXPECT_TRUE(a.pass);
  ASSERT_EQ(a.features.size(), 3u);
  for (const FeatureLdpResult& f : a.features) {
    EXPECT_NEAR(f.worst.ratio, std::exp(f.eps), 1e-9 * std::exp(f.eps));
    EXPECT_EQ(f.worst.u, 1);
    EXPECT_EQ(f.worst.t, 1);
    EXPECT_EQ(f.worst.t_prime, 10);
  }
  EXPECT_TRUE(a.report.all_pass());
}

TEST(AuditFeatureLdp, HalvedSigmaFailsWithViolatingTriple) {
  BudgetAllocation b = allocate_budgets(std::vector<double>{1.0}, 1.0, 5);
  b.sigma_i[0] /= 2.0;
  const FeatureLdpAudit a = audit_feature_ldp(b);
  EXPECT_FALSE(a.pass);
  EXPECT_NEAR(a.features[0].worst.log_ratio, 4.0 / (5.0 * b.sigma_i[0]), 1e-9);
  EXPECT_FALSE(a.report.all_pass());
  EXPECT_NE(a.report.to_text().find("violating_t_prime\t5"), std::string::npos);
  EXPECT_NE(a.report.to_text().find("FAIL"), std::string::npos);
}

TEST(AuditFeatureLdp, InfiniteBudgetPassesTrivially) {
  BudgetAllocation b;
  b.k = 2;
  b.eps_f = std::numeric_limits<double>::infinity();
  b.eps_i = {b.eps_f};
  b.sigma_i = {0.0};
  EXPECT_TRUE(audit_feature_ldp(b).pass);
}

TEST(AuditFeatureLdp, Deterministic) {
  const BudgetAllocation b = allocate_budgets(std::vector<double>{0.4, 0.6}, 1.0, 30);
  EXPECT_EQ(audit_feature_ldp(b).report.to_text(), audit_feature_ldp(b).report.to_text());
}

TEST(BruteForceBest, ShapeCounts) {
  EXPECT_EQ(brute_force_best_dendrogram(PrivacyGraph(2, {{0, 1}}, {}), LikelihoodKind::kPublic)
                .shapes,
            1u);
  EXPECT_EQ(brute_force_best_dendrogram(PrivacyGraph(4, {{0, 1}}, {}), LikelihoodKind::kPublic)
                .shapes,
            15u);
  EXPECT_EQ(brute_force_best_dendrogram(PrivacyGraph(5, {{0, 1}}, {}), LikelihoodKind::kPublic)
                .shapes,
            105u);
  EXPECT_THROW(brute_force_best_dendrogram(PrivacyGraph(9, {{0, 1}}, {}), LikelihoodKind::kPublic),
               ValidationError);
}

TEST(BruteForceBest, DominatesMcmcOutput) {
  RngStream rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const PrivacyGraph g = testing::random_graph(7, 0.3, 0.2, rng);
    if (g.pub_edges().empty()) continue;
    const BruteForceBest best = brute_force_best_dendrogram(g, LikelihoodKind::kPublic);
    McmcConfig c;
    c.max_steps = 2000;
    c.seed = static_cast<std::uint64_t>(trial);
    const McmcResult r = run_mcmc(g, c);
    EXPECT_GE(best.likelihood + 1e-9, r.best_l_pub);
    EXPECT_GE(best.likelihood + 1e-9, r.final_l_pub);
  }
}

TEST(BruteForceDeltaE, MatchesClosedFormAndIsMonotone) {
  const double d3 = brute_force_delta_e(3);
  const double d4 = brute_force_delta_e(4);
  const double d5 = brute_force_delta_e(5);
  EXPECT_NEAR(d3, std::log(4.0), 1e-9);
  EXPECT_NEAR(d3, delta_e(3), 1e-9);
  EXPECT_NEAR(d4, delta_e(4), 1e-9);
  EXPECT_NEAR(d5, delta_e(5), 1e-9);
  EXPECT_LT(d3, d4);
  EXPECT_LT(d4, d5);
  // One pair and one shape: the likelihood is 0 either way, so ln 2 is a
  // conservative constant there.
  EXPECT_EQ(brute_force_delta_e(2), 0.0);
  EXPECT_LE(brute_force_delta_e(2), delta_e(2));
  EXPECT_THROW(brute_force_delta_e(6), ValidationError);
}

TEST(UtilityMetrics, IdenticalRelease) {
  RngStream rng(2);
  const PrivacyGraph g = testing::random_graph(15, 0.2, 0.2, rng);
  const UtilityMetrics m = utility_metrics(g, g);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  EXPECT_EQ(m.degree_tv, 0.0);
  EXPECT_EQ(m.edge_count_ratio, 1.0);
}

TEST(UtilityMetrics, EmptyPrivateReleaseHasZeroRecall) {
  const PrivacyGraph g(8, {{0, 1}}, {{2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}});
  const UtilityMetrics m = utility_metrics(g, g.public_subgraph());
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_DOUBLE_EQ(m.edge_count_ratio, 1.0 / 6.0);
  EXPECT_GT(m.degree_tv, 0.0);
  EXPECT_THROW(utility_metrics(g, PrivacyGraph(9, {}, {})), ValidationError);
}

TEST(UtilityMetrics, WeakNoiseBeatsStrongNoise) {
  double f1_weak = 0.0, f1_strong = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    PlantedPartitionParams params;
    params.n = 20;
    params.p_in = 0.6;
    params.p_out = 0.05;
    params.private_fraction = 0.5;
    const PlantedGraph planted = planted_partition(params, RngStream(100 + s));
    for (double eps : {100.0, 0.1}) {
      PipelineConfig c;
      c.eps_e1 = eps / 2;
      c.eps_e2 = eps / 2;
      c.mcmc.max_steps = 3000;
      c.seed = static_cast<std::uint64_t>(s);
      PipelineInputs in;
      in.graph = planted.graph;
      const PipelineOutputs out = run_pipeline(PipelineMode::kEdges, c, in);
      (eps > 1 ? f1_weak : f1_strong) += utility_metrics(planted.graph, out.graph).f1;
    }
  }
  EXPECT_GT(f1_weak / seeds, f1_strong / seeds);
}

TEST(RocAuc, Basics) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.9}, {false, true}), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.1}, {false, true}), 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5}, {false, true}), 0.5);
  EXPECT_NEAR(roc_auc(std::vector<double>{1, 2, 3, 4}, {false, true, false, true}), 0.75, 1e-15);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, {true, true}), ValidationError);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, {false, false}), ValidationError);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, {false}), ValidationError);
}

TEST(RocAuc, RandomScoresNearHalf) {
  RngStream rng(3);
  const std::size_t n = 4000;
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = i % 2 == 0;
  }
  // Null AUC variance for equal classes: (n1 + n2 + 1) / (12 n1 n2).
  const double n1 = n / 2.0;
  const double sd = std::sqrt((n + 1) / (12 * n1 * n1));
  EXPECT_NEAR(roc_auc(scores, labels), 0.5, 3 * sd);
}

TEST(EdgeInferenceAttack, OriginalReleaseIsExposed) {
  const PlantedGraph planted = planted_partition(PlantedPartitionParams{}, RngStream(4));
  const auto pairs = matched_candidates(planted.graph, planted.community, RngStream(5));
  const AttackResult a = edge_inference_attack(planted.graph, pairs);
  EXPECT_GT(a.auc, 0.85);
  // Regression baseline for this generator and seed.
  EXPECT_NEAR(a.auc, 0.9854227405, 1e-9);
  EXPECT_EQ(a.scores.size(), pairs.size());
}

TEST(EdgeInferenceAttack, UniformResampledPrivatePairsAreUninformative) {
  double total = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const PlantedGraph planted = planted_partition(PlantedPartitionParams{}, RngStream(200 + s));
    const PrivacyGraph& g = planted.graph;
    // Replace the private edges with as many uniform private-node pairs.
    const std::vector<NodeId> nodes = g.pri_nodes();
    RngStream rng(300 + s);
    std::vector<Edge> fake;
    while (fake.size() < g.pri_edges().size()) {
      const NodeId a = nodes[rng.uniform_int(nodes.size())];
      const NodeId b = nodes[rng.uniform_int(nodes.size())];
      if (a != b && !g.has_pub_edge(Edge(a, b))) fake.emplace_back(a, b);
    }
    const PrivacyGraph released(g.node_count(), g.pub_edges(), fake);
    const auto pairs = matched_candidates(g, planted.community, RngStream(400 + s));
    total += edge_inference_attack(released, pairs).auc;
  }
  const double mean = total / seeds;
  EXPECT_GE(mean, 0.45);
  EXPECT_LE(mean, 0.55);
}

TEST(EdgeInferenceAttack, FeatureTermAndValidation) {
  const PrivacyGraph g(4, {}, {{0, 1}});
  const std::vector<CandidatePair> pairs{{0, 1, true}, {2, 3, false}};
  FeatureMatrix f(4, 2, {1, 0, 1, 0, 1, 0, 0, 1});
  const AttackResult a = edge_inference_attack(g.public_subgraph(), pairs, &f, 0.0);
  EXPECT_EQ(a.auc, 1.0);
  EXPECT_THROW(edge_inference_attack(g, pairs, nullptr, 0.5), ValidationError);
  EXPECT_THROW(edge_inference_attack(g, pairs, &f, 1.5), ValidationError);
}

TEST(PlantedPartition, PrivateFractionAndReproducibility) {
  PlantedPartitionParams p;
  const PlantedGraph a = planted_partition(p, RngStream(6));
  const PlantedGraph b = planted_partition(p, RngStream(6));
  EXPECT_EQ(a.graph, b.graph);
  const double total = static_cast<double>(a.graph.pub_edges().size() + a.graph.pri_edges().size());
  EXPECT_EQ(a.graph.pri_edges().size(), static_cast<std::size_t>(std::llround(0.2 * total)));
  EXPECT_TRUE(validate_graph(a.graph).empty());
  EXPECT_NE(p.report().to_text().find("generator.rho\t0.2"), std::string::npos);
}

TEST(MatchedCandidates, NegativesAreNonEdgesInSameCommunity) {
  const PlantedGraph planted = planted_partition(PlantedPartitionParams{}, RngStream(7));
  const auto pairs = matched_candidates(planted.graph, planted.community, RngStream(8));
  std::size_t pos = 0, neg = 0;
  for (const CandidatePair& c : pairs) {
    if (c.positive) {
      ++pos;
      EXPECT_TRUE(planted.graph.has_pri_edge(Edge(c.u, c.v)));
    } else {
      ++neg;
      EXPECT_FALSE(planted.graph.has_edge(Edge(c.u, c.v)));
      EXPECT_TRUE(planted.graph.is_pri_node(c.v));
    }
  }
  EXPECT_EQ(pos, planted.graph.pri_edges().size());
  EXPECT_GT(neg, pos * 9 / 10);
}

}  // namespace
}  // namespace dpgraph
