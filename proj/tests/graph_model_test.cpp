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
#include "dpgraph/graph_model.hpp"

#include <gtest/gtest.h>

#include "dpgraph/rng.hpp"

namespace dpgraph {
namespace {

TEST(PrivacyGraph, CanonicalizesEdges) {
  PrivacyGraph g(4, {{2, 1}, {1, 2}, {0, 3}}, {{3, 2}});
  ASSERT_EQ(g.pub_edges().size(), 2u);
  EXPECT_EQ(g.pub_edges()[0], (Edge{0, 3}));
  EXPECT_EQ(g.pub_edges()[1], (Edge{1, 2}));
  EXPECT_EQ(g.pri_edges()[0], (Edge{2, 3}));
  EXPECT_TRUE(g.has_pub_edge({2, 1}));
  EXPECT_TRUE(g.has_pri_edge({2, 3}));
  EXPECT_FALSE(g.has_edge({0, 1}));
}

TEST(PrivacyGraph, NodeSetsFollowIncidence) {
  PrivacyGraph g(5, {{0, 1}}, {{1, 2}, {3, 2}});
  EXPECT_EQ(g.pub_nodes(), (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(g.pri_nodes(), (std::vector<NodeId>{1, 2, 3}));
  EXPECT_FALSE(g.is_pub_node(4));
  EXPECT_FALSE(g.is_pri_node(4));
}

TEST(PrivacyGraph, NodeSetsRecomputableOnRandomGraphs) {
  RngStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const NodeId n = 12;
    std::vector<Edge> pub, pri;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) {
        const double x = rng.uniform();
        if (x < 0.1) pub.push_back({u, v});
        else if (x < 0.2) pri.push_back({u, v});
      }
    PrivacyGraph g(n, pub, pri);
    EXPECT_TRUE(validate_graph(g).empty());
    for (NodeId x = 0; x < n; ++x) {
      bool in_pub = false, in_pri = false;
      for (const Edge& e : pub) in_pub |= (e.u == x || e.v == x);
      for (const Edge& e : pri) in_pri |= (e.u == x || e.v == x);
      EXPECT_EQ(g.is_pub_node(x), in_pub);
      EXPECT_EQ(g.is_pri_node(x), in_pri);
    }
  }
}

TEST(ValidateGraph, ReportsSelfLoop) {
  PrivacyGraph g(3, {{1, 1}}, {});
  const auto r = validate_graph(g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], "self-loop at 1");
}

TEST(ValidateGraph, ReportsDualClassEdge) {
  PrivacyGraph g(3, {{1, 2}}, {{2, 1}});
  const auto r = validate_graph(g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NE(r[0].find("dual-class edge"), std::string::npos);
}

TEST(ValidateGraph, ReportsOutOfRange) {
  PrivacyGraph g(3, {}, {{0, 3}});
  const auto r = validate_graph(g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NE(r[0].find("out of range"), std::string::npos);
}

TEST(ValidateGraph, PathGraphIsValid) {
  PrivacyGraph g(4, {{0, 1}, {2, 3}}, {{1, 2}});
  EXPECT_TRUE(validate_graph(g).empty());
}

TEST(NormalizeFeatures, MinMaxColumn) {
  FeatureMatrix m(3, 2, {0, -1, 5, 0, 10, 3});
  const FeatureMatrix n = normalize_features(m);
  EXPECT_DOUBLE_EQ(n.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(n.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(n.at(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(n.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(n.at(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(n.at(2, 1), 1.0);
}

TEST(NormalizeFeatures, ConstantColumnMapsToZero) {
  FeatureMatrix m(2, 1, {3, 3});
  const FeatureMatrix n = normalize_features(m);
  EXPECT_EQ(n.at(0, 0), 0.0);
  EXPECT_EQ(n.at(1, 0), 0.0);
}

TEST(NormalizeFeatures, OutputInUnitInterval) {
  RngStream rng(4);
  FeatureMatrix m(30, 5);
  for (std::size_t r = 0; r < 30; ++r)
    for (std::size_t c = 0; c < 5; ++c) m.at(r, c) = (rng.uniform() - 0.5) * 1e6;
  const FeatureMatrix n = normalize_features(m);
  for (double x : n.values()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(NormalizeFeatures, RejectsNonFinite) {
  FeatureMatrix m(2, 2, {0, 1, std::nan(""), 2});
  EXPECT_THROW(normalize_features(m), ValidationError);
}

TEST(FeatureMatrix, RejectsShapeMismatch) {
  EXPECT_THROW(FeatureMatrix(2, 2, std::vector<double>{1, 2, 3}), ValidationError);
}

}  // namespace
}  // namespace dpgraph
