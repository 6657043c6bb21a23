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
// Sanitizes a small planted two-community graph and prints utility numbers.

#include <iostream>

#include "dpgraph/dpgraph.hpp"

int main() {
  using namespace dpgraph;
  PlantedPartitionParams params;
  params.n = 40;
  params.p_in = 0.4;
  params.p_out = 0.03;
  const PlantedGraph planted = planted_partition(params, RngStream(7));

  PipelineConfig config;
  config.eps_e1 = 1.0;
  config.eps_e2 = 1.0;
  config.mcmc.max_steps = 5000;
  config.seed = 42;

  PipelineInputs in;
  in.graph = planted.graph;
  const PipelineOutputs out = run_pipeline(PipelineMode::kEdges, config, in);

  std::cout << utility_metrics(planted.graph, out.graph).report().to_text();
  std::cout << out.metadata.dump(2) << '\n';
  return 0;
}
