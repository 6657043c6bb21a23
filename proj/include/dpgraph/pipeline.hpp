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
#ifndef DPGRAPH_PIPELINE_HPP_
#define DPGRAPH_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpgraph/error.hpp"
#include "dpgraph/feature_rr.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/graph_sampler.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/io.hpp"
#include "dpgraph/mcmc.hpp"
#include "dpgraph/noisy_prob.hpp"
#include "dpgraph/rng.hpp"
#include "dpgraph/scoring.hpp"

namespace dpgraph {

inline constexpr const char* kToolVersion = "0.1.0";

enum class PipelineMode { kFeatures, kEdges, kFull };

inline const char* to_string(PipelineMode m) {
  switch (m) {
    case PipelineMode::kFeatures:
      return "sanitize-features";
    case PipelineMode::kEdges:
      return "sanitize-edges";
    case PipelineMode::kFull:
      break;
  }
  return "sanitize";
}

inline bool runs_features(PipelineMode m) { return m != PipelineMode::kEdges; }
inline bool runs_edges(PipelineMode m) { return m != PipelineMode::kFeatures; }

struct PipelineConfig {
  double eps_f = 1.0;
  double eps_e1 = 0.5;
  double eps_e2 = 0.5;
  int k = 10;
  double gamma = 0.5;
  McmcConfig mcmc;  // eps_e1 and seed are taken from the fields above
  double tau1 = 1.0;
  double taue = 1.0;
  std::uint64_t seed = 0;
  std::size_t chains = 1;

  double eps_e() const { return eps_e1 + eps_e2; }

  McmcConfig mcmc_config() const {
    McmcConfig m = mcmc;
    m.eps_e1 = eps_e1;
    m.seed = seed;
    return m;
  }

  NoisyProbConfig noisy_prob_config() const { return {eps_e2, tau1, taue}; }

  void validate(PipelineMode mode) const {
    if (runs_features(mode)) {
      if (!(eps_f > 0.0)) throw ValidationError("--eps-f must be > 0");
      if (k < 2) throw ValidationError("--bins must be >= 2");
      if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ValidationError("--gamma must lie in [0, 1]");
    }
    if (runs_edges(mode)) {
      if (!(eps_e1 > 0.0) || !(eps_e2 > 0.0))
        throw ValidationError("--eps-e1 and --eps-e2 must be > 0");
      if (chains < 1) throw ValidationError("--chains must be >= 1");
      mcmc_config().validate();
      noisy_prob_config().validate();
    }
  }
};

struct PipelineInputs {
  PrivacyGraph graph;
  std::optional<FeatureMatrix> features;  // raw, not yet normalized
  std::optional<ScoreInputs> scores;
  std::uint64_t input_hash = 0;
};

struct PipelineOutputs {
  PrivacyGraph graph;
  std::optional<FeatureMatrix> features;
  std::optional<Dendrogram> dendrogram;
  nlohmann::ordered_json metadata;
};

namespace internal {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace internal

// scoring -> feature_rr on the features, mcmc -> noisy_prob -> graph_sampler
// on the edges, as selected by mode. Every random draw derives from
// config.seed; the metadata names eps_e = eps_e1 + eps_e2.
inline PipelineOutputs run_pipeline(PipelineMode mode, const PipelineConfig& config,
                                    const PipelineInputs& in,
                                    const TraceSink& trace = {}) {
  config.validate(mode);
  {
    const std::vector<std::string> problems = validate_graph(in.graph);
    if (!problems.empty()) throw ValidationError("graph: " + problems.front());
  }
  PipelineOutputs out;
  out.graph = in.graph;
  out.features = in.features;
  auto& meta = out.metadata;
  meta["tool"] = "dpgraph";
  meta["version"] = kToolVersion;
  meta["mode"] = to_string(mode);
  meta["seed"] = config.seed;
  meta["input_hash"] = internal::hex64(in.input_hash);
  meta["nodes"] = in.graph.node_count();
  const RngStream root(config.seed);

  if (runs_features(mode)) {
    if (!in.features || !in.scores)
      throw ValidationError("feature sanitization needs --features and --scores");
    if (in.features->rows() != in.graph.node_count())
      throw ValidationError("features: row count does not match the graph");
    if (in.scores->dimension() != in.features->cols())
      throw ValidationError("scores: dimension does not match feature columns");
    const ScoreSet scores = internal::run_stage("scoring", [&] {
      return make_score_set(in.scores->z, in.scores->z_masked, in.scores->shap,
                            config.gamma);
    });
    const std::vector<double> theta = floor_theta(scores.theta);
    const BudgetAllocation budget = internal::run_stage(
        "scoring", [&] { return allocate_budgets(theta, config.eps_f, config.k); });
    out.features = internal::run_stage("feature_rr", [&] {
      return randomize_features(normalize_features(*in.features), budget,
                                root.split(streams::kFeatures));
    });
    auto& fm = meta["features"];
    fm["eps_f"] = config.eps_f;
    fm["bins"] = config.k;
    fm["gamma"] = config.gamma;
    fm["dimension"] = budget.feature_count();
    fm["theta"] = theta;
    fm["eps_i"] = budget.eps_i;
    fm["sigma_i"] = budget.sigma_i;
  }

  if (runs_edges(mode)) {
    const PrivacyGraph& g = in.graph;
    auto& em = meta["edges"];
    em["eps_e1"] = config.eps_e1;
    em["eps_e2"] = config.eps_e2;
    em["eps_e"] = config.eps_e();
    em["chains"] = config.chains;
    em["eps_e1_composed"] = config.eps_e1 * static_cast<double>(config.chains);
    em["tau1"] = config.tau1;
    em["taue"] = config.taue;
    em["public_edges"] = g.pub_edges().size();
    em["private_edges"] = g.pri_edges().size();
    em["private_nodes"] = g.pri_nodes().size();
    if (g.pri_edges().empty()) {
      // Nothing to protect: the release is the input graph.
      em["sampled_private_edges"] = 0;
      em["released_private_edges"] = 0;
    } else {
      const McmcResult mc = internal::run_stage("mcmc", [&] {
        return run_chains(g, config.mcmc_config(), config.chains, trace);
      });
      Dendrogram d = mc.final_dendrogram;
      const GraphIndex idx = GraphIndex::from(g);
      LaplaceNoise noise(root.split(streams::kNoisyProb));
      const NoisyProbReport np = internal::run_stage("noisy_prob", [&] {
        return calculate_noisy_prob(d, idx, config.noisy_prob_config(), noise);
      });
      const std::vector<Edge> sampled = internal::run_stage("graph_sampler", [&] {
        return sample_private_graph(d, g.pri_mask(), root.split(streams::kGraphSampler));
      });
      const SanitizedGraph released = internal::run_stage("graph_sampler", [&] {
        return merge(g, sampled, config.eps_e1, config.eps_e2, config.seed);
      });
      out.graph = released.graph;
      out.dendrogram = d;
      em["delta_e"] = mc.delta_e;
      em["private_scale"] = mc.private_scale;
      auto& mm = em["mcmc"];
      mm["max_steps"] = config.mcmc.max_steps;
      mm["steps"] = mc.steps;
      mm["converged"] = mc.converged;
      mm["pub_substeps"] = config.mcmc.pub_substeps;
      mm["pri_substeps"] = config.mcmc.pri_substeps;
      mm["convergence_window"] = config.mcmc.convergence_window;
      mm["convergence_tol"] = config.mcmc.convergence_tol;
      mm["pub_accepted"] = mc.pub_accepted;
      mm["pri_accepted"] = mc.pri_accepted;
      mm["final_l_pub"] = mc.final_l_pub;
      mm["final_l_pri"] = mc.final_l_pri;
      mm["best_objective"] = mc.best_objective;
      em["noise_draws"] = np.noise_draws;
      em["collapsed_subtrees"] = np.collapsed_subtrees;
      em["sampled_private_edges"] = sampled.size();
      em["released_private_edges"] = released.graph.pri_edges().size();
    }
  }
  return out;
}

// Permanent release bookkeeping: one line "<input hash>\t<seed>" per release.
// Returns a warning when the same input was released before with another
// seed, then records this release.
inline std::optional<std::string> record_release(const std::string& log_path,
                                                 std::uint64_t input_hash,
                                                 std::uint64_t seed) {
  const std::string hash = internal::hex64(input_hash);
  std::optional<std::string> warning;
  bool already = false;
  {
    std::ifstream in(log_path);
    std::string line;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos || line.substr(0, tab) != hash) continue;
      const std::string prior = line.substr(tab + 1);
      if (prior == std::to_string(seed)) {
        already = true;
      } else if (!warning) {
        warning = "input " + hash + " was already released with seed " + prior +
                  "; a second release with a different seed spends the privacy "
                  "budget again";
      }
    }
  }
  if (!already) {
    std::ofstream log(log_path, std::ios::app);
    if (log) log << hash << '\t' << seed << '\n';
  }
  return warning;
}

}  // namespace dpgraph

#endif  // DPGRAPH_PIPELINE_HPP_
