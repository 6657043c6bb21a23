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
// Command-line driver: sanitize features and/or edges, inspect budgets, audit.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpgraph/dpgraph.hpp"

namespace {

using namespace dpgraph;

constexpr int kExitOk = 0;
constexpr int kExitAuditFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

struct Options {
  PipelineConfig config;
  std::string graph, features, scores;
  std::string out_graph, out_features, meta, dendrogram_out, trace;
  std::string release_log;
  bool strip_labels = false;
  bool no_release_log = false;
  // audit
  std::string released;
  std::size_t dims = 0;
  bool attack = false;
};

void add_feature_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--eps-f", o.config.eps_f, "Feature privacy budget")->capture_default_str();
  cmd->add_option("--bins", o.config.k, "Number of discretization bins k")->capture_default_str();
  cmd->add_option("--gamma", o.config.gamma, "Weight of importance vs sensitivity")
      ->capture_default_str();
}

void add_edge_flags(CLI::App* cmd, Options& o) {
  McmcConfig& m = o.config.mcmc;
  cmd->add_option("--eps-e1", o.config.eps_e1, "Budget for the structure search")
      ->capture_default_str();
  cmd->add_option("--eps-e2", o.config.eps_e2, "Budget for the probability noise")
      ->capture_default_str();
  cmd->add_option("--mcmc-steps", m.max_steps, "Maximum MCMC steps")->capture_default_str();
  cmd->add_option("--chains", o.config.chains, "Independent chains")->capture_default_str();
  cmd->add_option("--pub-substeps", m.pub_substeps, "Public moves per step")
      ->capture_default_str();
  cmd->add_option("--pri-substeps", m.pri_substeps, "Private moves per step")
      ->capture_default_str();
  cmd->add_option("--convergence-window", m.convergence_window,
                  "Steps without improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--convergence-tol", m.convergence_tol, "Minimum objective improvement")
      ->capture_default_str();
  cmd->add_option("--tau1", o.config.tau1, "Collapse threshold on the node noise scale")
      ->capture_default_str();
  cmd->add_option("--taue", o.config.taue, "Collapse threshold on the subtree noise scale")
      ->capture_default_str();
  cmd->add_option("--trace", o.trace, "Write MCMC trace records to this file");
  cmd->add_option("--dendrogram-out", o.dendrogram_out, "Write the noisy dendrogram here");
  cmd->add_flag("--strip-labels", o.strip_labels, "Drop pub/pri labels from the output graph");
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--graph", o.graph, "Input edge list")->required();
  cmd->add_option("--seed", o.config.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--out-graph", o.out_graph, "Output edge list");
  cmd->add_option("--meta", o.meta, "Output metadata JSON (default <out>.meta.json)");
  cmd->add_option("--release-log", o.release_log,
                  "Release log used to detect re-releases (default <graph>.releases)");
  cmd->add_flag("--no-release-log", o.no_release_log, "Do not read or write a release log");
}

int run_sanitize(PipelineMode mode, const Options& o) {
  PipelineInputs in;
  const std::string graph_text = read_file(o.graph);
  std::string hashed = graph_text;
  in.graph = parse_graph(graph_text);
  const bool need_features = runs_features(mode);
  if (need_features && (o.features.empty() || o.scores.empty()))
    throw ValidationError("--features and --scores are required");
  if (!o.features.empty()) {
    const std::string text = read_file(o.features);
    hashed += '\x1f' + text;
    in.features = parse_features(text, in.graph.node_count());
  }
  if (need_features) {
    const std::string text = read_file(o.scores);
    hashed += '\x1f' + text;
    in.scores = parse_scores(text, in.features->cols());
  }
  if (o.out_graph.empty() && runs_edges(mode)) throw ValidationError("--out-graph is required");
  if (o.out_features.empty() && need_features)
    throw ValidationError("--out-features is required");
  in.input_hash = fnv1a64(hashed);

  std::optional<std::ofstream> trace_file;
  TraceSink trace;
  if (!o.trace.empty()) {
    trace_file.emplace(o.trace);
    if (!*trace_file) throw ValidationError("cannot open trace file " + o.trace);
    *trace_file << "step\tl_pub\tl_pri\tpub_accepted\tpri_accepted\n";
    trace = [&](const TraceRecord& r) {
      *trace_file << r.step << '\t' << internal::format_double(r.l_pub) << '\t'
                  << internal::format_double(r.l_pri) << '\t' << r.pub_accepted << '\t'
                  << r.pri_accepted << '\n';
    };
  }

  if (!o.no_release_log) {
    const std::string log = o.release_log.empty() ? o.graph + ".releases" : o.release_log;
    if (auto warning = record_release(log, in.input_hash, o.config.seed))
      std::cerr << "warning: " << *warning << '\n';
  }

  const PipelineOutputs out = run_pipeline(mode, o.config, in, trace);

  std::string meta_path = o.meta;
  if (!o.out_graph.empty()) {
    save_graph(out.graph, o.out_graph, o.strip_labels);
    if (meta_path.empty()) meta_path = o.out_graph + ".meta.json";
  }
  if (!o.out_features.empty()) {
    save_features(*out.features, o.out_features);
    if (meta_path.empty()) meta_path = o.out_features + ".meta.json";
  }
  write_file(meta_path, out.metadata.dump(2) + "\n");
  if (!o.dendrogram_out.empty() && out.dendrogram)
    write_file(o.dendrogram_out, to_newick(*out.dendrogram));
  return kExitOk;
}

int run_scores(const Options& o) {
  const ScoreInputs s = load_scores(o.scores);
  o.config.validate(PipelineMode::kFeatures);
  const ScoreSet set = internal::run_stage(
      "scoring", [&] { return make_score_set(s.z, s.z_masked, s.shap, o.config.gamma); });
  const std::vector<double> theta = floor_theta(set.theta);
  const BudgetAllocation b = allocate_budgets(theta, o.config.eps_f, o.config.k);
  std::cout << "feature\talpha\tbeta\ttheta\teps_i\tsigma_i\n";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    std::cout << i << '\t' << internal::format_double(set.alpha[i]) << '\t'
              << internal::format_double(set.beta[i]) << '\t'
              << internal::format_double(theta[i]) << '\t'
              << internal::format_double(b.eps_i[i]) << '\t'
              << internal::format_double(b.sigma_i[i]) << '\n';
  }
  return kExitOk;
}

int run_audit(const Options& o) {
  Report report;
  o.config.validate(PipelineMode::kFeatures);
  std::optional<BudgetAllocation> budget;
  if (!o.scores.empty()) {
    const ScoreInputs s = load_scores(o.scores);
    const ScoreSet set = make_score_set(s.z, s.z_masked, s.shap, o.config.gamma);
    budget = allocate_budgets(floor_theta(set.theta), o.config.eps_f, o.config.k);
  } else if (o.dims > 0) {
    budget = allocate_budgets(std::vector<double>(o.dims, 1.0 / static_cast<double>(o.dims)),
                              o.config.eps_f, o.config.k);
  }
  if (budget) report.append(audit_feature_ldp(*budget).report);

  if (!o.released.empty()) {
    if (o.graph.empty()) throw ValidationError("--released needs --graph");
    const PrivacyGraph g = load_graph(o.graph);
    const PrivacyGraph r = load_graph(o.released);
    if (r.node_count() != g.node_count())
      throw ValidationError("--released has a different node count than --graph");
    report.append(utility_metrics(g, r).report());
    if (o.attack) {
      RngStream rng(o.config.seed, {streams::kAudit});
      const std::vector<CandidatePair> pairs = uniform_candidates(g, rng);
      std::optional<FeatureMatrix> f;
      if (!o.features.empty()) f = normalize_features(load_features(o.features, g.node_count()));
      const AttackResult a = edge_inference_attack(r, pairs, f ? &*f : nullptr);
      report.add("attack_auc", a.auc);
    }
  } else if (!o.graph.empty()) {
    const PrivacyGraph g = load_graph(o.graph);
    if (g.node_count() <= kMaxBruteForceNodes) {
      const BruteForceBest b = brute_force_best_dendrogram(g, LikelihoodKind::kCombined);
      report.add("brute_force_shapes", static_cast<double>(b.shapes));
      report.add("brute_force_best_likelihood", b.likelihood);
    }
  }
  if (report.lines.empty())
    throw ValidationError("nothing to audit: give --scores, --dims, or --graph");
  std::cout << report.to_text();
  return report.all_pass() ? kExitOk : kExitAuditFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpgraph: differentially private release of attributed graphs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Options o;

  auto* feats = app.add_subcommand("sanitize-features", "Randomize node features only");
  add_common_flags(feats, o);
  add_feature_flags(feats, o);
  feats->add_option("--features", o.features, "Raw feature matrix (CSV)");
  feats->add_option("--scores", o.scores, "Score file with #z, #z_masked, #shap");
  feats->add_option("--out-features", o.out_features, "Output feature matrix");

  auto* edges = app.add_subcommand("sanitize-edges", "Release private edges only");
  add_common_flags(edges, o);
  add_edge_flags(edges, o);
  edges->add_option("--features", o.features, "Feature matrix passed through unchanged");
  edges->add_option("--out-features", o.out_features, "Output feature matrix");

  auto* both = app.add_subcommand("sanitize", "Randomize features and release edges");
  add_common_flags(both, o);
  add_feature_flags(both, o);
  add_edge_flags(both, o);
  both->add_option("--features", o.features, "Raw feature matrix (CSV)");
  both->add_option("--scores", o.scores, "Score file with #z, #z_masked, #shap");
  both->add_option("--out-features", o.out_features, "Output feature matrix");

  auto* scores = app.add_subcommand("scores", "Print scores and per-feature budgets");
  scores->add_option("--scores", o.scores, "Score file")->required();
  add_feature_flags(scores, o);

  auto* audit = app.add_subcommand("audit", "Check privacy and utility properties");
  add_feature_flags(audit, o);
  audit->add_option("--scores", o.scores, "Score file for the feature LDP check");
  audit->add_option("--dims", o.dims, "Feature count for a uniform-budget LDP check");
  audit->add_option("--graph", o.graph, "Original edge list");
  audit->add_option("--released", o.released, "Released edge list to compare against");
  audit->add_option("--features", o.features, "Features for the attack score");
  audit->add_flag("--attack", o.attack, "Run the edge inference attack");
  audit->add_option("--seed", o.config.seed, "Seed for candidate sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (feats->parsed()) return run_sanitize(PipelineMode::kFeatures, o);
    if (edges->parsed()) return run_sanitize(PipelineMode::kEdges, o);
    if (both->parsed()) return run_sanitize(PipelineMode::kFull, o);
    if (scores->parsed()) return run_scores(o);
    return run_audit(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
}
