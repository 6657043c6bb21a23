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
#ifndef DPGRAPH_NOISY_PROB_HPP_
#define DPGRAPH_NOISY_PROB_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/rng.hpp"

namespace dpgraph {

// Inverse CDF of the zero-mean Laplace distribution with scale b:
//   F(x) = e^{x/b} / 2 for x < 0, 1 - e^{-x/b} / 2 for x >= 0.
inline double laplace_inverse_cdf(double uniform, double scale) {
  if (uniform < 0.5) return scale * std::log(2.0 * uniform);
  return -scale * std::log(2.0 * (1.0 - uniform));
}

inline double sample_laplace(double scale, RngStream& rng) {
  if (!(scale > 0.0)) throw ValidationError("sample_laplace: scale must be > 0");
  return laplace_inverse_cdf(rng.uniform_open(), scale);
}

// Source of the Laplace perturbations. Tests substitute the zero and
// scripted sources to trace the recursion exactly.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual double laplace(double scale) = 0;
};

class LaplaceNoise : public NoiseSource {
 public:
  explicit LaplaceNoise(RngStream rng) : rng_(std::move(rng)) {}
  double laplace(double scale) override { return sample_laplace(scale, rng_); }

 private:
  RngStream rng_;
};

class ZeroNoise : public NoiseSource {
 public:
  double laplace(double) override { return 0.0; }
};

// Replays a fixed sequence; throws if the recursion asks for more draws.
class ScriptedNoise : public NoiseSource {
 public:
  explicit ScriptedNoise(std::vector<double> values) : values_(std::move(values)) {}
  double laplace(double) override {
    if (next_ >= values_.size())
      throw ValidationError("ScriptedNoise: sequence exhausted");
    return values_[next_++];
  }
  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

struct NoisyProbConfig {
  double eps_e2 = 1.0;
  double tau1 = 1.0;
  double taue = 1.0;

  void validate() const {
    if (!(eps_e2 > 0.0)) throw ValidationError("noisy_prob: eps_e2 must be > 0");
    if (!(tau1 > 0.0) || !(taue > 0.0))
      throw ValidationError("noisy_prob: tau1 and taue must be > 0");
  }
};

struct NoisyProbReport {
  std::size_t noise_draws = 0;
  std::size_t perturbed_nodes = 0;  // nodes given their own noisy count
  std::size_t collapsed_subtrees = 0;
  std::size_t collapsed_nodes = 0;
};

namespace internal {

inline double noisy_ratio(double count, double noise, double pairs) {
  return std::min(1.0, std::max(0.0, count + noise) / pairs);
}

struct NoisyProbRun {
  const Dendrogram& shape;
  std::vector<InternalStats>& stats;
  const GraphIndex& g;
  const NoisyProbConfig& config;
  NoiseSource& noise;
  NoisyProbReport& report;
  std::vector<std::int64_t> pri_leaves;  // per node id

  std::int64_t count_pri(int id) {
    if (shape.is_leaf(id)) return g.pri_member[static_cast<std::size_t>(id)] ? 1 : 0;
    return pri_leaves[static_cast<std::size_t>(id)];
  }

  void recurse_children(int id) {
    for (int child : {shape.left(id), shape.right(id)})
      if (!shape.is_leaf(child) && count_pri(child) >= 2) visit(child);
  }

  // Private edges inside the leaf set under id (induced subgraph).
  std::int64_t induced_edges(int id) {
    const std::vector<int> internals = shape.internals_under(id);
    std::int64_t total = 0;
    for (int x : internals) total += stats[shape.internal_index(x)].ebar;
    return total;
  }

  void visit(int id) {
    InternalStats& s = stats[shape.internal_index(id)];
    const double cross = static_cast<double>(s.Nbar());
    if (cross == 0.0) {
      s.ptilde = 0.0;
      recurse_children(id);
      return;
    }
    const double scale = 1.0 / config.eps_e2;
    const double m = static_cast<double>(s.Lbar + s.Rbar);
    const double lambda_b = 1.0 / (config.eps_e2 * cross);
    const double lambda_c = 1.0 / (config.eps_e2 * m * (m - 1.0));
    if (lambda_b >= config.tau1 && lambda_c >= config.taue) {
      const double value = noisy_ratio(static_cast<double>(induced_edges(id)),
                                       noise.laplace(scale), m * (m - 1.0) / 2.0);
      ++report.noise_draws;
      ++report.collapsed_subtrees;
      for (int x : shape.internals_under(id)) {
        stats[shape.internal_index(x)].ptilde = value;
        ++report.collapsed_nodes;
      }
      return;
    }
    s.ptilde = noisy_ratio(static_cast<double>(s.ebar), noise.laplace(scale), cross);
    ++report.noise_draws;
    ++report.perturbed_nodes;
    recurse_children(id);
  }
};

}  // namespace internal

// Perturbs the private connection probabilities of d (whose private stats
// must be current) top-down from node r, writing ptilde into d's stats.
//
// At each node with private pairs on both sides: if both lambda_b =
// 1/(eps Lbar Rbar) >= tau1 and lambda_c = 1/(eps m (m-1)) >= taue, with
// m = Lbar + Rbar, the whole subtree is collapsed to one probability from the
// noisy induced edge count over m(m-1)/2 pairs; otherwise the node gets
// (ebar + Lap(1/eps)) / (Lbar Rbar) and both children are visited. Noisy
// counts floor at 0 and probabilities cap at 1. Nodes with Lbar Rbar = 0 get
// ptilde = 0 without a draw.
inline NoisyProbReport calculate_noisy_prob(Dendrogram& d, const GraphIndex& g,
                                            const NoisyProbConfig& config,
                                            int r, NoiseSource& noise) {
  config.validate();
  if (!d.has_stats()) throw ValidationError("calculate_noisy_prob: stats missing");
  check_leaves_match(d, g.n);
  if (d.is_leaf(r))
    throw ValidationError("calculate_noisy_prob: r must be an internal node");
  std::vector<InternalStats> stats = d.stats();
  for (InternalStats& s : stats) s.ptilde = 0.0;
  NoisyProbReport report;
  internal::NoisyProbRun run{d, stats, g, config, noise, report,
                             std::vector<std::int64_t>(d.node_count(), 0)};
  for (int id = d.first_internal(); id < static_cast<int>(d.node_count()); ++id) {
    const InternalStats& s = stats[d.internal_index(id)];
    run.pri_leaves[static_cast<std::size_t>(id)] = s.Lbar + s.Rbar;
  }
  run.visit(r);
  d.set_stats(std::move(stats));
  return report;
}

inline NoisyProbReport calculate_noisy_prob(Dendrogram& d, const GraphIndex& g,
                                            const NoisyProbConfig& config,
                                            NoiseSource& noise) {
  return calculate_noisy_prob(d, g, config, d.root(), noise);
}

}  // namespace dpgraph

#endif  // DPGRAPH_NOISY_PROB_HPP_
