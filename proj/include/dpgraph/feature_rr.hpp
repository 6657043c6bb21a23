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
#ifndef DPGRAPH_FEATURE_RR_HPP_
#define DPGRAPH_FEATURE_RR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "dpgraph/error.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/rng.hpp"
#include "dpgraph/scoring.hpp"

namespace dpgraph {

// Bin index t in {1..k} with (t-1)/k < value <= t/k; value 0 goes to bin 1.
inline int discretize(double value, int k) {
  if (k < 2) throw ValidationError("discretize: k must be >= 2");
  if (!(value >= 0.0 && value <= 1.0))
    throw ValidationError("discretize: value outside [0, 1]");
  if (value == 0.0) return 1;
  int t = static_cast<int>(std::ceil(value * k));
  // value * k can round across an integer; settle against the exact bounds.
  while (t > 1 && value <= static_cast<double>(t - 1) / k) --t;
  while (t < k && value > static_cast<double>(t) / k) ++t;
  return std::clamp(t, 1, k);
}

inline double bin_value(int t, int k) { return static_cast<double>(t) / k; }

// Pr(u/k | t/k) = exp(-|u - t| / (k sigma)) / C_t for u = 1..k.
struct RRDistribution {
  int k = 0;
  int t = 0;
  double sigma = 0.0;
  std::vector<double> probs;  // probs[u - 1]
  double c_t = 0.0;

  double prob(int u) const { return probs[static_cast<std::size_t>(u - 1)]; }
};

inline double rr_log_weight(int u, int t, int k, double sigma) {
  return -static_cast<double>(std::abs(u - t)) / (static_cast<double>(k) * sigma);
}

inline RRDistribution rr_distribution(int t, int k, double sigma) {
  if (k < 2) throw ValidationError("rr_distribution: k must be >= 2");
  if (t < 1 || t > k) throw ValidationError("rr_distribution: t outside 1..k");
  if (!(sigma > 0.0)) throw ValidationError("rr_distribution: sigma must be > 0");
  RRDistribution d;
  d.k = k;
  d.t = t;
  d.sigma = sigma;
  d.probs.resize(static_cast<std::size_t>(k));
  // The largest log-weight is 0 at u = t, so exponentiating directly is
  // already max-subtracted; terms that underflow are genuinely negligible.
  double total = 0.0;
  for (int u = 1; u <= k; ++u) {
    const double w = std::exp(rr_log_weight(u, t, k, sigma));
    d.probs[static_cast<std::size_t>(u - 1)] = w;
    total += w;
  }
  d.c_t = total;
  for (double& p : d.probs) p /= total;
  return d;
}

// Inverse-CDF sampler over a k-entry cumulative vector.
class RRSampler {
 public:
  explicit RRSampler(const RRDistribution& d) : cdf_(d.probs.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
      acc += d.probs[i];
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
  }

  // Returns u in {1..k} for a uniform draw in [0, 1).
  int draw(double uniform) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), uniform);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<double> cdf_;
};

// Discretizes every cell of a normalized matrix and resamples it from the
// randomized-response distribution of its feature. Cell (r, c) draws from
// rng.split(r).split(c), so the result does not depend on traversal order.
inline FeatureMatrix randomize_features(const FeatureMatrix& m,
                                        const BudgetAllocation& b,
                                        const RngStream& rng) {
  if (b.feature_count() != m.cols()) {
    throw ValidationError("randomize_features: budget has " +
                          std::to_string(b.feature_count()) +
                          " features, matrix has " + std::to_string(m.cols()));
  }
  const int k = b.k;
  std::vector<std::vector<RRSampler>> samplers(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    samplers[c].reserve(static_cast<std::size_t>(k));
    for (int t = 1; t <= k; ++t)
      samplers[c].emplace_back(rr_distribution(t, k, b.sigma_i[c]));
  }
  FeatureMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const RngStream row_stream = rng.split(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      RngStream cell = row_stream.split(c);
      const int t = discretize(m.at(r, c), k);
      const int u = samplers[c][static_cast<std::size_t>(t - 1)].draw(cell.uniform());
      out.at(r, c) = bin_value(u, k);
    }
  }
  return out;
}

// Largest Pr(u|t) / Pr(u|t') over all k^3 triples, by enumeration. Among
// triples that tie, the first in (u, t, t') lexicographic order is reported.
struct LdpRatio {
  double ratio = 0.0;
  double log_ratio = 0.0;
  int u = 0;
  int t = 0;
  int t_prime = 0;
};

inline LdpRatio ldp_max_ratio(int k, double sigma) {
  if (k < 2) throw ValidationError("ldp_max_ratio: k must be >= 2");
  if (!(sigma > 0.0)) throw ValidationError("ldp_max_ratio: sigma must be > 0");
  // log Pr(u|t) = -|u-t|/(k sigma) - log C_t; C_t computed once per t.
  std::vector<double> log_c(static_cast<std::size_t>(k + 1));
  for (int t = 1; t <= k; ++t) {
    double c = 0.0;
    for (int u = 1; u <= k; ++u) c += std::exp(rr_log_weight(u, t, k, sigma));
    log_c[static_cast<std::size_t>(t)] = std::log(c);
  }
  LdpRatio best;
  best.log_ratio = -std::numeric_limits<double>::infinity();
  for (int u = 1; u <= k; ++u) {
    for (int t = 1; t <= k; ++t) {
      const double num = rr_log_weight(u, t, k, sigma) - log_c[t];
      for (int tp = 1; tp <= k; ++tp) {
        const double lr = num - (rr_log_weight(u, tp, k, sigma) - log_c[tp]);
        // Mirror-image triples tie exactly in theory; keep the first one.
        if (!std::isfinite(best.log_ratio) ||
            lr > best.log_ratio + 1e-12 * std::max(1.0, std::abs(best.log_ratio)))
          best = {0.0, lr, u, t, tp};
      }
    }
  }
  best.ratio = std::exp(best.log_ratio);
  return best;
}

}  // namespace dpgraph

#endif  // DPGRAPH_FEATURE_RR_HPP_
