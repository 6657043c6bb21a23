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
#ifndef DPGRAPH_SCORING_HPP_
#define DPGRAPH_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dpgraph/error.hpp"

namespace dpgraph {

// Per-feature importance (alpha), sensitivity (beta) and unified score
// (theta), each summing to one.
struct ScoreSet {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> theta;
  double gamma = 0.5;
};

// Heterogeneous feature budgets and the matching randomized-response scales.
struct BudgetAllocation {
  double eps_f = 0.0;
  int k = 0;
  std::vector<double> eps_i;
  std::vector<double> sigma_i;

  std::size_t feature_count() const { return eps_i.size(); }
};

namespace internal {

inline std::vector<double> l1_normalized_abs(std::span<const double> v,
                                             const char* what) {
  double norm = 0.0;
  for (double x : v) {
    if (!std::isfinite(x))
      throw ValidationError(std::string(what) + ": non-finite entry");
    norm += std::abs(x);
  }
  if (norm == 0.0)
    throw ValidationError(std::string(what) + ": zero L1 norm");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::abs(v[i]) / norm;
  return out;
}

inline void normalize_in_place(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
}

}  // namespace internal

// beta_i = |z_i - z^_i| / ||z - z^||_1, where z^ is the embedding of the input
// with its sensitive parts masked out.
inline std::vector<double> sensitivity_scores(std::span<const double> z,
                                              std::span<const double> z_masked) {
  if (z.empty() || z.size() != z_masked.size())
    throw ValidationError("sensitivity_scores: length mismatch or empty input");
  std::vector<double> diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - z_masked[i];
  return internal::l1_normalized_abs(diff, "sensitivity_scores");
}

// alpha_i = |shap_i| / ||shap||_1.
inline std::vector<double> importance_scores(std::span<const double> shap_raw) {
  if (shap_raw.empty()) throw ValidationError("importance_scores: empty input");
  return internal::l1_normalized_abs(shap_raw, "importance_scores");
}

// The linear combination before renormalization:
//   gamma * alpha_i + (1 - gamma) * (beta_min + beta_max - beta_i).
inline std::vector<double> unify_scores_raw(std::span<const double> alpha,
                                            std::span<const double> beta,
                                            double gamma) {
  if (alpha.empty() || alpha.size() != beta.size())
    throw ValidationError("unify_scores: alpha/beta length mismatch");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ValidationError("unify_scores: gamma must lie in [0, 1]");
  const auto [lo, hi] = std::minmax_element(beta.begin(), beta.end());
  const double beta_min = *lo;
  const double beta_max = *hi;
  std::vector<double> theta(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    theta[i] = gamma * alpha[i] +
               (1.0 - gamma) * (beta_min + (beta_max - beta[i]));
  }
  return theta;
}

inline std::vector<double> unify_scores(std::span<const double> alpha,
                                        std::span<const double> beta,
                                        double gamma) {
  std::vector<double> theta = unify_scores_raw(alpha, beta, gamma);
  internal::normalize_in_place(theta);
  return theta;
}

inline double theta_floor(std::size_t d) { return 1e-6 / static_cast<double>(d); }

// theta_i <- max(theta_i, 1e-6 / d), then renormalize. Keeps every budget
// strictly positive so that no sigma_i is infinite.
inline std::vector<double> floor_theta(std::vector<double> theta) {
  const double floor = theta_floor(theta.size());
  for (double& t : theta) t = std::max(t, floor);
  internal::normalize_in_place(theta);
  return theta;
}

inline ScoreSet make_score_set(std::span<const double> z,
                               std::span<const double> z_masked,
                               std::span<const double> shap_raw, double gamma) {
  ScoreSet s;
  s.gamma = gamma;
  s.beta = sensitivity_scores(z, z_masked);
  s.alpha = importance_scores(shap_raw);
  if (s.alpha.size() != s.beta.size())
    throw ValidationError("scores: SHAP and embedding lengths differ");
  s.theta = unify_scores(s.alpha, s.beta, gamma);
  return s;
}

// sigma_i = (k - 1) / (k * eps_f * theta_i): the smallest scale for which the
// k-bin randomized response is eps_i-LDP.
inline double minimal_sigma(int k, double eps) {
  return static_cast<double>(k - 1) / (static_cast<double>(k) * eps);
}

inline BudgetAllocation allocate_budgets(std::span<const double> theta,
                                         double eps_f, int k) {
  if (!(eps_f > 0.0)) throw ValidationError("allocate_budgets: eps_f must be > 0");
  if (k < 2) throw ValidationError("allocate_budgets: k must be >= 2");
  if (theta.empty()) throw ValidationError("allocate_budgets: empty theta");
  BudgetAllocation b;
  b.eps_f = eps_f;
  b.k = k;
  b.eps_i.resize(theta.size());
  b.sigma_i.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) {
      throw ValidationError("allocate_budgets: theta[" + std::to_string(i) +
                            "] is not strictly positive");
    }
    b.eps_i[i] = eps_f * theta[i];
    b.sigma_i[i] = minimal_sigma(k, b.eps_i[i]);
  }
  return b;
}

}  // namespace dpgraph

#endif  // DPGRAPH_SCORING_HPP_
