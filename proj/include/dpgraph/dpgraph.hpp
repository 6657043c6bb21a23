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
#ifndef DPGRAPH_DPGRAPH_HPP_
#define DPGRAPH_DPGRAPH_HPP_

#include "dpgraph/error.hpp"
#include "dpgraph/feature_rr.hpp"
#include "dpgraph/graph_model.hpp"
#include "dpgraph/graph_sampler.hpp"
#include "dpgraph/hrg.hpp"
#include "dpgraph/io.hpp"
#include "dpgraph/mcmc.hpp"
#include "dpgraph/noisy_prob.hpp"
#include "dpgraph/pipeline.hpp"
#include "dpgraph/privacy_audit.hpp"
#include "dpgraph/rng.hpp"
#include "dpgraph/scoring.hpp"

#endif  // DPGRAPH_DPGRAPH_HPP_
