// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "trackpred/dataset.hpp"
#include "trackpred/orca.hpp"
#include "trackpred/types.hpp"

namespace trackpred {

/// Dead reckoning from the last observed step: the velocity between the two
/// final history points, held constant over the horizon.
std::vector<WorldPoint> predict_constant_velocity(std::span<const WorldPoint> history, int steps, double fps);
std::vector<WorldPoint> predict_constant_velocity(const Sample& sample, double fps);

/// Multi-agent rollout: every agent in the anchor scene keeps its
/// anchor-time velocity as its preference while the reciprocal avoidance
/// rule resolves conflicts step by step. With no neighbors this reduces to
/// dead reckoning.
std::vector<WorldPoint> predict_rvo_rollout(const Sample& sample, const AnchorScene& scene, double fps,
                                            const OrcaParams& params = {});

}  // namespace trackpred
