// SPDX-License-Identifier: Apache-2.0
//
// rispos: RIS-aided RSS positioning simulator and configuration optimizer
// Copyright (C) 2026 The rispos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rispos/channel.hpp"
#include "rispos/inference.hpp"
#include "rispos/optimizer.hpp"
#include "rispos/random.hpp"
#include "rispos/scene.hpp"

namespace rispos {

/// Durations of the four steps of a cycle in seconds. Reported only; the simulation runs
/// in logical time.
struct CycleTiming {
    double cycle = 0.1;
    double optimization = 0.05;
    double broadcast = 0.01;
    double measurement = 0.02;
};

struct ProtocolConfig {
    std::size_t cycles = 3;
    std::size_t users = 1;
    double alpha = 1000.0;
    OptimizerSettings optimizer;
    CycleTiming timing;
    std::uint64_t seed = 1;

    void validate() const;
};

/// The positioning objective over RIS configurations for one belief state.
///
/// Neighbor moves are scored through the O(N) field-swap path of the gain table.
class PositioningObjective final : public Objective {
public:
    PositioningObjective(const GainTable& table, const BeliefState& beliefs, const LossParams& params,
                         double sigma, double tx_power_db);

    double evaluate(const Configuration& config) const override;
    void evaluate_moves(const Configuration& center, std::span<const Move> moves,
                        std::span<double> losses) const override;

    /// Loss of an arbitrary RSS map under the same beliefs.
    double loss_of_map(std::span<const double> mean_db) const { return evaluator_(mean_db); }

private:
    const GainTable& table_;
    LossEvaluator evaluator_;
    double tx_power_db_;
};

/// What the AP decided for one cycle: the configuration and the mean RSS map it produces.
struct PatternDecision {
    Configuration config;
    std::vector<double> mean_db;
    double loss = 0.0;
    std::size_t evaluations = 0;
    std::size_t lmcs_moves = 0;
    std::size_t lmcs_runs = 0;
};

/// Chooses the RSS pattern of a cycle from the current beliefs (the optimization step).
class PatternPolicy {
public:
    virtual ~PatternPolicy() = default;
    virtual PatternDecision choose(const BeliefState& beliefs, std::size_t cycle, Rng& rng) = 0;
};

/// Runs the configuration optimizer on the positioning objective.
class OptimizedPolicy final : public PatternPolicy {
public:
    OptimizedPolicy(const Scene& scene, const GainTable& table, const LossParams& params,
                    OptimizerSettings settings);
    PatternDecision choose(const BeliefState& beliefs, std::size_t cycle, Rng& rng) override;

private:
    const Scene& scene_;
    const GainTable& table_;
    const LossParams& params_;
    OptimizerSettings settings_;
};

struct CycleRecord {
    std::size_t cycle = 0;
    Configuration config;
    std::vector<double> measurements;  // one per user, dB
    BeliefState posterior;
    double loss = 0.0;
    double optimization_seconds = 0.0;
    std::size_t evaluations = 0;
    std::size_t lmcs_moves = 0;
    std::vector<std::size_t> fallback_users;
};

/// Per-trial random streams: one for the policy, one noise stream per user.
struct TrialStreams {
    Rng policy;
    std::vector<Rng> noise;

    static TrialStreams from_seed(std::uint64_t seed, std::size_t users);
};

struct CycleOutcome {
    CycleRecord record;
    BeliefState beliefs;
};

/// One optimize -> broadcast -> measure -> respond round.
CycleOutcome run_cycle(const BeliefState& state, const Scene& scene, std::span<const std::size_t> true_blocks,
                       std::size_t cycle, PatternPolicy& policy, TrialStreams& streams);

/// Same round with the configuration optimizer as the policy.
CycleOutcome run_cycle(const BeliefState& state, const Scene& scene, const GainTable& table,
                       const LossParams& params, std::span<const std::size_t> true_blocks,
                       const ProtocolConfig& cfg, std::size_t cycle, TrialStreams& streams);

struct PositioningRun {
    std::vector<std::size_t> estimates;
    std::vector<CycleRecord> records;

    std::size_t total_evaluations() const;
    std::size_t total_lmcs_moves() const;
    double total_optimization_seconds() const;
};

/// K cycles from uniform beliefs; the final estimate of each user is the posterior argmax.
PositioningRun run_positioning(const ProtocolConfig& cfg, const Scene& scene,
                               std::span<const std::size_t> true_blocks, PatternPolicy& policy);

/// Convenience overload running the optimized policy.
PositioningRun run_positioning(const ProtocolConfig& cfg, const Scene& scene, const GainTable& table,
                               std::span<const std::size_t> true_blocks);

/// Mean distance between estimated and true block centers (m).
double positioning_error(std::span<const std::size_t> estimates, std::span<const std::size_t> true_blocks,
                         const Scene& scene);

}  // namespace rispos
