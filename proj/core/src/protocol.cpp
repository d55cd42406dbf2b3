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

#include "rispos/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace rispos {

void ProtocolConfig::validate() const {
    if (cycles < 1) {
        throw std::invalid_argument("protocol: at least one cycle is required");
    }
    if (users < 1) {
        throw std::invalid_argument("protocol: at least one user is required");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("protocol: alpha must be non-negative");
    }
    optimizer.validate();
}

PositioningObjective::PositioningObjective(const GainTable& table, const BeliefState& beliefs,
                                           const LossParams& params, double sigma, double tx_power_db)
    : table_(table), evaluator_(beliefs, params, sigma), tx_power_db_(tx_power_db) {
    if (beliefs.blocks() != table.num_blocks()) {
        throw std::invalid_argument("positioning objective: beliefs and gain table differ in block count");
    }
}

double PositioningObjective::evaluate(const Configuration& config) const {
    const auto field = table_.total_field(config);
    std::vector<double> mean_db(field.size());
    field_to_mean_rss(field, tx_power_db_, mean_db);
    return evaluator_(mean_db);
}

void PositioningObjective::evaluate_moves(const Configuration& center, std::span<const Move> moves,
                                          std::span<double> losses) const {
    const auto base = table_.total_field(center);
    std::vector<Complex> field(base.size());
    std::vector<double> mean_db(base.size());
    for (std::size_t k = 0; k < moves.size(); ++k) {
        std::copy(base.begin(), base.end(), field.begin());
        swap_element_state(table_, field, moves[k].element, center[moves[k].element], moves[k].state);
        field_to_mean_rss(field, tx_power_db_, mean_db);
        losses[k] = evaluator_(mean_db);
    }
}

OptimizedPolicy::OptimizedPolicy(const Scene& scene, const GainTable& table, const LossParams& params,
                                 OptimizerSettings settings)
    : scene_(scene), table_(table), params_(params), settings_(settings) {
    settings_.validate();
}

PatternDecision OptimizedPolicy::choose(const BeliefState& beliefs, std::size_t /*cycle*/, Rng& rng) {
    const PositioningObjective objective(table_, beliefs, params_, scene_.sigma(), scene_.tx_power_db());
    auto result = co_optimize(objective, table_.num_elements(), table_.num_states(), settings_, rng);
    PatternDecision decision;
    decision.mean_db = mean_rss(table_, result.config, scene_.tx_power_db()).mean_db;
    decision.config = std::move(result.config);
    decision.loss = result.loss;
    decision.evaluations = result.evaluations;
    decision.lmcs_moves = result.lmcs_moves;
    decision.lmcs_runs = result.lmcs_runs;
    return decision;
}

TrialStreams TrialStreams::from_seed(std::uint64_t seed, std::size_t users) {
    TrialStreams streams{make_stream(seed, {static_cast<std::uint64_t>(StreamRole::policy)}), {}};
    streams.noise.reserve(users);
    for (std::size_t i = 0; i < users; ++i) {
        streams.noise.push_back(make_stream(seed, {static_cast<std::uint64_t>(StreamRole::noise), i}));
    }
    return streams;
}

CycleOutcome run_cycle(const BeliefState& state, const Scene& scene, std::span<const std::size_t> true_blocks,
                       std::size_t cycle, PatternPolicy& policy, TrialStreams& streams) {
    if (true_blocks.size() != state.users() || streams.noise.size() != state.users()) {
        throw std::invalid_argument("run_cycle: user count mismatch");
    }
    for (const auto b : true_blocks) {
        if (b >= scene.num_blocks()) {
            throw std::out_of_range("run_cycle: ground-truth block out of range");
        }
    }

    // 1) optimization
    const auto start = std::chrono::steady_clock::now();
    PatternDecision decision = policy.choose(state, cycle, streams.policy);
    const auto stop = std::chrono::steady_clock::now();
    if (decision.mean_db.size() != scene.num_blocks()) {
        throw std::logic_error("run_cycle: policy returned an RSS map of the wrong size");
    }

    // 2) broadcast is instantaneous in logical time; 3) measurement; 4) lossless TDM response.
    CycleOutcome out;
    out.record.cycle = cycle;
    out.record.loss = decision.loss;
    out.record.evaluations = decision.evaluations;
    out.record.lmcs_moves = decision.lmcs_moves;
    out.record.optimization_seconds = std::chrono::duration<double>(stop - start).count();
    out.beliefs = BeliefState(state.users(), state.blocks());
    out.record.measurements.resize(state.users());
    for (std::size_t i = 0; i < state.users(); ++i) {
        const double s = sample_rss(decision.mean_db[true_blocks[i]], scene.sigma(), streams.noise[i]);
        out.record.measurements[i] = s;
        const auto posterior = update_prior(state.row(i), decision.mean_db, s, scene.sigma());
        if (posterior.fell_back_to_uniform) {
            out.record.fallback_users.push_back(i);
        }
        out.beliefs.set_row(i, posterior.probabilities);
    }
    out.record.config = std::move(decision.config);
    out.record.posterior = out.beliefs;
    return out;
}

CycleOutcome run_cycle(const BeliefState& state, const Scene& scene, const GainTable& table,
                       const LossParams& params, std::span<const std::size_t> true_blocks,
                       const ProtocolConfig& cfg, std::size_t cycle, TrialStreams& streams) {
    OptimizedPolicy policy(scene, table, params, cfg.optimizer);
    return run_cycle(state, scene, true_blocks, cycle, policy, streams);
}

std::size_t PositioningRun::total_evaluations() const {
    std::size_t total = 0;
    for (const auto& r : records) {
        total += r.evaluations;
    }
    return total;
}

std::size_t PositioningRun::total_lmcs_moves() const {
    std::size_t total = 0;
    for (const auto& r : records) {
        total += r.lmcs_moves;
    }
    return total;
}

double PositioningRun::total_optimization_seconds() const {
    double total = 0.0;
    for (const auto& r : records) {
        total += r.optimization_seconds;
    }
    return total;
}

PositioningRun run_positioning(const ProtocolConfig& cfg, const Scene& scene,
                               std::span<const std::size_t> true_blocks, PatternPolicy& policy) {
    cfg.validate();
    if (true_blocks.size() != cfg.users) {
        throw std::invalid_argument("run_positioning: need one ground-truth block per user");
    }
    auto streams = TrialStreams::from_seed(cfg.seed, cfg.users);
    BeliefState beliefs = BeliefState::uniform(cfg.users, scene.num_blocks());

    PositioningRun run;
    run.records.reserve(cfg.cycles);
    for (std::size_t k = 0; k < cfg.cycles; ++k) {
        auto outcome = run_cycle(beliefs, scene, true_blocks, k, policy, streams);
        beliefs = std::move(outcome.beliefs);
        run.records.push_back(std::move(outcome.record));
    }

    run.estimates.resize(cfg.users);
    for (std::size_t i = 0; i < cfg.users; ++i) {
        const auto row = beliefs.row(i);
        run.estimates[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return run;
}

PositioningRun run_positioning(const ProtocolConfig& cfg, const Scene& scene, const GainTable& table,
                               std::span<const std::size_t> true_blocks) {
    const auto params = make_loss_params(scene, cfg.alpha);
    OptimizedPolicy policy(scene, table, params, cfg.optimizer);
    return run_positioning(cfg, scene, true_blocks, policy);
}

double positioning_error(std::span<const std::size_t> estimates, std::span<const std::size_t> true_blocks,
                         const Scene& scene) {
    if (estimates.size() != true_blocks.size()) {
        throw std::invalid_argument("positioning_error: length mismatch");
    }
    if (estimates.empty()) {
        throw std::invalid_argument("positioning_error: no users");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        total += (scene.block_center(estimates[i]) - scene.block_center(true_blocks[i])).norm();
    }
    return total / static_cast<double>(estimates.size());
}

}  // namespace rispos
