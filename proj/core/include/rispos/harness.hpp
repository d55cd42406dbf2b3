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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rispos/protocol.hpp"
#include "rispos/scene.hpp"

namespace rispos {

enum class Scheme { proposed, random_config, no_ris };

enum class SweepParameter { sigma, elements, states, cycles, users, ris_distance };

std::string_view to_string(Scheme scheme);
std::string_view to_string(SweepParameter parameter);
Scheme parse_scheme(std::string_view name);
SweepParameter parse_sweep_parameter(std::string_view name);

/// Everything needed to run one trial of any scheme.
struct ExperimentSpec {
    SceneSpec scene = SceneSpec::desk_profile();
    ProtocolConfig protocol;
    /// AP antenna count of the no-RIS baseline.
    std::size_t no_ris_antennas = 2;

    void validate() const;
};

/// Returns `base` with the swept parameter set to `value`. Throws std::invalid_argument
/// for values that do not describe a valid experiment.
ExperimentSpec apply_parameter(const ExperimentSpec& base, SweepParameter parameter, double value);

/// Draws a random configuration every cycle.
class RandomConfigPolicy final : public PatternPolicy {
public:
    RandomConfigPolicy(const Scene& scene, const GainTable& table, const LossParams& params);
    PatternDecision choose(const BeliefState& beliefs, std::size_t cycle, Rng& rng) override;

private:
    const Scene& scene_;
    const GainTable& table_;
    const LossParams& params_;
};

/// No RIS: an AP with several antennas spaced half a wavelength apart along y, driven with
/// fresh uniform random phases every cycle. Each antenna radiates 1/A of the power.
class MultiAntennaPolicy final : public PatternPolicy {
public:
    MultiAntennaPolicy(const Scene& scene, const LossParams& params, std::size_t antennas);
    PatternDecision choose(const BeliefState& beliefs, std::size_t cycle, Rng& rng) override;

    /// RSS map for the given per-antenna phases (radians).
    std::vector<double> mean_rss_for_phases(std::span<const double> phases) const;
    std::size_t antennas() const { return antennas_; }

private:
    const Scene& scene_;
    const LossParams& params_;
    std::size_t antennas_;
    std::vector<Complex> antenna_gains_;  // A x N, row-major
};

PositioningRun random_config_baseline(const ProtocolConfig& cfg, const Scene& scene, const GainTable& table,
                                      std::span<const std::size_t> true_blocks);

PositioningRun no_ris_baseline(const ProtocolConfig& cfg, const Scene& scene,
                               std::span<const std::size_t> true_blocks, std::size_t antennas = 2);

struct TrialReport {
    Scheme scheme = Scheme::proposed;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> truth;
    std::vector<std::size_t> estimates;
    double error = 0.0;
    std::vector<double> loss_trace;
    double optimization_seconds = 0.0;
    std::size_t evaluations = 0;
    std::size_t lmcs_moves = 0;
    std::vector<CycleRecord> records;
};

/// Seed of trial `trial` under `master_seed`; shared by every scheme and sweep point.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);

/// Ground-truth blocks of a trial, drawn uniformly from the trial seed.
std::vector<std::size_t> draw_ground_truth(std::uint64_t seed, std::size_t users, std::size_t blocks);

TrialReport run_trial(const ExperimentSpec& spec, Scheme scheme, std::size_t trial, std::uint64_t master_seed);

struct SweepSpec {
    ExperimentSpec base;
    SweepParameter parameter = SweepParameter::sigma;
    std::vector<double> values;
    std::size_t trials = 200;
    std::vector<Scheme> schemes{Scheme::proposed};
    std::uint64_t seed = 1;
    std::string output = "out";
    /// Report optimizer wall time. Off by default: the CSV then reports 0 seconds and is
    /// byte-reproducible from the manifest.
    bool record_timing = false;
    /// Also write every trial (with its cycle records) as JSON lines.
    bool write_trials = false;

    void validate() const;
};

struct PointResult {
    Scheme scheme = Scheme::proposed;
    double value = 0.0;
    double mean_error = 0.0;
    double stderr_error = 0.0;
    double mean_opt_seconds = 0.0;
    double mean_evaluations = 0.0;
    /// Per-trial errors in trial order, for paired comparisons.
    std::vector<double> errors;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::sigma;
    std::size_t trials = 0;
    std::vector<PointResult> rows;
    /// Filled only when `write_trials` is set.
    std::vector<TrialReport> trials_detail;

    const PointResult& at(Scheme scheme, double value) const;
};

/// Runs every (value, scheme, trial) combination on `threads` workers. The result does not
/// depend on the thread count or completion order.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

/// Mean and standard error of one point from its per-trial reports.
PointResult aggregate(Scheme scheme, double value, std::span<const TrialReport> reports, bool record_timing);

/// One-sided paired comparison "a < b".
struct PairedComparison {
    std::size_t n = 0;
    double mean_difference = 0.0;  // mean(a - b)
    double t_statistic = 0.0;
    double p_value = 1.0;          // P(T <= t) under H0: mean(a - b) = 0
};
PairedComparison paired_less_test(std::span<const double> a, std::span<const double> b);

/// Sweep CSV: header `scheme,param,value,mean_error_m,stderr_m,mean_opt_seconds,mean_evals`.
std::string to_csv(const SweepResult& result);

nlohmann::json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SweepSpec load_sweep_spec(const std::filesystem::path& path);

nlohmann::json to_json(const TrialReport& report);

struct ReportFiles {
    std::filesystem::path csv;
    std::filesystem::path manifest;
    std::filesystem::path trials;  // empty unless written
};

/// Writes `sweep.csv` and `manifest.json` (and `trials.jsonl` when requested) into `dir`.
ReportFiles emit_report(const SweepResult& result, const SweepSpec& spec, const std::filesystem::path& dir);

}  // namespace rispos
