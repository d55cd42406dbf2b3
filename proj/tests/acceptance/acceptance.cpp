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

// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the exit code is
// nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "rispos/channel.hpp"
#include "rispos/harness.hpp"
#include "rispos/inference.hpp"
#include "rispos/optimizer.hpp"
#include "rispos/protocol.hpp"
#include "rispos/scene.hpp"

namespace {

using namespace rispos;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

unsigned g_threads = 1;
std::uint64_t g_seed = 20240601;

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> random_floored_prior(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    for (auto& v : p) {
        // Mix of ordinary weights, tiny weights and exact zeros (floored afterwards).
        const double pick = u(gen);
        v = pick < 0.15 ? 0.0 : pick < 0.35 ? std::pow(10.0, -12.0 * u(gen)) : u(gen);
    }
    if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
        p[0] = 1.0;
    }
    floor_and_normalize(p);
    return p;
}

// 1 -----------------------------------------------------------------------------------------
Outcome bound_dominance() {
    std::mt19937_64 gen(g_seed + 1);
    std::uniform_int_distribution<std::size_t> size(2, 6);
    std::uniform_real_distribution<double> sigma_dist(0.5, 5.0);
    std::uniform_real_distribution<double> spread_dist(0.0, 10.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double worst = -1.0;
    for (int instance = 0; instance < 500; ++instance) {
        const std::size_t n = size(gen);
        const double sigma = sigma_dist(gen);
        const double spread = spread_dist(gen);
        std::vector<double> mu(n);
        for (auto& m : mu) {
            m = -45.0 + spread * (u(gen) - 0.5);
        }
        const auto p = random_floored_prior(n, gen);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) {
                    continue;
                }
                ++pairs;
                const double exact = exact_confusion_integral(mu, p, sigma, a, b);
                const double bound = confusion_bound(mu[a], mu[b], p[a], p[b], sigma);
                worst = std::max(worst, exact - bound);
                violations += exact > bound + 1e-8;
            }
        }
    }
    return {violations == 0, std::to_string(pairs) + " ordered pairs over 500 instances, " +
                                 std::to_string(violations) + " violations, max(exact - bound) = " + fmt(worst)};
}

// 2 -----------------------------------------------------------------------------------------
Outcome channel_equivalence() {
    const SceneSpec spec = SceneSpec::room_profile();
    const Scene scene = build_scene(spec);
    const ReflectionModel model(spec.num_states, spec.reflection);
    const GainTable table(scene, model);
    std::vector<double> amplitudes;
    for (int c = 0; c < spec.num_states; ++c) {
        amplitudes.push_back(oracle::amplitude_curve(c * 2.0 * std::numbers::pi / spec.num_states,
                                                     spec.reflection.min_amplitude, spec.reflection.phase_offset,
                                                     spec.reflection.steepness));
    }
    Rng rng(g_seed + 2);
    std::uniform_int_distribution<std::size_t> block(0, scene.num_blocks() - 1);
    double worst_table = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto c = random_configuration(scene.num_elements(), spec.num_states, rng);
        const std::size_t n = block(rng);
        const double fast = mean_rss(table, c, spec.tx_power_db).mean_db[n];
        worst_table = std::max(worst_table, std::abs(fast - oracle::direct_mean_rss(scene, n, c.states, amplitudes)));
    }

    auto config = random_configuration(scene.num_elements(), spec.num_states, rng);
    auto field = table.total_field(config);
    std::uniform_int_distribution<std::size_t> element(0, scene.num_elements() - 1);
    std::uniform_int_distribution<int> state(0, spec.num_states - 1);
    double worst_drift = 0.0;
    std::vector<double> tracked(field.size());
    for (int step = 1; step <= 10000; ++step) {
        const std::size_t m = element(rng);
        const int s = state(rng);
        swap_element_state(table, field, m, config[m], s);
        config[m] = s;
        if (step % 1000 == 0) {
            field_to_mean_rss(field, spec.tx_power_db, tracked);
            const auto full = mean_rss(table, config, spec.tx_power_db).mean_db;
            for (std::size_t n = 0; n < full.size(); ++n) {
                worst_drift = std::max(worst_drift, std::abs(tracked[n] - full[n]));
            }
        }
    }
    return {worst_table <= 1e-9 && worst_drift < 1e-6,
            "table vs direct max |diff| = " + fmt(worst_table) + " dB (limit 1e-9); drift after 1e4 swaps = " +
                fmt(worst_drift) + " dB (limit 1e-6)"};
}

// 3 -----------------------------------------------------------------------------------------
Outcome local_minimum_certification() {
    std::mt19937_64 gen(g_seed + 3);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    OptimizerSettings settings;
    settings.epsilon = 0.1;
    std::size_t emitted = 0;
    std::size_t certified = 0;
    for (int objective = 0; objective < 100; ++objective) {
        std::vector<double> values(4096);
        for (auto& v : values) {
            v = value(gen);
        }
        const oracle::TableObjective f(6, 4, std::move(values));
        Rng rng(gen());
        for (int start = 0; start < 5; ++start) {
            const auto r = lmcs(random_configuration(6, 4, rng), f, 4, settings);
            ++emitted;
            certified += oracle::certified_local_minimum(f, r.config, 4, settings.epsilon);
        }
        // co_optimize emits LMCS outputs too.
        const auto co = co_optimize(f, 6, 4, settings, rng);
        for (const auto& e : co.minima.entries()) {
            ++emitted;
            certified += oracle::certified_local_minimum(f, e.config, 4, settings.epsilon);
        }
    }

    // Accepted moves per cycle against l^u / epsilon in desk-profile positioning runs.
    ExperimentSpec experiment;
    const Scene scene = build_scene(experiment.scene);
    const GainTable table(scene, ReflectionModel(experiment.scene.num_states, experiment.scene.reflection));
    const double upper = loss_upper_bound(experiment.protocol.users, scene.num_blocks(), experiment.protocol.alpha,
                                          experiment.scene.soi_dims);
    const double move_cap = upper / experiment.protocol.optimizer.epsilon;
    std::size_t max_moves = 0;
    bool within = true;
    for (std::size_t trial = 0; trial < 10; ++trial) {
        ProtocolConfig cfg = experiment.protocol;
        cfg.seed = trial_seed(g_seed + 3, trial);
        const auto truth = draw_ground_truth(cfg.seed, cfg.users, scene.num_blocks());
        const auto run = run_positioning(cfg, scene, table, truth);
        for (const auto& r : run.records) {
            max_moves = std::max(max_moves, r.lmcs_moves);
            within = within && static_cast<double>(r.lmcs_moves) <= move_cap;
        }
    }
    return {certified == emitted && within,
            std::to_string(certified) + "/" + std::to_string(emitted) +
                " LMCS outputs certified; max accepted moves per cycle " + std::to_string(max_moves) +
                " <= l^u/eps = " + fmt(move_cap, 8)};
}

// 4 -----------------------------------------------------------------------------------------
Outcome co_quality() {
    std::mt19937_64 gen(g_seed + 4);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    OptimizerSettings settings;
    settings.z_lower = 2;
    settings.z_upper = 5;
    int global_hits = 0;
    int certified = 0;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> values(27);
        for (auto& v : values) {
            v = value(gen);
        }
        const oracle::TableObjective f(3, 3, values);
        Rng rng(gen());
        const auto r = co_optimize(f, 3, 3, settings, rng);
        const double global = *std::min_element(values.begin(), values.end());
        global_hits += r.loss <= global;
        certified += oracle::certified_local_minimum(f, r.config, 3, settings.epsilon);
    }
    return {global_hits >= 40 && certified == 50,
            "global minimum in " + std::to_string(global_hits) + "/50 (need >= 40), certified local minimum in " +
                std::to_string(certified) + "/50"};
}

// 5 and 6 share sweep points; trial seeds do not depend on the point, so a point is computed once.
class PointCache {
public:
    const PointResult& get(const ExperimentSpec& base, SweepParameter parameter, double value, Scheme scheme,
                           std::size_t trials) {
        const ExperimentSpec point = apply_parameter(base, parameter, value);
        SweepSpec key_spec;
        key_spec.base = point;
        key_spec.values = {0.0};
        key_spec.trials = trials;
        key_spec.schemes = {scheme};
        key_spec.seed = g_seed;
        const std::string key = to_json(key_spec).dump();
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            SweepSpec spec;
            spec.base = base;
            spec.parameter = parameter;
            spec.values = {value};
            spec.trials = trials;
            spec.schemes = {scheme};
            spec.seed = g_seed;
            auto result = run_sweep(spec, g_threads);
            it = cache_.emplace(key, result.rows.front()).first;
        }
        return it->second;
    }

private:
    std::map<std::string, PointResult> cache_;
};

PointCache g_cache;

Outcome scheme_ordering() {
    const ExperimentSpec base;
    const auto& proposed = g_cache.get(base, SweepParameter::sigma, 2.0, Scheme::proposed, 200);
    const auto& random = g_cache.get(base, SweepParameter::sigma, 2.0, Scheme::random_config, 200);
    const auto& none = g_cache.get(base, SweepParameter::sigma, 2.0, Scheme::no_ris, 200);
    const auto test = paired_less_test(proposed.errors, random.errors);
    const bool ordered = proposed.mean_error < random.mean_error && random.mean_error < none.mean_error;
    return {ordered && test.p_value < 0.05,
            "mean error proposed " + fmt(proposed.mean_error) + " m, random_config " + fmt(random.mean_error) +
                " m, no_ris " + fmt(none.mean_error) + " m; paired t = " + fmt(test.t_statistic) +
                ", one-sided p = " + fmt(test.p_value)};
}

Outcome monotone_trends() {
    const ExperimentSpec base;
    struct Axis {
        SweepParameter parameter;
        std::vector<double> values;
        bool increasing;  // expected direction of the mean error
    };
    const std::vector<Axis> axes{
        {SweepParameter::sigma, {1.0, 2.0, 4.0}, true},
        {SweepParameter::elements, {4.0, 16.0, 36.0}, false},
        {SweepParameter::states, {2.0, 4.0, 8.0}, false},
        {SweepParameter::cycles, {1.0, 3.0, 5.0}, false},
        {SweepParameter::ris_distance, {1.0, 2.0, 3.0}, true},
    };
    bool pass = true;
    std::string detail;
    for (const auto& axis : axes) {
        std::vector<const PointResult*> rows;
        for (const double v : axis.values) {
            rows.push_back(&g_cache.get(base, axis.parameter, v, Scheme::proposed, 200));
        }
        bool ok = true;
        for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
            const double slack = std::max(rows[k]->stderr_error, rows[k + 1]->stderr_error);
            const double step = rows[k + 1]->mean_error - rows[k]->mean_error;
            ok = ok && (axis.increasing ? step >= -slack : step <= slack);
        }
        pass = pass && ok;
        detail += std::string(to_string(axis.parameter)) + (ok ? " ok [" : " VIOLATED [");
        for (std::size_t k = 0; k < rows.size(); ++k) {
            detail += fmt(rows[k]->mean_error) + "+-" + fmt(rows[k]->stderr_error, 2) + (k + 1 < rows.size() ? ", " : "");
        }
        detail += "] ";
    }
    return {pass, detail};
}

// 7 -----------------------------------------------------------------------------------------
Outcome complexity_shape() {
    // Loss evaluations of one LMCS run against M at fixed N = 125, I = 1.
    const std::vector<int> ms{4, 8, 16, 32};
    std::vector<double> evals;
    for (const int m : ms) {
        ExperimentSpec spec = apply_parameter(ExperimentSpec{}, SweepParameter::elements, m);
        const Scene scene = build_scene(spec.scene);
        const GainTable table(scene, ReflectionModel(spec.scene.num_states, spec.scene.reflection));
        const auto params = make_loss_params(scene, spec.protocol.alpha);
        const auto beliefs = BeliefState::uniform(1, scene.num_blocks());
        const PositioningObjective objective(table, beliefs, params, scene.sigma(), scene.tx_power_db());
        Rng rng(g_seed + 7);
        double total = 0.0;
        constexpr int kStarts = 8;
        for (int s = 0; s < kStarts; ++s) {
            const auto r = lmcs(random_configuration(scene.num_elements(), spec.scene.num_states, rng), objective,
                                spec.scene.num_states, spec.protocol.optimizer);
            total += static_cast<double>(r.evaluations);
        }
        evals.push_back(total / kStarts);
    }
    const double mx = std::accumulate(ms.begin(), ms.end(), 0.0) / ms.size();
    const double my = std::accumulate(evals.begin(), evals.end(), 0.0) / evals.size();
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
        sxy += (ms[k] - mx) * (evals[k] - my);
        sxx += (ms[k] - mx) * (ms[k] - mx);
        syy += (evals[k] - my) * (evals[k] - my);
    }
    const double r2 = sxy * sxy / (sxx * syy);

    // co_optimize wall time against I at fixed N, M; beliefs after one noisy cycle.
    const std::vector<std::size_t> users{1, 2, 4};
    std::vector<double> times;
    const ExperimentSpec base;
    const Scene scene = build_scene(base.scene);
    const GainTable table(scene, ReflectionModel(base.scene.num_states, base.scene.reflection));
    const auto params = make_loss_params(scene, base.protocol.alpha);
    for (const std::size_t i : users) {
        double total = 0.0;
        constexpr int kRuns = 4;
        for (int run = 0; run < kRuns; ++run) {
            std::mt19937_64 gen(g_seed + 70 + static_cast<std::uint64_t>(run));
            BeliefState beliefs(i, scene.num_blocks());
            for (std::size_t u = 0; u < i; ++u) {
                beliefs.set_row(u, random_floored_prior(scene.num_blocks(), gen));
            }
            const PositioningObjective objective(table, beliefs, params, scene.sigma(), scene.tx_power_db());
            Rng rng(g_seed + 71 + static_cast<std::uint64_t>(run));
            const auto start = Clock::now();
            co_optimize(objective, scene.num_elements(), base.scene.num_states, base.protocol.optimizer, rng);
            total += seconds_since(start);
        }
        times.push_back(total / kRuns);
    }
    const bool grows = times[0] < times[1] && times[1] < times[2];
    std::string detail = "LMCS evaluations at M=4,8,16,32: ";
    for (std::size_t k = 0; k < evals.size(); ++k) {
        detail += fmt(evals[k], 6) + (k + 1 < evals.size() ? ", " : "");
    }
    detail += " (R^2 = " + fmt(r2) + "); co_optimize seconds at I=1,2,4: " + fmt(times[0]) + ", " + fmt(times[1]) +
              ", " + fmt(times[2]);
    return {r2 >= 0.9 && grows, detail};
}

// 8 -----------------------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string drop_timing_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        cells.erase(cells.begin() + 5);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            out += cells[k] + (k + 1 < cells.size() ? "," : "\n");
        }
    }
    return out;
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / ("rispos_acceptance_" + std::to_string(g_seed));
    std::filesystem::remove_all(root);

    SweepSpec spec;
    spec.parameter = SweepParameter::sigma;
    spec.values = {1.0, 3.0};
    spec.trials = 12;
    spec.schemes = {Scheme::proposed, Scheme::random_config, Scheme::no_ris};
    spec.seed = g_seed + 8;
    spec.write_trials = true;
    const auto first = emit_report(run_sweep(spec, g_threads), spec, root / "first");
    const auto replay_spec = load_sweep_spec(first.manifest);
    const auto second = emit_report(run_sweep(replay_spec, std::max(2u, g_threads)), replay_spec, root / "second");
    const bool csv_same = slurp(first.csv) == slurp(second.csv);
    const bool trials_same = slurp(first.trials) == slurp(second.trials);

    // With wall timing on, every column except the timing one must still agree.
    SweepSpec timed = spec;
    timed.record_timing = true;
    timed.write_trials = false;
    const auto third = emit_report(run_sweep(timed, g_threads), timed, root / "timed");
    const bool rest_same = drop_timing_column(slurp(third.csv)) == drop_timing_column(slurp(first.csv));
    std::filesystem::remove_all(root);
    return {csv_same && trials_same && rest_same,
            std::string("manifest replay CSV ") + (csv_same ? "identical" : "DIFFERS") + ", trials.jsonl " +
                (trials_same ? "identical" : "DIFFERS") + ", wall-timed run non-timing columns " +
                (rest_same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rispos acceptance criteria"};
    std::vector<int> selected;
    g_threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--criterion", selected, "Criterion ids to run (default: all)")->check(CLI::Range(1, 8));
    app.add_option("--threads", g_threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--seed", g_seed, "Master seed");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "bound dominance", 30.0, bound_dominance},
        {2, "channel oracle equivalence", 60.0, channel_equivalence},
        {3, "local-minimum certification", 60.0, local_minimum_certification},
        {4, "configuration optimizer quality", 30.0, co_quality},
        {5, "scheme ordering", 15.0 * 60.0, scheme_ordering},
        {6, "monotone trends", 3600.0, monotone_trends},
        {7, "complexity shape", 600.0, complexity_shape},
        {8, "determinism", 600.0, determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        const auto start = Clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = seconds_since(start);
        const bool in_time = elapsed < c.limit_seconds;
        const bool pass = outcome.pass && in_time;
        all = all && pass;
        std::printf("criterion %d %s: %s | %s | %.1f s (limit %.0f s%s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    outcome.detail.c_str(), elapsed, c.limit_seconds, in_time ? "" : ", EXCEEDED");
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
