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

#include <benchmark/benchmark.h>

#include "rispos/channel.hpp"
#include "rispos/inference.hpp"
#include "rispos/optimizer.hpp"
#include "rispos/protocol.hpp"
#include "rispos/scene.hpp"

namespace {

using namespace rispos;

struct Fixture {
    Scene scene;
    GainTable table;
    LossParams params;
    BeliefState beliefs;

    explicit Fixture(SceneSpec spec)
        : scene(build_scene(spec)),
          table(scene, ReflectionModel(spec.num_states, spec.reflection)),
          params(make_loss_params(scene, 1000.0)),
          beliefs(BeliefState::uniform(1, scene.num_blocks())) {}
};

SceneSpec spec_with_grid(int side) {
    SceneSpec spec = SceneSpec::desk_profile();
    spec.grid = {side, side, side};
    return spec;
}

void BM_PositioningLoss(benchmark::State& state) {
    const Fixture f(spec_with_grid(static_cast<int>(state.range(0))));
    const auto map = mean_rss(f.table, Configuration::zeros(f.scene.num_elements()), 0.0).mean_db;
    const LossEvaluator evaluator(f.beliefs, f.params, 2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluator(map));
    }
    state.SetComplexityN(static_cast<long>(f.scene.num_blocks()));
}
BENCHMARK(BM_PositioningLoss)->Arg(4)->Arg(5)->Arg(7)->Arg(10)->Complexity(benchmark::oNSquared);

void BM_ElementSwap(benchmark::State& state) {
    const Fixture f(SceneSpec::room_profile());
    auto config = Configuration::zeros(f.scene.num_elements());
    auto field = f.table.total_field(config);
    std::size_t m = 0;
    for (auto _ : state) {
        const int next = (config[m] + 1) % f.table.num_states();
        swap_element_state(f.table, field, m, config[m], next);
        config[m] = next;
        m = (m + 1) % f.scene.num_elements();
        benchmark::DoNotOptimize(field.data());
    }
}
BENCHMARK(BM_ElementSwap);

void BM_Lmcs(benchmark::State& state) {
    SceneSpec spec = SceneSpec::desk_profile();
    const int side = static_cast<int>(state.range(0));
    spec.ris_grid = {side, side};
    const Fixture f(spec);
    const PositioningObjective objective(f.table, f.beliefs, f.params, spec.noise_sigma_db, spec.tx_power_db);
    const OptimizerSettings settings;
    Rng rng(7);
    for (auto _ : state) {
        const auto start = random_configuration(f.scene.num_elements(), spec.num_states, rng);
        benchmark::DoNotOptimize(lmcs(start, objective, spec.num_states, settings).loss);
    }
}
BENCHMARK(BM_Lmcs)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
