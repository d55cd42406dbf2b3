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

// Command-line driver: parameter sweeps and single positioning trials.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rispos/harness.hpp"

namespace {

int run_sweep_command(const std::string& spec_path, const std::string& out_dir, unsigned threads) {
    auto spec = rispos::load_sweep_spec(spec_path);
    if (!out_dir.empty()) {
        spec.output = out_dir;
    }
    const auto result = rispos::run_sweep(spec, threads);
    const auto files = rispos::emit_report(result, spec, spec.output);
    std::cout << rispos::to_csv(result);
    std::cerr << "wrote " << files.csv.string() << " and " << files.manifest.string() << '\n';
    return 0;
}

int run_single_command(const std::string& scene_path, const std::string& scheme_name, std::uint64_t seed,
                       std::size_t cycles, std::size_t users, std::size_t antennas, const std::string& out_dir) {
    rispos::ExperimentSpec spec;
    if (!scene_path.empty()) {
        spec.scene = rispos::load_scene_spec(scene_path);
    }
    spec.protocol.cycles = cycles;
    spec.protocol.users = users;
    spec.no_ris_antennas = antennas;
    const auto report = rispos::run_trial(spec, rispos::parse_scheme(scheme_name), 0, seed);
    const auto text = rispos::to_json(report).dump(2) + "\n";
    std::cout << text;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "trial.json", std::ios::binary);
        out << text;
        if (!out) {
            throw std::runtime_error("cannot write trial report to " + out_dir);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided RSS positioning simulator"};
    app.require_subcommand(1);

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir;
    app.add_option("--threads", threads, "Worker threads for Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory (overrides the sweep file's output path)");

    auto* run = app.add_subcommand("run", "Run a parameter sweep described by a JSON spec");
    std::string spec_path;
    run->add_option("--spec", spec_path, "Sweep spec or a previously written manifest.json")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--threads", threads, "Worker threads for Monte Carlo trials")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory (overrides the sweep file's output path)");

    auto* single = app.add_subcommand("single", "Run one positioning trial and print its report");
    std::string scene_path;
    std::string scheme = "proposed";
    std::uint64_t seed = 1;
    std::size_t cycles = 3;
    std::size_t users = 1;
    std::size_t antennas = 2;
    single->add_option("--scene", scene_path, "Scene JSON file (desk profile when omitted)")
        ->check(CLI::ExistingFile);
    single->add_option("--scheme", scheme, "proposed | random_config | no_ris")
        ->check(CLI::IsMember({"proposed", "random_config", "no_ris"}));
    single->add_option("--seed", seed, "Master seed");
    single->add_option("--cycles", cycles, "Cycles K")->check(CLI::PositiveNumber);
    single->add_option("--users", users, "Users I")->check(CLI::PositiveNumber);
    single->add_option("--antennas", antennas, "AP antennas of the no_ris scheme")->check(CLI::PositiveNumber);
    single->add_option("--out", out_dir, "Directory for trial.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            return run_sweep_command(spec_path, out_dir, threads);
        }
        return run_single_command(scene_path, scheme, seed, cycles, users, antennas, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
