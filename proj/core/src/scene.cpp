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

#include "rispos/scene.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace rispos {

namespace {

constexpr double kMinLinkDistance = 1e-9;  // m

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw std::invalid_argument("scene: " + message);
    }
}

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

std::size_t SceneSpec::num_blocks() const {
    if (grid[0] <= 0 || grid[1] <= 0 || grid[2] <= 0) {
        return 0;
    }
    return static_cast<std::size_t>(grid[0]) * static_cast<std::size_t>(grid[1]) *
           static_cast<std::size_t>(grid[2]);
}

std::size_t SceneSpec::num_elements() const {
    if (ris_grid[0] <= 0 || ris_grid[1] <= 0) {
        return 0;
    }
    return static_cast<std::size_t>(ris_grid[0]) * static_cast<std::size_t>(ris_grid[1]);
}

void SceneSpec::validate() const {
    require(finite(soi_center) && finite(soi_dims) && finite(ap_position) && finite(ris_center),
            "coordinates must be finite");
    require(soi_dims.minCoeff() > 0.0, "SOI dimensions must be positive");
    require(grid[0] > 0 && grid[1] > 0 && grid[2] > 0, "grid block counts must be positive");
    require(num_blocks() >= 2, "the SOI must contain at least two blocks");
    const bool ris_disabled = ris_grid[0] == 0 && ris_grid[1] == 0;
    require(ris_disabled || (ris_grid[0] > 0 && ris_grid[1] > 0),
            "RIS grid must be positive, or {0, 0} to disable the RIS");
    require(ris_disabled || (std::isfinite(element_separation) && element_separation > 0.0),
            "element separation must be positive");
    require(std::isfinite(carrier_frequency) && carrier_frequency > 0.0,
            "carrier frequency must be positive");
    require(std::isfinite(tx_power_db), "transmit power must be finite");
    require(num_states >= 2, "elements need at least two states");
    require(std::isfinite(noise_sigma_db) && noise_sigma_db > 0.0, "noise sigma must be positive");
    require(gains.ap_to_block > 0.0 && gains.block_to_ap > 0.0 && gains.ap_to_element > 0.0 &&
                gains.block_to_element > 0.0,
            "antenna gains must be positive");
    require(reflection.ideal ||
                (reflection.min_amplitude >= 0.0 && reflection.min_amplitude <= 1.0 &&
                 std::isfinite(reflection.phase_offset) && reflection.steepness > 0.0),
            "reflection curve needs min_amplitude in [0, 1] and steepness > 0");
}

SceneSpec SceneSpec::room_profile() {
    SceneSpec spec;
    spec.grid = {10, 10, 10};
    spec.ris_grid = {8, 8};
    return spec;
}

SceneSpec SceneSpec::desk_profile() { return SceneSpec{}; }

double wavelength(double carrier_frequency) {
    if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency)) {
        throw std::invalid_argument("wavelength: carrier frequency must be positive");
    }
    return kSpeedOfLight / carrier_frequency;
}

std::array<int, 3> Scene::block_cell(std::size_t n) const {
    const auto& g = spec_.grid;
    const auto nz = static_cast<std::size_t>(g[2]);
    const auto ny = static_cast<std::size_t>(g[1]);
    return {static_cast<int>(n / (ny * nz)), static_cast<int>((n / nz) % ny),
            static_cast<int>(n % nz)};
}

Scene build_scene(const SceneSpec& spec) {
    spec.validate();
    Scene scene(spec);
    scene.wavelength_ = wavelength(spec.carrier_frequency);

    const auto [nx, ny, nz] = spec.grid;
    const Vec3 cell(spec.soi_dims.x() / nx, spec.soi_dims.y() / ny, spec.soi_dims.z() / nz);
    const Vec3 corner = spec.soi_center - 0.5 * spec.soi_dims;
    scene.block_centers_.reserve(spec.num_blocks());
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            for (int iz = 0; iz < nz; ++iz) {
                scene.block_centers_.emplace_back(corner.x() + (ix + 0.5) * cell.x(),
                                                  corner.y() + (iy + 0.5) * cell.y(),
                                                  corner.z() + (iz + 0.5) * cell.z());
            }
        }
    }

    const int rows = spec.ris_grid[0];
    const int cols = spec.ris_grid[1];
    scene.element_positions_.reserve(spec.num_elements());
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            scene.element_positions_.emplace_back(
                spec.ris_center.x(),
                spec.ris_center.y() + (c - 0.5 * (cols - 1)) * spec.element_separation,
                spec.ris_center.z() + (r - 0.5 * (rows - 1)) * spec.element_separation);
        }
    }

    const std::size_t num_blocks = scene.block_centers_.size();
    const std::size_t num_elements = scene.element_positions_.size();

    scene.los_distance_.resize(num_blocks);
    for (std::size_t n = 0; n < num_blocks; ++n) {
        const double d = (scene.block_centers_[n] - spec.ap_position).norm();
        require(d >= kMinLinkDistance, "AP coincides with block " + std::to_string(n));
        scene.los_distance_[n] = d;
    }

    scene.ap_element_distance_.resize(num_elements);
    scene.element_block_distance_.resize(num_elements * num_blocks);
    for (std::size_t m = 0; m < num_elements; ++m) {
        const Vec3& element = scene.element_positions_[m];
        const double d_ap = (element - spec.ap_position).norm();
        require(d_ap >= kMinLinkDistance, "AP coincides with RIS element " + std::to_string(m));
        scene.ap_element_distance_[m] = d_ap;
        for (std::size_t n = 0; n < num_blocks; ++n) {
            const double d = (scene.block_centers_[n] - element).norm();
            require(d >= kMinLinkDistance, "RIS element " + std::to_string(m) +
                                               " coincides with block " + std::to_string(n));
            scene.element_block_distance_[m * num_blocks + n] = d;
        }
    }
    return scene;
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

void read_vec(const nlohmann::json& j, const char* key, Vec3& out) {
    if (!j.contains(key)) {
        return;
    }
    const auto& a = j.at(key);
    require(a.is_array() && a.size() == 3, std::string(key) + " must be a 3-element array");
    out = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

}  // namespace

void to_json(nlohmann::json& j, const SceneSpec& spec) {
    j = nlohmann::json{
        {"soi_center", vec_json(spec.soi_center)},
        {"soi_dims", vec_json(spec.soi_dims)},
        {"grid", spec.grid},
        {"ap_position", vec_json(spec.ap_position)},
        {"ris_grid", spec.ris_grid},
        {"element_separation", spec.element_separation},
        {"ris_center", vec_json(spec.ris_center)},
        {"carrier_frequency_hz", spec.carrier_frequency},
        {"tx_power_db", spec.tx_power_db},
        {"num_states", spec.num_states},
        {"noise_sigma_db", spec.noise_sigma_db},
        {"antenna_gains",
         {{"ap_to_block", spec.gains.ap_to_block},
          {"block_to_ap", spec.gains.block_to_ap},
          {"ap_to_element", spec.gains.ap_to_element},
          {"block_to_element", spec.gains.block_to_element}}},
        {"reflection",
         {{"ideal", spec.reflection.ideal},
          {"min_amplitude", spec.reflection.min_amplitude},
          {"phase_offset_rad", spec.reflection.phase_offset},
          {"steepness", spec.reflection.steepness}}},
    };
}

void from_json(const nlohmann::json& j, SceneSpec& spec) {
    require(j.is_object(), "scene description must be a JSON object");
    read_vec(j, "soi_center", spec.soi_center);
    read_vec(j, "soi_dims", spec.soi_dims);
    read(j, "grid", spec.grid);
    read_vec(j, "ap_position", spec.ap_position);
    read(j, "ris_grid", spec.ris_grid);
    read(j, "element_separation", spec.element_separation);
    read_vec(j, "ris_center", spec.ris_center);
    read(j, "carrier_frequency_hz", spec.carrier_frequency);
    read(j, "tx_power_db", spec.tx_power_db);
    read(j, "num_states", spec.num_states);
    read(j, "noise_sigma_db", spec.noise_sigma_db);
    if (j.contains("antenna_gains")) {
        const auto& g = j.at("antenna_gains");
        read(g, "ap_to_block", spec.gains.ap_to_block);
        read(g, "block_to_ap", spec.gains.block_to_ap);
        read(g, "ap_to_element", spec.gains.ap_to_element);
        read(g, "block_to_element", spec.gains.block_to_element);
    }
    if (j.contains("reflection")) {
        const auto& r = j.at("reflection");
        read(r, "ideal", spec.reflection.ideal);
        read(r, "min_amplitude", spec.reflection.min_amplitude);
        read(r, "phase_offset_rad", spec.reflection.phase_offset);
        read(r, "steepness", spec.reflection.steepness);
    }
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scene file " + path.string());
    }
    SceneSpec spec = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    spec.validate();
    return spec;
}

}  // namespace rispos
