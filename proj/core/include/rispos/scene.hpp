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

#include <array>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace rispos {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Dimensionless power gains of the four antenna links. All default to 1 (omnidirectional).
struct AntennaGains {
    double ap_to_block = 1.0;        // AP antenna towards a block
    double block_to_ap = 1.0;        // user antenna at a block towards the AP
    double ap_to_element = 1.0;      // AP antenna towards an RIS element
    double block_to_element = 1.0;   // user antenna towards an RIS element
};

/// Parameters of the phase-dependent reflection amplitude
///   r(theta) = (1 - min_amplitude) * ((sin(theta - phase_offset) + 1) / 2)^steepness + min_amplitude
/// where theta is the phase shift of the state. `ideal` forces r = 1 for every state.
struct ReflectionSpec {
    bool ideal = false;
    double min_amplitude = 0.2;
    double phase_offset = 0.43 * std::numbers::pi;
    double steepness = 1.6;
};

/// User-facing description of the geometry and the radio constants.
/// Lengths in meters, frequency in Hz, powers in dB.
struct SceneSpec {
    Vec3 soi_center{1.5, 0.0, 0.0};
    Vec3 soi_dims{1.0, 1.0, 1.0};
    std::array<int, 3> grid{5, 5, 5};
    Vec3 ap_position{0.5, -0.5, 0.0};
    /// rows x cols. {0, 0} disables the RIS entirely.
    std::array<int, 2> ris_grid{4, 4};
    double element_separation = 0.06;
    /// The RIS lies in the plane x = ris_center.x().
    Vec3 ris_center{0.0, 0.0, 0.0};
    double carrier_frequency = 2.4e9;
    double tx_power_db = 0.0;
    int num_states = 4;
    double noise_sigma_db = 2.0;
    AntennaGains gains;
    ReflectionSpec reflection;

    std::size_t num_blocks() const;
    std::size_t num_elements() const;

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;

    /// 1000 blocks, 8x8 RIS: the full-scale setup.
    static SceneSpec room_profile();
    /// 125 blocks, 4x4 RIS: the default desk-scale setup.
    static SceneSpec desk_profile();
};

/// c0 / f_c. Throws std::invalid_argument for non-positive frequency.
double wavelength(double carrier_frequency);

/// Immutable geometry with all link distances precomputed.
///
/// Blocks are indexed row-major over (x, y, z) with x the slowest axis, elements
/// row-major over (row, col) with rows along z and columns along y.
class Scene {
public:
    const SceneSpec& spec() const { return spec_; }

    std::size_t num_blocks() const { return block_centers_.size(); }
    std::size_t num_elements() const { return element_positions_.size(); }
    int num_states() const { return spec_.num_states; }
    double wavelength() const { return wavelength_; }
    double tx_power_db() const { return spec_.tx_power_db; }
    double sigma() const { return spec_.noise_sigma_db; }
    const AntennaGains& gains() const { return spec_.gains; }
    const Vec3& ap_position() const { return spec_.ap_position; }

    const std::vector<Vec3>& block_centers() const { return block_centers_; }
    const std::vector<Vec3>& element_positions() const { return element_positions_; }
    const Vec3& block_center(std::size_t n) const { return block_centers_.at(n); }
    const Vec3& element_position(std::size_t m) const { return element_positions_.at(m); }

    /// AP to block n.
    double los_distance(std::size_t n) const { return los_distance_[n]; }
    /// AP to element m.
    double ap_element_distance(std::size_t m) const { return ap_element_distance_[m]; }
    /// Element m to block n.
    double element_block_distance(std::size_t m, std::size_t n) const {
        return element_block_distance_[m * num_blocks() + n];
    }

    /// Grid coordinates (ix, iy, iz) of block n.
    std::array<int, 3> block_cell(std::size_t n) const;

    friend Scene build_scene(const SceneSpec& spec);

private:
    explicit Scene(SceneSpec spec) : spec_(std::move(spec)) {}

    SceneSpec spec_;
    double wavelength_ = 0.0;
    std::vector<Vec3> block_centers_;
    std::vector<Vec3> element_positions_;
    std::vector<double> los_distance_;
    std::vector<double> ap_element_distance_;
    std::vector<double> element_block_distance_;
};

/// Validates `spec` and lays out the block grid and the RIS array.
Scene build_scene(const SceneSpec& spec);

// JSON (de)serialization of the scene file. Missing keys keep their defaults.
void to_json(nlohmann::json& j, const SceneSpec& spec);
void from_json(const nlohmann::json& j, SceneSpec& spec);
SceneSpec load_scene_spec(const std::filesystem::path& path);

}  // namespace rispos
