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

#include <complex>
#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "rispos/random.hpp"
#include "rispos/scene.hpp"

namespace rispos {

using Complex = std::complex<double>;

/// Mean RSS assigned to a block whose total field is exactly zero.
inline constexpr double kNullFieldFloorDb = -300.0;

/// One RIS configuration: the 0-based state of every element.
struct Configuration {
    std::vector<int> states;

    Configuration() = default;
    explicit Configuration(std::vector<int> s) : states(std::move(s)) {}
    static Configuration zeros(std::size_t elements) {
        return Configuration(std::vector<int>(elements, 0));
    }

    std::size_t size() const { return states.size(); }
    int operator[](std::size_t m) const { return states[m]; }
    int& operator[](std::size_t m) { return states[m]; }

    /// All entries in [0, num_states) and length == elements.
    bool valid(std::size_t elements, int num_states) const;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// Discrete reflection behaviour of one element: uniform phase steps with a
/// phase-dependent amplitude.
class ReflectionModel {
public:
    ReflectionModel(int num_states, const ReflectionSpec& spec);
    static ReflectionModel ideal(int num_states);

    int num_states() const { return num_states_; }
    double phase_step() const { return phase_step_; }
    const ReflectionSpec& spec() const { return spec_; }

    /// r(c) in [0, 1]. Throws std::out_of_range for invalid states.
    double amplitude(int state) const;
    /// r(c) * exp(-j c dtheta).
    Complex coefficient(int state) const;

private:
    int num_states_;
    double phase_step_;
    ReflectionSpec spec_;
    std::vector<Complex> coefficients_;
};

Complex reflection_coefficient(int state, const ReflectionModel& model);

/// Free-space line-of-sight gain from the AP to block n.
Complex los_gain(const Scene& scene, std::size_t n);

/// Gain of the single-bounce path AP -> element m -> block n with the element in `state`.
Complex element_gain(const Scene& scene, std::size_t m, std::size_t n, int state,
                     const ReflectionModel& model);

/// Precomputed LOS gains and the M x C x N reflected-path gains of a scene.
class GainTable {
public:
    GainTable(const Scene& scene, const ReflectionModel& model);

    std::size_t num_blocks() const { return los_.size(); }
    std::size_t num_elements() const { return num_elements_; }
    int num_states() const { return num_states_; }

    Complex los(std::size_t n) const { return los_[n]; }
    Complex reflect(std::size_t m, std::size_t n, int state) const {
        return reflect_[(m * static_cast<std::size_t>(num_states_) + static_cast<std::size_t>(state)) *
                            num_blocks() +
                        n];
    }
    /// Contiguous gains of element m in `state` over all blocks.
    std::span<const Complex> reflect_row(std::size_t m, int state) const {
        return {reflect_.data() +
                    (m * static_cast<std::size_t>(num_states_) + static_cast<std::size_t>(state)) *
                        num_blocks(),
                num_blocks()};
    }

    /// h_lo[n] + sum_m h[m][n][c_m] for every block.
    std::vector<Complex> total_field(const Configuration& config) const;

private:
    std::size_t num_elements_;
    int num_states_;
    std::vector<Complex> los_;
    std::vector<Complex> reflect_;
};

/// Mean RSS map of one configuration. Blocks whose field is exactly zero are
/// clamped to kNullFieldFloorDb and listed in `nulled_blocks`.
struct RssMap {
    std::vector<double> mean_db;
    std::vector<std::size_t> nulled_blocks;
};

/// Converts a complex field to dB means in place. Returns the number of clamped blocks.
std::size_t field_to_mean_rss(std::span<const Complex> field, double tx_power_db,
                              std::span<double> mean_db);

RssMap mean_rss(const GainTable& table, const Configuration& config, double tx_power_db);

struct FieldUpdate {
    std::vector<Complex> field;
    std::vector<double> mean_db;
};

/// Swaps element m's contribution in `base_field` (the field of `config`) to `new_state`
/// with O(N) work.
FieldUpdate delta_mean_rss(const GainTable& table, const Configuration& config,
                           std::span<const Complex> base_field, std::size_t m, int new_state,
                           double tx_power_db);

/// In-place variant of the swap used on hot paths.
void swap_element_state(const GainTable& table, std::span<Complex> field, std::size_t m,
                        int old_state, int new_state);

/// One draw from Normal(mean_db, sigma_db^2).
double sample_rss(double mean_db, double sigma_db, Rng& rng);

}  // namespace rispos
