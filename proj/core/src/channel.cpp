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

#include "rispos/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rispos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_block(const Scene& scene, std::size_t n) {
    if (n >= scene.num_blocks()) {
        throw std::out_of_range("block index " + std::to_string(n) + " out of range");
    }
}

void check_element(const Scene& scene, std::size_t m) {
    if (m >= scene.num_elements()) {
        throw std::out_of_range("element index " + std::to_string(m) + " out of range");
    }
}

}  // namespace

bool Configuration::valid(std::size_t elements, int num_states) const {
    if (states.size() != elements) {
        return false;
    }
    for (const int s : states) {
        if (s < 0 || s >= num_states) {
            return false;
        }
    }
    return true;
}

ReflectionModel::ReflectionModel(int num_states, const ReflectionSpec& spec)
    : num_states_(num_states), phase_step_(0.0), spec_(spec) {
    if (num_states < 2) {
        throw std::invalid_argument("reflection model needs at least two states");
    }
    if (!spec.ideal && (spec.min_amplitude < 0.0 || spec.min_amplitude > 1.0 || spec.steepness <= 0.0)) {
        throw std::invalid_argument("reflection model: invalid amplitude curve parameters");
    }
    phase_step_ = kTwoPi / num_states;
    coefficients_.reserve(static_cast<std::size_t>(num_states));
    for (int c = 0; c < num_states; ++c) {
        const double theta = c * phase_step_;
        double r = 1.0;
        if (!spec.ideal) {
            const double base = 0.5 * (std::sin(theta - spec.phase_offset) + 1.0);
            r = (1.0 - spec.min_amplitude) * std::pow(base, spec.steepness) + spec.min_amplitude;
        }
        coefficients_.push_back(std::polar(r, -theta));
    }
}

ReflectionModel ReflectionModel::ideal(int num_states) {
    ReflectionSpec spec;
    spec.ideal = true;
    return ReflectionModel(num_states, spec);
}

double ReflectionModel::amplitude(int state) const { return std::abs(coefficient(state)); }

Complex ReflectionModel::coefficient(int state) const {
    if (state < 0 || state >= num_states_) {
        throw std::out_of_range("reflection state " + std::to_string(state) + " out of range");
    }
    return coefficients_[static_cast<std::size_t>(state)];
}

Complex reflection_coefficient(int state, const ReflectionModel& model) {
    return model.coefficient(state);
}

Complex los_gain(const Scene& scene, std::size_t n) {
    check_block(scene, n);
    const double lambda = scene.wavelength();
    const double l = scene.los_distance(n);
    const auto& g = scene.gains();
    const double magnitude = lambda / (4.0 * std::numbers::pi) * std::sqrt(g.ap_to_block * g.block_to_ap) / l;
    return std::polar(magnitude, -kTwoPi * l / lambda);
}

Complex element_gain(const Scene& scene, std::size_t m, std::size_t n, int state,
                     const ReflectionModel& model) {
    check_element(scene, m);
    check_block(scene, n);
    const double lambda = scene.wavelength();
    const double l_in = scene.ap_element_distance(m);
    const double l_out = scene.element_block_distance(m, n);
    const auto& g = scene.gains();
    const double magnitude = lambda / (4.0 * std::numbers::pi) *
                             std::sqrt(g.ap_to_element * g.block_to_element) / (l_in * l_out);
    return std::polar(magnitude, -kTwoPi * (l_in + l_out) / lambda) * model.coefficient(state);
}

GainTable::GainTable(const Scene& scene, const ReflectionModel& model)
    : num_elements_(scene.num_elements()), num_states_(model.num_states()) {
    if (model.num_states() != scene.num_states()) {
        throw std::invalid_argument("gain table: reflection model and scene disagree on state count");
    }
    const std::size_t num_blocks = scene.num_blocks();
    los_.resize(num_blocks);
    for (std::size_t n = 0; n < num_blocks; ++n) {
        los_[n] = los_gain(scene, n);
    }
    reflect_.resize(num_elements_ * static_cast<std::size_t>(num_states_) * num_blocks);
    for (std::size_t m = 0; m < num_elements_; ++m) {
        for (int c = 0; c < num_states_; ++c) {
            Complex* row = reflect_.data() +
                           (m * static_cast<std::size_t>(num_states_) + static_cast<std::size_t>(c)) * num_blocks;
            for (std::size_t n = 0; n < num_blocks; ++n) {
                row[n] = element_gain(scene, m, n, c, model);
            }
        }
    }
}

std::vector<Complex> GainTable::total_field(const Configuration& config) const {
    if (!config.valid(num_elements_, num_states_)) {
        throw std::invalid_argument("gain table: configuration does not match the RIS");
    }
    std::vector<Complex> field = los_;
    for (std::size_t m = 0; m < num_elements_; ++m) {
        const auto row = reflect_row(m, config[m]);
        for (std::size_t n = 0; n < field.size(); ++n) {
            field[n] += row[n];
        }
    }
    return field;
}

std::size_t field_to_mean_rss(std::span<const Complex> field, double tx_power_db,
                              std::span<double> mean_db) {
    std::size_t nulled = 0;
    for (std::size_t n = 0; n < field.size(); ++n) {
        const double magnitude = std::abs(field[n]);
        if (magnitude > 0.0) {
            mean_db[n] = tx_power_db + 20.0 * std::log10(magnitude);
        } else {
            mean_db[n] = kNullFieldFloorDb;
            ++nulled;
        }
    }
    return nulled;
}

RssMap mean_rss(const GainTable& table, const Configuration& config, double tx_power_db) {
    const auto field = table.total_field(config);
    RssMap map;
    map.mean_db.resize(field.size());
    field_to_mean_rss(field, tx_power_db, map.mean_db);
    for (std::size_t n = 0; n < field.size(); ++n) {
        if (field[n] == Complex{}) {
            map.nulled_blocks.push_back(n);
        }
    }
    return map;
}

void swap_element_state(const GainTable& table, std::span<Complex> field, std::size_t m,
                        int old_state, int new_state) {
    if (old_state == new_state) {
        return;
    }
    const auto old_row = table.reflect_row(m, old_state);
    const auto new_row = table.reflect_row(m, new_state);
    for (std::size_t n = 0; n < field.size(); ++n) {
        field[n] += new_row[n] - old_row[n];
    }
}

FieldUpdate delta_mean_rss(const GainTable& table, const Configuration& config,
                           std::span<const Complex> base_field, std::size_t m, int new_state,
                           double tx_power_db) {
    if (m >= table.num_elements() || m >= config.size()) {
        throw std::out_of_range("delta_mean_rss: element index out of range");
    }
    if (new_state < 0 || new_state >= table.num_states()) {
        throw std::out_of_range("delta_mean_rss: state out of range");
    }
    if (base_field.size() != table.num_blocks()) {
        throw std::invalid_argument("delta_mean_rss: field length mismatch");
    }
    FieldUpdate update{std::vector<Complex>(base_field.begin(), base_field.end()),
                       std::vector<double>(base_field.size())};
    swap_element_state(table, update.field, m, config[m], new_state);
    field_to_mean_rss(update.field, tx_power_db, update.mean_db);
    return update;
}

double sample_rss(double mean_db, double sigma_db, Rng& rng) {
    if (!(sigma_db > 0.0)) {
        throw std::invalid_argument("sample_rss: sigma must be positive");
    }
    return std::normal_distribution<double>(mean_db, sigma_db)(rng);
}

}  // namespace rispos
