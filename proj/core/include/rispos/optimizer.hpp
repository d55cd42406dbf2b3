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
#include <span>
#include <utility>
#include <vector>

#include "rispos/channel.hpp"
#include "rispos/random.hpp"

namespace rispos {

/// Set element `element` to `state`; all other elements unchanged.
struct Move {
    std::size_t element;
    int state;

    friend bool operator==(const Move&, const Move&) = default;
};

/// A loss over the configuration lattice {0..C-1}^M.
///
/// Implementations must be safe to call concurrently from several threads.
class Objective {
public:
    virtual ~Objective() = default;

    virtual double evaluate(const Configuration& config) const = 0;

    /// Losses of `center` with each move applied. The default applies every move to a copy
    /// and calls evaluate(); override when a neighbor can be scored incrementally.
    virtual void evaluate_moves(const Configuration& center, std::span<const Move> moves,
                                std::span<double> losses) const;
};

/// Moves reaching the unit neighborhood {(c +- e_m) mod C}: element ascending, +1 before -1.
/// For C == 2 the two directions coincide and only one move per element is emitted.
std::vector<Move> unit_moves(const Configuration& c, int num_states);

std::vector<Configuration> unit_neighborhood(const Configuration& c, int num_states);

struct OptimizerSettings {
    /// Local-minimum slack; a move is accepted only when it improves by more than this.
    double epsilon = 0.1;
    std::size_t z_lower = 2;
    std::size_t z_upper = 5;
    std::size_t max_lmcs_iterations = 100000;
    /// Random restarts allowed per attempt to find a local minimum not yet in the set.
    std::size_t max_restarts = 64;
    /// Use the circular (wrap-around) state distance in the descent ratio.
    bool circular_distance = false;

    void validate() const;
};

struct LmcsResult {
    Configuration config;
    double loss = 0.0;
    std::size_t moves = 0;
    std::size_t evaluations = 0;
    bool truncated = false;
};

/// Steepest unit-neighborhood descent from `start` until no neighbor improves by more than epsilon.
LmcsResult lmcs(const Configuration& start, const Objective& objective, int num_states,
                const OptimizerSettings& settings);

/// True when loss(c) <= loss(neighbor) + epsilon for every unit neighbor (exhaustive scan).
bool is_local_minimum(const Configuration& c, const Objective& objective, int num_states, double epsilon);

/// (l_c - l_f) / ||c - c_f||. Throws std::invalid_argument for identical configurations.
double descent_ratio(const Configuration& c_f, const Configuration& c, double l_f, double l_c,
                     bool circular = false, int num_states = 0);

/// Local minima kept in ascending loss order; equal losses keep insertion order.
class SortedLocalMinima {
public:
    struct Entry {
        Configuration config;
        double loss;
    };

    bool contains(const Configuration& c) const;
    /// Inserts unless already present. Returns whether the set changed.
    bool insert(Configuration c, double loss);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& front() const { return entries_.front(); }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

struct CoResult {
    Configuration config;
    double loss = 0.0;
    SortedLocalMinima minima;
    std::size_t evaluations = 0;
    std::size_t lmcs_runs = 0;
    std::size_t lmcs_moves = 0;
    std::size_t global_iterations = 0;
    std::size_t duplicate_restarts = 0;
    /// A required distinct local minimum could not be found within the restart cap.
    bool exhausted = false;
    /// Some LMCS run hit the iteration cap.
    bool truncated = false;
};

/// Two-phase configuration optimization: z_lower local minima from random starts, then
/// descent-ratio line searches until more than z_upper minima are known.
CoResult co_optimize(const Objective& objective, std::size_t num_elements, int num_states,
                     const OptimizerSettings& settings, Rng& rng);

Configuration random_configuration(std::size_t num_elements, int num_states, Rng& rng);

}  // namespace rispos
