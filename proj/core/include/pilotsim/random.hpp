// SPDX-License-Identifier: Apache-2.0
//
// pilotsim - pilot precoding and combining simulator for multiuser MIMO
// Copyright (C) 2026 The pilotsim authors
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

#ifndef PILOTSIM_RANDOM_HPP
#define PILOTSIM_RANDOM_HPP

#include "pilotsim/linalg.hpp"

#include <cstdint>
#include <random>

namespace pilotsim {

/**
 * Reproducible random stream.
 *
 * Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
 * performs the real/Gaussian conversions itself, so a stream produces the
 * same numbers with any standard library. Streams are cheap to construct and
 * are meant to be derived per trial with derive_stream().
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard real normal (Box-Muller, one value cached).
    double normal();

    /// Circularly symmetric complex Gaussian CN(0, variance).
    cplx complex_normal(double variance = 1.0);

    /// rows x cols matrix of i.i.d. CN(0, variance) entries, filled column-major.
    ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// SplitMix64 finaliser; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stream seeded by a pure function of (master_seed, trial, realization).
RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                           std::uint64_t realization_index);

} // namespace pilotsim

#endif
