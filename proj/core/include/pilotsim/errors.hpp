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

#ifndef PILOTSIM_ERRORS_HPP
#define PILOTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pilotsim {

// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical precondition failed at run time (singular system, non-Hermitian
// input, matrix that should be PD but is not).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or scheme parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace pilotsim

#endif
