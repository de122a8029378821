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

#ifndef PILOTSIM_CSV_HPP
#define PILOTSIM_CSV_HPP

#include "pilotsim/experiments.hpp"

#include <ostream>
#include <span>
#include <string>

namespace pilotsim {

inline constexpr const char* kCsvHeader =
    "experiment,scenario,M,N,L,K,T_tau,rho_tau,rho_d,metric,value,value_db,std_error,trials,seed";

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

/// Header plus one line per row. value_db is filled for metrics whose name
/// starts with "nmse" and left empty otherwise.
void write_csv(std::ostream& out, std::span<const ResultRow> rows);

} // namespace pilotsim

#endif
