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

#include "pilotsim/csv.hpp"

#include <charconv>
#include <cmath>

namespace pilotsim {

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    // std::to_chars is locale independent and round-trips
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows)
{
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        std::string db;
        if (r.metric.rfind("nmse", 0) == 0)
            db = r.value > 0.0 ? format_number(10.0 * std::log10(r.value)) : (r.value == 0.0 ? "-inf" : "nan");
        out << r.experiment << ',' << r.scenario << ',' << r.M << ',' << r.N << ',' << r.L << ',' << r.K << ','
            << r.T_tau << ',' << format_number(r.rho_tau) << ',' << format_number(r.rho_d) << ',' << r.metric << ','
            << format_number(r.value) << ',' << db << ',' << format_number(r.std_error) << ',' << r.trials << ','
            << r.seed << '\n';
    }
}

} // namespace pilotsim
