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

#include "pilotsim/config.hpp"

#include "pilotsim/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pilotsim {

using nlohmann::json;

namespace {

// Collects every problem before failing so a user sees them all at once.
class Reader {
public:
    void error(const std::string& field, const std::string& what) { errors_.push_back(field + ": " + what); }

    void fail_if_errors() const
    {
        if (errors_.empty())
            return;
        std::string msg = "invalid configuration";
        for (const auto& e : errors_)
            msg += "\n  " + e;
        throw ConfigError(msg);
    }

    void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
    {
        if (!obj.is_object()) {
            error(where.empty() ? "<root>" : where, "expected an object");
            return;
        }
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items())
            if (!ok.contains(key))
                error(where.empty() ? key : where + "." + key, "unknown key");
    }

    template <class T>
    std::optional<T> scalar(const json& obj, const char* key, const std::string& field)
    {
        if (!obj.is_object() || !obj.contains(key))
            return std::nullopt;
        const json& v = obj.at(key);
        if constexpr (std::is_same_v<T, std::string>) {
            if (v.is_string())
                return v.get<std::string>();
            error(field, "expected a string");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (v.is_boolean())
                return v.get<bool>();
            error(field, "expected true or false");
        } else if constexpr (std::is_integral_v<T>) {
            if (v.is_number_integer())
                return v.get<T>();
            if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
                return static_cast<T>(v.get<double>());
            error(field, "expected an integer");
        } else {
            if (v.is_number())
                return v.get<double>();
            error(field, "expected a number");
        }
        return std::nullopt;
    }

    template <class T>
    std::optional<std::vector<T>> list(const json& obj, const char* key, const std::string& field)
    {
        if (!obj.is_object() || !obj.contains(key))
            return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_array()) {
            json wrap = json::object();
            wrap["v"] = v;
            if (auto s = scalar<T>(wrap, "v", field))
                return std::vector<T>{*s};
            return std::nullopt;
        }
        if (v.empty()) {
            error(field, "list must not be empty");
            return std::nullopt;
        }
        std::vector<T> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            json wrap = json::object();
            wrap["v"] = v[i];
            auto s = scalar<T>(wrap, "v", field + "[" + std::to_string(i) + "]");
            if (!s)
                return std::nullopt;
            out.push_back(*s);
        }
        return out;
    }

private:
    std::vector<std::string> errors_;
};

double from_db(double db)
{
    return std::pow(10.0, db / 10.0);
}

json parse_json_or_string(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

void apply_override(json& root, const std::string& item)
{
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + item + "' is not of the form key=value");
    const std::string key = item.substr(0, eq);
    json* node = &root;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ConfigError("override '" + item + "' has an empty key component");
        if (!node->is_object())
            *node = json::object();
        node = &(*node)[part];
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    *node = parse_json_or_string(item.substr(eq + 1));
}

std::optional<AngleRange> read_range(Reader& r, const json& obj, const char* key, const std::string& field)
{
    auto v = r.list<double>(obj, key, field);
    if (!v)
        return std::nullopt;
    if (v->size() != 2) {
        r.error(field, "expected [lo, hi] in degrees");
        return std::nullopt;
    }
    const double deg = std::numbers::pi / 180.0;
    if ((*v)[0] > (*v)[1]) {
        r.error(field, "lower bound exceeds upper bound");
        return std::nullopt;
    }
    return AngleRange{(*v)[0] * deg, (*v)[1] * deg};
}

} // namespace

std::string_view to_string(ExperimentKind k) noexcept
{
    switch (k) {
    case ExperimentKind::NmseSweep: return "nmse-sweep";
    case ExperimentKind::Tradeoff: return "tradeoff";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Contamination: return "contamination";
    }
    return "?";
}

ExperimentKind parse_experiment(std::string_view name)
{
    for (auto k : {ExperimentKind::NmseSweep, ExperimentKind::Tradeoff, ExperimentKind::Scaling,
                   ExperimentKind::Contamination})
        if (to_string(k) == name)
            return k;
    throw ConfigError("unknown experiment '" + std::string(name) +
                      "' (expected nmse-sweep, tradeoff, scaling or contamination)");
}

std::vector<double> default_normalized_grid()
{
    std::vector<double> g{0.0, 0.001};
    for (int i = 1; i < 15; ++i)
        g.push_back(std::lerp(0.001, 0.3, i / 14.0));
    // std::lerp hits the end point exactly, so the last entry is 1.0
    for (int i = 1; i < 7; ++i)
        g.push_back(std::lerp(0.3, 1.0, i / 6.0));
    return g;
}

std::vector<Eigen::Index> ExperimentConfig::pilot_lengths_for(Scenario s, Eigen::Index k, Eigen::Index n) const
{
    if (auto it = pilot_lengths.find(s); it != pilot_lengths.end())
        return it->second;
    return {default_pilot_length(s, k, n, paths)};
}

double ExperimentConfig::sigma_sq(Eigen::Index k) const
{
    if (sigma_ratios.size() == 1)
        return sigma_ratios[0];
    return sigma_ratios.at(static_cast<std::size_t>(k));
}

ExperimentConfig parse_config(std::string_view json_text, std::span<const std::string> overrides)
{
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (root.is_null())
        root = json::object();
    for (const auto& o : overrides)
        apply_override(root, o);

    Reader r;
    ExperimentConfig cfg;
    r.check_keys(root, "",
                 {"experiment", "scenario", "arrays", "paths", "cell", "energy", "timing", "mc", "output"});
    if (!root.is_object())
        r.fail_if_errors();

    if (auto e = r.scalar<std::string>(root, "experiment", "experiment")) {
        try {
            cfg.experiment = parse_experiment(*e);
        } catch (const ConfigError& err) {
            r.error("experiment", err.what());
        }
    }

    if (auto s = r.list<std::string>(root, "scenario", "scenario")) {
        cfg.scenarios.clear();
        for (const auto& name : *s) {
            try {
                const Scenario sc = parse_scenario(name);
                if (std::find(cfg.scenarios.begin(), cfg.scenarios.end(), sc) == cfg.scenarios.end())
                    cfg.scenarios.push_back(sc);
            } catch (const ConfigError& err) {
                r.error("scenario", err.what());
            }
        }
    }

    const json empty = json::object();
    auto section = [&](const char* key) -> const json& {
        return root.contains(key) ? root.at(key) : empty;
    };

    const json& arrays = section("arrays");
    r.check_keys(arrays, "arrays", {"M", "N", "geometry", "spacing"});
    if (auto v = r.list<Eigen::Index>(arrays, "M", "arrays.M"))
        cfg.bs_antennas = *v;
    if (auto v = r.list<Eigen::Index>(arrays, "N", "arrays.N"))
        cfg.ue_antennas = *v;
    if (auto g = r.scalar<std::string>(arrays, "geometry", "arrays.geometry")) {
        if (*g == "ula")
            cfg.geometry = ArrayGeometry::UniformLinear;
        else if (*g == "random")
            cfg.geometry = ArrayGeometry::RandomPositions;
        else
            r.error("arrays.geometry", "expected \"ula\" or \"random\"");
    }
    if (auto v = r.scalar<double>(arrays, "spacing", "arrays.spacing"))
        cfg.spacing = *v;

    const json& paths = section("paths");
    r.check_keys(paths, "paths", {"L", "aoa_range", "aod_range"});
    if (auto v = r.scalar<Eigen::Index>(paths, "L", "paths.L"))
        cfg.paths = *v;
    if (auto v = read_range(r, paths, "aoa_range", "paths.aoa_range"))
        cfg.aoa_range = *v;
    if (auto v = read_range(r, paths, "aod_range", "paths.aod_range"))
        cfg.aod_range = *v;

    const json& cell = section("cell");
    r.check_keys(cell, "cell", {"K", "sigma_ratios"});
    if (auto v = r.list<Eigen::Index>(cell, "K", "cell.K"))
        cfg.users = *v;
    if (auto v = r.list<double>(cell, "sigma_ratios", "cell.sigma_ratios"))
        cfg.sigma_ratios = *v;

    const json& energy = section("energy");
    r.check_keys(energy, "energy",
                 {"rho_tau", "rho_tau_db", "rho_d", "rho_d_db", "total", "total_db", "normalized_grid"});
    if (auto v = r.list<double>(energy, "rho_tau", "energy.rho_tau"))
        cfg.rho_tau = *v;
    if (auto v = r.list<double>(energy, "rho_tau_db", "energy.rho_tau_db")) {
        cfg.rho_tau.clear();
        for (double d : *v)
            cfg.rho_tau.push_back(from_db(d));
    }
    if (auto v = r.scalar<double>(energy, "rho_d", "energy.rho_d"))
        cfg.rho_d = *v;
    if (auto v = r.scalar<double>(energy, "rho_d_db", "energy.rho_d_db"))
        cfg.rho_d = from_db(*v);
    if (auto v = r.scalar<double>(energy, "total", "energy.total"))
        cfg.total_energy = *v;
    if (auto v = r.scalar<double>(energy, "total_db", "energy.total_db"))
        cfg.total_energy = from_db(*v);
    if (energy.is_object() && energy.contains("normalized_grid") && energy.at("normalized_grid").is_string()) {
        if (energy.at("normalized_grid").get<std::string>() == "default")
            cfg.normalized_grid = default_normalized_grid();
        else
            r.error("energy.normalized_grid", "expected a list of numbers or \"default\"");
    } else if (auto v = r.list<double>(energy, "normalized_grid", "energy.normalized_grid")) {
        cfg.normalized_grid = *v;
    }
    if (cfg.normalized_grid.empty())
        cfg.normalized_grid = default_normalized_grid();

    const json& timing = section("timing");
    r.check_keys(timing, "timing", {"T_c", "T_tau"});
    if (auto v = r.scalar<Eigen::Index>(timing, "T_c", "timing.T_c"))
        cfg.coherence = *v;
    if (timing.is_object() && timing.contains("T_tau")) {
        const json& t = timing.at("T_tau");
        if (t.is_object()) {
            for (const auto& [name, value] : t.items()) {
                try {
                    const Scenario sc = parse_scenario(name);
                    json wrap = json::object();
                    wrap["v"] = value;
                    if (auto v = r.list<Eigen::Index>(wrap, "v", "timing.T_tau." + name))
                        cfg.pilot_lengths[sc] = *v;
                } catch (const ConfigError& err) {
                    r.error("timing.T_tau." + name, err.what());
                }
            }
        } else if (auto v = r.list<Eigen::Index>(timing, "T_tau", "timing.T_tau")) {
            for (Scenario sc : cfg.scenarios)
                cfg.pilot_lengths[sc] = *v;
        }
    }

    const json& mc = section("mc");
    r.check_keys(mc, "mc", {"angle_realizations", "noise_realizations", "seed", "empirical"});
    if (auto v = r.scalar<std::int64_t>(mc, "angle_realizations", "mc.angle_realizations"))
        cfg.angle_realizations = *v;
    if (auto v = r.scalar<std::int64_t>(mc, "noise_realizations", "mc.noise_realizations"))
        cfg.noise_realizations = *v;
    if (mc.is_object() && mc.contains("seed")) {
        const json& s = mc.at("seed");
        if (s.is_number_unsigned())
            cfg.seed = s.get<std::uint64_t>();
        else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
            cfg.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
        else
            r.error("mc.seed", "expected a nonnegative 64-bit integer");
    }
    if (auto v = r.scalar<bool>(mc, "empirical", "mc.empirical"))
        cfg.empirical = *v;

    if (auto v = r.scalar<std::string>(root, "output", "output"))
        cfg.output = *v;

    // value checks
    for (auto m : cfg.bs_antennas)
        if (m < 1)
            r.error("arrays.M", "antenna counts must be at least 1");
    for (auto n : cfg.ue_antennas)
        if (n < 1)
            r.error("arrays.N", "antenna counts must be at least 1");
    if (!(cfg.spacing > 0.0))
        r.error("arrays.spacing", "must be positive");
    if (cfg.paths < 1)
        r.error("paths.L", "must be at least 1");
    for (auto k : cfg.users)
        if (k < 1)
            r.error("cell.K", "must be at least 1");
    const Eigen::Index max_k = *std::max_element(cfg.users.begin(), cfg.users.end());
    if (cfg.sigma_ratios.size() != 1 && static_cast<Eigen::Index>(cfg.sigma_ratios.size()) < max_k)
        r.error("cell.sigma_ratios", "give one value or at least one per user");
    for (double s : cfg.sigma_ratios)
        if (!(s >= 0.0) || !std::isfinite(s))
            r.error("cell.sigma_ratios", "must be finite and nonnegative");
    for (double x : cfg.rho_tau)
        if (!(x >= 0.0) || !std::isfinite(x))
            r.error("energy.rho_tau", "must be finite and nonnegative");
    if (cfg.rho_d && (!(*cfg.rho_d >= 0.0) || !std::isfinite(*cfg.rho_d)))
        r.error("energy.rho_d", "must be finite and nonnegative");
    if (cfg.coherence < 1)
        r.error("timing.T_c", "must be at least 1");
    if (cfg.angle_realizations < 1)
        r.error("mc.angle_realizations", "must be at least 1");
    if (cfg.noise_realizations < 1)
        r.error("mc.noise_realizations", "must be at least 1");
    if (cfg.scenarios.empty())
        r.error("scenario", "at least one scenario is required");

    const bool rate_experiment =
        cfg.experiment == ExperimentKind::Tradeoff || cfg.experiment == ExperimentKind::Scaling;
    if (rate_experiment) {
        if (!cfg.total_energy || !(*cfg.total_energy > 0.0) || !std::isfinite(*cfg.total_energy))
            r.error("energy.total", "a positive total energy is required for " +
                                        std::string(to_string(cfg.experiment)));
        for (double g : cfg.normalized_grid)
            if (!(g >= 0.0 && g <= 1.0))
                r.error("energy.normalized_grid", "values must lie in [0, 1]");
        for (auto n : cfg.ue_antennas)
            if (n < cfg.paths)
                r.error("arrays.N", "data precoding needs N >= L");
    }

    // pilot lengths must match the scenario before anything runs
    if (cfg.paths >= 1) {
        for (Scenario sc : cfg.scenarios) {
            for (auto k : cfg.users) {
                for (auto n : cfg.ue_antennas) {
                    if (k < 1 || n < 1)
                        continue;
                    for (auto t : cfg.pilot_lengths_for(sc, k, n)) {
                        const std::string field = "timing.T_tau (" + std::string(to_string(sc)) +
                                                  ", K=" + std::to_string(k) + ", N=" + std::to_string(n) + ")";
                        if (sc == Scenario::NonPrecodedUncombined && t != k * n)
                            r.error(field, "nPuC needs T_tau = K N = " + std::to_string(k * n));
                        else if (sc == Scenario::PrecodedUncombined && t != k * cfg.paths)
                            r.error(field, "PuC needs T_tau = K L = " + std::to_string(k * cfg.paths));
                        else if (sc == Scenario::PrecodedCombined && (t < 1 || t > cfg.paths))
                            r.error(field, "PC needs 1 <= T_tau <= L = " + std::to_string(cfg.paths));
                        else if (rate_experiment && t >= cfg.coherence)
                            r.error(field, "T_tau must be smaller than T_c");
                    }
                }
            }
        }
    }

    r.fail_if_errors();
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides);
}

} // namespace pilotsim
