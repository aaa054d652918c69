/*
 * Copyright 2026 The cope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cope/harness/config.hpp"

#include "cope/hambo/estimators.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cope::harness {

Json default_config()
{
    return Json::parse(R"({
        "env": {"name": "point-env"},
        "policy": {},
        "data": {"path": null, "mode": "uniform", "n": 500, "action_noise": 0.1,
                 "calibration_fraction": 0.1, "behavior": {}},
        "model": {"type": "gp", "target": "delta", "input_scale": null},
        "kernel": {"name": "rbf", "lengthscale": 1.0, "nu": 2.5},
        "gp": {"sigma_eps": 0.01, "B": 2.0, "delta": 0.1, "gamma_mode": "empirical", "rate_constant": 1.0},
        "bnn": {"K": 5, "hidden": [64, 64], "prior_temp": 0.001, "lengthscale": 10.0, "median_heuristic": false,
                "batch": 64, "lr": 0.003, "max_epochs": 300, "patience": 10, "validation_fraction": 0.1},
        "estimators": ["hambo-ca"],
        "L": 10000,
        "L_true": 10000,
        "seeds": [0, 1, 2, 3, 4],
        "opt": {"method": "cem", "pop": 64, "elite": 0.125, "iters": 30, "init_std": 1.0, "std_floor": 0.02,
                "samples": 0, "rollouts_per_candidate": 16, "common_random_numbers": true},
        "adversary": {"kind": "mlp", "hidden": [], "param_bound": 5.0, "input_scale": null, "grid_cells": 4,
                      "grid_lo": null, "grid_hi": null},
        "discrete": {"param_bound": 10.0, "input_scale": null},
        "dainf_quantile": null,
        "sweep": {"axis": "none", "values": []},
        "output": "results.json"
    })");
}

Json env_preset(const std::string& env_name)
{
    if (env_name == "point-safety")
        return Json::parse(R"({
            "env": {"horizon": 16, "danger_penalty": -100.0, "danger_radius": 1.0, "action_bound": 0.5,
                    "sigma_eps": 0.01},
            "policy": {"y": 1.1},
            "data": {"mode": "behavior", "n": 50, "action_noise": 0.1, "behavior": {"y": 1.6}},
            "model": {"target": "delta", "input_scale": [0.5, 0.5, 8.0, 8.0]},
            "gp": {"sigma_eps": 0.1},
            "adversary": {"input_scale": [2.0, 2.0, 0.5, 0.5]},
            "discrete": {"input_scale": [2.0, 2.0, 0.5, 0.5]}
        })");
    if (env_name == "point-env")
        return Json::parse(R"({
            "env": {"horizon": 20, "sigma_eps": 0.01, "action_bound": 1.0, "init_bound": 10.0, "data_bound": 40.0},
            "policy": {"gain": 1.0},
            "data": {"behavior": {"gain": 0.5}},
            "model": {"target": "delta", "input_scale": [40.0, 40.0, 1.0, 1.0]},
            "adversary": {"input_scale": [10.0, 10.0, 1.0, 1.0]},
            "discrete": {"input_scale": [10.0, 10.0, 1.0, 1.0]},
            "bnn": {"patience": 30, "max_epochs": 1000}
        })");
    if (env_name == "pendulum") {
        Json j = Json::parse(R"({
            "env": {"horizon": 200, "sigma_eps": 0.01, "g": 10.0, "m": 1.0, "l": 1.0, "dt": 0.05,
                    "max_speed": 8.0, "max_torque": 2.0, "init_speed": 1.0},
            "policy": {"pump": 2.0, "kp": 10.0, "kd": 2.0, "capture_angle": 0.5},
            "data": {"behavior": {}},
            "model": {"target": "delta"},
            "bnn": {"patience": 30, "max_epochs": 1000}
        })");
        const Json scale = {std::numbers::pi, 8.0, 2.0};
        j["model"]["input_scale"] = scale;
        j["adversary"]["input_scale"] = scale;
        j["discrete"]["input_scale"] = scale;
        return j;
    }
    throw ConfigError("unknown environment '" + env_name + "' (expected point-safety, point-env or pendulum)");
}

void merge_into(Json& base, const Json& patch)
{
    if (!patch.is_object() || !base.is_object()) {
        base = patch;
        return;
    }
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
            merge_into(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

namespace {

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty())
            throw ConfigError("malformed key '" + path + "'");
        parts.push_back(part);
    }
    if (parts.empty())
        throw ConfigError("empty key");
    return parts;
}

// Ignores "env.name" in overrides and user keys to find the effective environment.
std::string effective_env_name(const Json& user, const std::vector<std::string>& overrides)
{
    std::string name = default_config()["env"]["name"];
    if (user.contains("env") && user["env"].contains("name"))
        name = user["env"]["name"].get<std::string>();
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq != std::string::npos && o.substr(0, eq) == "env.name")
            name = o.substr(eq + 1);
    }
    return name;
}

// Keys a user config may introduce that the defaults do not list.
void check_known(const Json& schema, const Json& user, const std::string& prefix)
{
    if (!user.is_object())
        throw ConfigError("config must be a JSON object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!schema.contains(it.key()))
            throw ConfigError("unknown config key '" + key + "'");
        const Json& s = schema[it.key()];
        if (s.is_object() && !s.empty() && it.value().is_object())
            check_known(s, it.value(), key);
    }
}

} // namespace

const Json& at_path(const Json& config, const std::string& path)
{
    const Json* node = &config;
    for (const auto& part : split_path(path)) {
        if (!node->is_object() || !node->contains(part))
            throw ConfigError("missing config key '" + path + "'");
        node = &(*node)[part];
    }
    return *node;
}

void apply_override(Json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not key=value");
    const std::vector<std::string> parts = split_path(assignment.substr(0, eq));
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    Json* node = &config;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i]))
            throw ConfigError("unknown config key '" + assignment.substr(0, eq) + "'");
        node = &(*node)[parts[i]];
    }
    *node = std::move(value);
}

Json resolve_config(const Json& user, const std::vector<std::string>& overrides)
{
    Json config = default_config();
    merge_into(config, env_preset(effective_env_name(user, overrides)));
    check_known(config, user, "");
    merge_into(config, user);
    for (const auto& o : overrides)
        apply_override(config, o);
    validate_config(config);
    return config;
}

Json load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
}

std::string config_digest(const Json& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate_config(const Json& c)
{
    auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    // JSON built in C++ stores small literals as signed integers.
    auto integer_at_least = [](const Json& v, std::int64_t lo) {
        return v.is_number_integer() && v.get<std::int64_t>() >= lo;
    };
    const Json& seeds = c.at("seeds");
    require(seeds.is_array() && !seeds.empty(), "seeds must be a nonempty array");
    for (const auto& s : seeds)
        require(integer_at_least(s, 0), "seeds must be nonnegative integers");
    const Json& est = c.at("estimators");
    require(est.is_array() && !est.empty(), "estimators must be a nonempty array");
    for (const auto& e : est) {
        require(e.is_string(), "estimator names must be strings");
        try {
            hambo::parse_estimator(e.get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
        }
    }
    require(integer_at_least(c.at("L"), 1), "L must be >= 1");
    require(integer_at_least(c.at("L_true"), 2), "L_true must be >= 2");
    const std::string type = c.at("model").at("type");
    require(type == "gp" || type == "ensemble", "model.type must be gp or ensemble");
    const std::string mode = c.at("data").at("mode");
    require(mode == "uniform" || mode == "behavior", "data.mode must be uniform or behavior");
    require(integer_at_least(c.at("data").at("n"), 1), "data.n must be >= 1");
    const double frac = c.at("data").at("calibration_fraction");
    require(frac >= 0.0 && frac < 1.0, "data.calibration_fraction must be in [0, 1)");
    const std::string axis = c.at("sweep").at("axis");
    require(axis == "none" || axis == "n" || axis == "horizon", "sweep.axis must be none, n or horizon");
    const Json& values = c.at("sweep").at("values");
    require(values.is_array(), "sweep.values must be an array");
    require(axis == "none" || !values.empty(), "sweep.values must be nonempty for a sweep");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(integer_at_least(values[i], 1), "sweep values must be positive integers");
        require(i == 0 || values[i].get<std::size_t>() > values[i - 1].get<std::size_t>(),
                "sweep values must be strictly increasing");
    }
    const Json& q = c.at("dainf_quantile");
    require(q.is_null() || (q.is_number() && q.get<double>() > 0.0 && q.get<double>() <= 1.0),
            "dainf_quantile must be null or in (0, 1]");
}

} // namespace cope::harness
