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

#include "cope/harness/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using cope::harness::ConfigError;
using cope::harness::Json;

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const std::uint64_t lo = std::stoull(text.substr(0, dots));
            const std::uint64_t hi = std::stoull(text.substr(dots + 2));
            if (hi < lo)
                throw ConfigError("empty seed range '" + text + "'");
            for (std::uint64_t s = lo; s <= hi; ++s)
                seeds.push_back(s);
            return seeds;
        }
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ','))
            seeds.push_back(std::stoull(part));
    } catch (const std::logic_error&) {
        throw ConfigError("malformed seed list '" + text + "'");
    }
    if (seeds.empty())
        throw ConfigError("empty seed list");
    return seeds;
}

void log_line(const std::string& msg)
{
    std::cerr << msg << std::endl;
}

Json load_resolved(const std::string& path, const std::vector<std::string>& sets)
{
    return cope::harness::resolve_config(cope::harness::load_config(path), sets);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cope: conservative off-policy evaluation"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-data", "Generate an offline dataset (JSON Lines)");
    std::string env_name, mode, out_path;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    gen->add_option("--env", env_name, "point-safety, point-env or pendulum")->required();
    gen->add_option("--mode", mode, "uniform (n transitions) or behavior (n episodes)")
        ->required()
        ->check(CLI::IsMember({"uniform", "behavior"}));
    gen->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed)->required();
    gen->add_option("--out", out_path)->required();

    auto* eval = app.add_subcommand("evaluate", "Run the configured estimators on every seed");
    std::string config_path;
    std::vector<std::string> sets;
    eval->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--set", sets, "key=value override (dot path)")->take_all()->expected(0, -1);

    auto* sweep = app.add_subcommand("sweep", "Sweep dataset size or horizon");
    std::string axis, values;
    sweep->add_option("--axis", axis)->required()->check(CLI::IsMember({"n", "horizon"}));
    sweep->add_option("--values", values, "comma separated, strictly increasing")->required();
    sweep->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    sweep->add_option("--set", sets, "key=value override (dot path)")->take_all()->expected(0, -1);

    auto* toy = app.add_subcommand("toy-demo", "PointSafety demo with trajectory dumps");
    std::string seed_text = "0..4", out_dir;
    toy->add_option("--seeds", seed_text, "range a..b or list a,b,c");
    toy->add_option("--out", out_dir)->required();
    toy->add_option("--set", sets, "key=value override (dot path)")->take_all()->expected(0, -1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const cope::mdp::Dataset data = cope::harness::generate_dataset(env_name, mode, n, seed);
            std::ostringstream text;
            cope::mdp::write_jsonl(data, text);
            cope::harness::write_atomic(out_path, text.str());
            log_line("wrote " + std::to_string(data.size()) + " transitions to " + out_path);
        } else if (*eval) {
            const Json config = load_resolved(config_path, sets);
            const auto rows = cope::harness::run_evaluate(config, log_line);
            cope::harness::write_results(config.at("output").get<std::string>(), rows);
        } else if (*sweep) {
            std::vector<std::string> all = sets;
            all.push_back("sweep.axis=" + axis);
            all.push_back("sweep.values=[" + values + "]");
            const Json config = load_resolved(config_path, all);
            const auto rows = cope::harness::run_sweep(config, log_line);
            cope::harness::write_results(config.at("output").get<std::string>(), rows);
        } else if (*toy) {
            const auto result = cope::harness::run_toy_demo(parse_seed_list(seed_text), sets, log_line);
            cope::harness::write_toy_demo(result, out_dir);
            int adv = 0, neu = 0;
            for (const auto& s : result.seeds) {
                adv += s.adversarial_unsafe;
                neu += !s.neutral_unsafe;
            }
            std::cout << "adversarial flagged unsafe on " << adv << "/" << result.seeds.size()
                      << " seeds; neutral flagged safe on " << neu << "/" << result.seeds.size() << " seeds\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
