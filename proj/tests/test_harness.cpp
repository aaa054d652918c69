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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cope;
using namespace cope::harness;

namespace {

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("cope_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Cheap point-env experiment: small data, few rollouts, short optimizer.
Json tiny_user_config()
{
    return Json::parse(R"({
        "env": {"name": "point-env", "horizon": 10},
        "data": {"n": 60},
        "estimators": ["hambo-ca", "ope-ds"],
        "L": 64, "L_true": 256, "seeds": [0, 1],
        "opt": {"pop": 8, "iters": 2, "rollouts_per_candidate": 4}
    })");
}

} // namespace

TEST_CASE("defaults, presets and overrides resolve in order")
{
    const Json cfg = resolve_config(Json::object(), {"gp.delta=0.05", "kernel.name=matern", "seeds=[3]"});
    CHECK(cfg["env"]["name"] == "point-env");
    CHECK(cfg["gp"]["delta"] == 0.05);
    CHECK(cfg["kernel"]["name"] == "matern");
    CHECK(cfg["seeds"] == Json::array({3}));
    CHECK(cfg["env"]["horizon"] == env_preset("point-env")["env"]["horizon"]);

    const Json ps = resolve_config(Json::parse(R"({"env": {"name": "point-safety"}})"));
    CHECK(ps["env"]["horizon"] == 16);
    const Json ps2 = resolve_config(Json::object(), {"env.name=point-safety"});
    CHECK(ps2 == ps);

    const Json user = Json::parse(R"({"gp": {"B": 3}})");
    CHECK(resolve_config(user, {"gp.B=4"})["gp"]["B"] == 4);
    CHECK(resolve_config(user)["gp"]["B"] == 3);
}

TEST_CASE("configs built in code validate like parsed ones")
{
    const Json user = {{"seeds", {0, 1}}, {"L", 5}, {"L_true", 10}, {"data", {{"n", 7}}}};
    const Json cfg = resolve_config(user);
    CHECK(cfg["L"] == 5);
    CHECK_THROWS_AS(resolve_config(Json{{"seeds", {-1}}}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json{{"L", 2.5}}), ConfigError);
}

TEST_CASE("override values fall back to strings")
{
    Json cfg = default_config();
    apply_override(cfg, "output=out/dir.json");
    CHECK(cfg["output"] == "out/dir.json");
    apply_override(cfg, "adversary.hidden=[8,8]");
    CHECK(cfg["adversary"]["hidden"] == Json::array({8, 8}));
    CHECK_THROWS_AS(apply_override(cfg, "gp.nonexistent=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "no-equals-sign"), ConfigError);
}

TEST_CASE("unknown keys and invalid values are config errors")
{
    CHECK_THROWS_AS(resolve_config(Json::parse(R"({"gp": {"sigma": 1}})")), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::parse(R"({"estimators": ["fqe"]})")), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"seeds=[]"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"L_true=1"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"data.calibration_fraction=1"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"sweep.axis=n", "sweep.values=[500,100]"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"dainf_quantile=0"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Json::object(), {"env.name=hopper"}), std::exception);
    CHECK_THROWS_AS(at_path(default_config(), "gp.zzz"), ConfigError);
    CHECK(at_path(default_config(), "gp.B") == 2);
}

TEST_CASE("config digest is stable and sensitive")
{
    const Json a = resolve_config(Json::object());
    const Json b = resolve_config(Json::object());
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 16);
    CHECK(config_digest(a) != config_digest(resolve_config(Json::object(), {"gp.B=2.5"})));
}

TEST_CASE("config files load from disk")
{
    const auto dir = scratch_dir("load");
    std::ofstream(dir / "c.json") << tiny_user_config().dump();
    CHECK(load_config(dir / "c.json") == tiny_user_config());
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
    CHECK_THROWS(load_config(dir / "missing.json"));
}

TEST_CASE("seed plan derives distinct deterministic seeds")
{
    const SeedPlan a = SeedPlan::from_root(4), b = SeedPlan::from_root(4), c = SeedPlan::from_root(5);
    CHECK(a.data == b.data);
    CHECK(a.evaluation == b.evaluation);
    CHECK(a.data != a.model);
    CHECK(a.optimizer != a.evaluation);
    CHECK(a.data != c.data);
    CHECK(a.evaluation == derive_seed(4, 103, 0));
}

TEST_CASE("datasets from the config")
{
    const Json cfg = resolve_config(tiny_user_config());
    const EnvBundle bundle = make_env_bundle(cfg);
    const auto d = make_dataset(cfg, bundle, 11);
    CHECK(d.size() == 60);
    CHECK(d.calibration_split().size() == 6);
    const auto small = make_dataset(cfg, bundle, 11, std::size_t{20});
    CHECK(small.size() == 20);
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(small[i].s == d[i].s);

    const Json beh = resolve_config(tiny_user_config(), {"data.mode=behavior", "data.n=3"});
    const auto db = make_dataset(beh, make_env_bundle(beh), 2);
    CHECK(db.size() == 30);
    const auto dt = make_dataset(beh, make_env_bundle(beh), 2, std::size_t{25});
    CHECK(dt.size() == 25);

    const auto dir = scratch_dir("data");
    mdp::write_jsonl(d, dir / "d.jsonl");
    Json from_file = cfg;
    from_file["data"]["path"] = (dir / "d.jsonl").string();
    const auto loaded = make_dataset(from_file, bundle, 0, std::size_t{30});
    CHECK(loaded.size() == 30);
    CHECK(loaded[29].s_next == d[29].s_next);
    CHECK(loaded.calibration_split().size() == 3);
}

TEST_CASE("gen-data sizes")
{
    CHECK(generate_dataset("point-env", "uniform", 17, 1).size() == 17);
    CHECK(generate_dataset("point-safety", "behavior", 2, 1).size() == 32);
    CHECK_THROWS(generate_dataset("point-env", "expert", 5, 1));
}

TEST_CASE("config adapters carry the settings through")
{
    const Json cfg = resolve_config(tiny_user_config(), {"kernel.name=matern", "kernel.nu=1.5", "gp.B=3",
                                                         "bnn.K=7", "bnn.hidden=[12]", "opt.method=random-search"});
    const gp::GPConfig g = gp_config(cfg, 2, 2);
    CHECK(g.kernel.type() == gp::KernelType::Matern);
    CHECK(g.kernel.nu() == 1.5);
    CHECK(g.B == 3.0);
    CHECK(g.input_scale.size() == 4);
    const bnn::SVGDConfig s = svgd_config(cfg, 9);
    CHECK(s.K == 7);
    CHECK(s.hidden == std::vector<int>{12});
    CHECK(s.seed == 9);
    const auto e = estimator_config(cfg, make_env_bundle(cfg), SeedPlan::from_root(0));
    CHECK(e.opt.method == opt::Method::RandomSearch);
    CHECK(e.L == 64);
    CHECK(e.eval_seed == SeedPlan::from_root(0).evaluation);
}

TEST_CASE("evaluate produces the results JSON surface")
{
    const Json cfg = resolve_config(tiny_user_config());
    std::vector<std::string> log;
    const auto rows = run_evaluate(cfg, [&](const std::string& s) { log.push_back(s); });
    REQUIRE(rows.size() == 4);
    CHECK(!log.empty());
    const Json arr = to_json(rows);
    REQUIRE(arr.is_array());
    for (const Json& r : arr) {
        for (const char* key : {"env", "estimator", "model", "seed", "sweep_axis", "sweep_value", "n", "horizon",
                                "config_digest", "J_true", "J_true_se", "J_true_normalized", "J_tilde",
                                "J_tilde_se", "J_tilde_normalized", "neutral_normalized", "lower_bound_holds",
                                "model_info", "timing", "verdict", "error", "report"})
            CHECK_MESSAGE(r.contains(key), key);
        CHECK(r["env"] == "point-env");
        CHECK(r["model"] == "gp");
        CHECK(r["n"] == 60);
        CHECK(r["horizon"] == 10);
        CHECK(r["error"].is_null());
        CHECK(r["config_digest"] == config_digest(cfg));
        CHECK(r["J_true_normalized"] == 1.0);
        CHECK(r["report"]["mc"]["rollouts"] == 64);
        CHECK(r["model_info"].contains("beta"));
        const double jt = r["J_tilde"], jtrue = r["J_true"], se = r["J_true_se"];
        CHECK(r["lower_bound_holds"] == (jt <= jtrue + 2.0 * se));
        CHECK(r["J_tilde_normalized"].get<double>() == doctest::Approx(mdp::normalize_return(jt, jtrue)));
    }
    CHECK(arr[0]["estimator"] == "hambo-ca");
    CHECK(arr[1]["estimator"] == "ope-ds");
    CHECK(arr[0]["report"]["adversary"]["optimizer"] == "cem");
    CHECK(arr[0]["J_tilde"].get<double>() <= arr[0]["report"]["neutral"]["mean"].get<double>());
    // Both estimators of a seed share the true-return reference.
    CHECK(arr[0]["J_true"] == arr[1]["J_true"]);

    const auto again = run_evaluate(cfg);
    CHECK(to_json(again)[2]["J_tilde"] == arr[2]["J_tilde"]);
}

TEST_CASE("estimators needing an ensemble are error rows under a GP model")
{
    const Json cfg = resolve_config(tiny_user_config(), {"estimators=[\"hambo-da1\"]", "seeds=[0]"});
    const auto rows = run_evaluate(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(!rows[0].report);
    CHECK(!rows[0].error.empty());
    const Json j = to_json(rows[0]);
    CHECK(j["J_tilde"].is_null());
    CHECK(j["error"].is_string());
}

TEST_CASE("n sweep refits on prefixes of one master dataset")
{
    const Json cfg = resolve_config(tiny_user_config(), {"sweep.axis=n", "sweep.values=[20,40]", "seeds=[0]",
                                                         "estimators=[\"ope-ds\"]"});
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n == 20);
    CHECK(rows[1].n == 40);
    CHECK(rows[0].sweep_axis == "n");
    CHECK(rows[1].sweep_value == std::size_t{40});
    CHECK(rows[0].model_info["train_size"] == 18);
    CHECK(rows[1].model_info["train_size"] == 36);
    CHECK(rows[0].J_true.mean == rows[1].J_true.mean);
}

TEST_CASE("horizon sweep changes T and the reference")
{
    const Json cfg = resolve_config(tiny_user_config(), {"sweep.axis=horizon", "sweep.values=[5,10]", "seeds=[0]",
                                                         "estimators=[\"ope-ds\"]"});
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].horizon == 5);
    CHECK(rows[1].horizon == 10);
    CHECK(rows[0].J_true.mean > rows[1].J_true.mean);
}

TEST_CASE("results are written atomically")
{
    const auto dir = scratch_dir("atomic");
    write_atomic(dir / "x.json", "[1]");
    CHECK(slurp(dir / "x.json") == "[1]");
    CHECK(!std::filesystem::exists(dir / "x.json.tmp"));
    write_atomic(dir / "x.json", "[2]");
    CHECK(slurp(dir / "x.json") == "[2]");
    write_results(dir / "r.json", {});
    CHECK(Json::parse(slurp(dir / "r.json")) == Json::array());
}

TEST_CASE("trajectory CSV round trip")
{
    std::vector<TrajectoryRow> rows{{0, 0.1, -2.0, 0.01, 0.02, "neutral"},
                                    {1, 1.0 / 3.0, 1e-17, 0.0, 5.5, "adversarial"}};
    const std::string text = trajectory_csv(rows);
    CHECK(text.rfind("t,sx,sy,radius_x,radius_y,variant\n", 0) == 0);
    const auto back = parse_trajectory_csv(text);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].t == rows[i].t);
        CHECK(back[i].sx == rows[i].sx);
        CHECK(back[i].sy == rows[i].sy);
        CHECK(back[i].radius_x == rows[i].radius_x);
        CHECK(back[i].radius_y == rows[i].radius_y);
        CHECK(back[i].variant == rows[i].variant);
    }
}

TEST_CASE("malformed trajectory CSV names the line")
{
    const std::string good = "t,sx,sy,radius_x,radius_y,variant\n0,1,2,3,4,neutral\n";
    CHECK_NOTHROW(parse_trajectory_csv(good));
    try {
        parse_trajectory_csv(good + "1,1,2,3,neutral\n");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS(parse_trajectory_csv(good + "x,1,2,3,4,neutral\n"));
    CHECK_THROWS(parse_trajectory_csv("t,sx,sy\n"));
}

TEST_CASE("toy demo writes both interface files")
{
    const auto res = run_toy_demo({0}, {"L=64", "L_true=64", "opt.pop=8", "opt.iters=2"});
    REQUIRE(res.seeds.size() == 1);
    const ToyDemoSeed& s = res.seeds[0];
    const int T = res.config["env"]["horizon"];
    CHECK(s.trajectories.size() == 2u * static_cast<std::size_t>(T));
    CHECK(s.adversarial_unsafe == (s.adversarial_min_norm <= 1.0));
    CHECK(s.neutral_unsafe == (s.neutral_min_norm <= 1.0));
    for (const auto& r : s.trajectories) {
        CHECK((r.variant == "neutral" || r.variant == "adversarial"));
        CHECK(r.radius_x >= 0.0);
    }
    REQUIRE(res.records.size() == 2);
    for (const auto& r : res.records)
        CHECK(r.verdict);

    const auto dir = scratch_dir("toy");
    write_toy_demo(res, dir);
    const Json j = Json::parse(slurp(dir / "results.json"));
    CHECK(j.is_array());
    CHECK(j.size() == 2);
    CHECK(j[0]["verdict"].is_string());
    const auto rows = parse_trajectory_csv(slurp(dir / "trajectories_seed0.csv"));
    CHECK(rows.size() == s.trajectories.size());
    CHECK(rows.front().variant == s.trajectories.front().variant);
}
