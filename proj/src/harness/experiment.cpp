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

#include "cope/mdp/rollout.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cope::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void say(const Logger& log, const std::string& msg)
{
    if (log)
        log(msg);
}

Eigen::VectorXd vector_or_empty(const Json& j, Eigen::Index expected, const std::string& key)
{
    if (j.is_null())
        return {};
    const auto v = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != expected)
        throw ConfigError(key + " must have " + std::to_string(expected) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

Json estimate_json(const mdp::ReturnEstimate& e)
{
    return {{"mean", e.mean}, {"se", e.std_error}, {"rollouts", e.num_rollouts}};
}

Json vector_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

} // namespace

SeedPlan SeedPlan::from_root(std::uint64_t root)
{
    return SeedPlan{derive_seed(root, 100, 0), derive_seed(root, 101, 0), derive_seed(root, 102, 0),
                    derive_seed(root, 103, 0)};
}

Json to_json(const ResultsRecord& r)
{
    Json j;
    j["env"] = r.env;
    j["estimator"] = r.estimator;
    j["model"] = r.model;
    j["seed"] = r.seed;
    j["sweep_axis"] = r.sweep_axis;
    j["sweep_value"] = r.sweep_value ? Json(*r.sweep_value) : Json(nullptr);
    j["n"] = r.n;
    j["horizon"] = r.horizon;
    j["config_digest"] = r.config_digest;
    j["J_true"] = r.J_true.mean;
    j["J_true_se"] = r.J_true.std_error;
    j["J_true_normalized"] = r.J_true_normalized;
    j["model_info"] = r.model_info;
    j["timing"] = {{"fit_seconds", r.timing.fit_seconds},
                   {"estimate_seconds", r.timing.estimate_seconds},
                   {"true_seconds", r.timing.true_seconds}};
    j["verdict"] = r.verdict ? Json(*r.verdict) : Json(nullptr);
    j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    if (!r.report) {
        j["J_tilde"] = nullptr;
        j["report"] = nullptr;
        return j;
    }
    const hambo::CopeReport& rep = *r.report;
    j["J_tilde"] = rep.J_tilde;
    j["J_tilde_se"] = rep.mc.std_error;
    j["J_tilde_normalized"] = r.J_tilde_normalized;
    j["neutral_normalized"] = r.neutral_normalized ? Json(*r.neutral_normalized) : Json(nullptr);
    j["lower_bound_holds"] = r.lower_bound_holds;
    const hambo::AdversarySummary& a = rep.adversary;
    j["report"] = {
        {"estimator", rep.estimator},
        {"J_tilde", rep.J_tilde},
        {"mc", estimate_json(rep.mc)},
        {"neutral", rep.neutral ? estimate_json(*rep.neutral) : Json(nullptr)},
        {"member_values", rep.member_values},
        {"config_digest", rep.config_digest},
        {"seed", rep.seed},
        {"adversary",
         {{"optimizer", a.optimizer},
          {"iterations", a.iterations},
          {"evaluations", a.evaluations},
          {"failed_evaluations", a.failed_evaluations},
          {"best_objective", std::isfinite(a.best_objective) ? Json(a.best_objective) : Json(nullptr)},
          {"null_objective", std::isfinite(a.null_objective) ? Json(a.null_objective) : Json(nullptr)},
          {"incumbent_trace", a.incumbent_trace},
          {"fallback", a.fallback},
          {"null_selected", a.null_selected},
          {"best_params", vector_json(a.best_params)}}},
    };
    return j;
}

Json to_json(const std::vector<ResultsRecord>& rows)
{
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back(to_json(r));
    return arr;
}

void write_atomic(const std::filesystem::path& path, const std::string& text)
{
    const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void write_results(const std::filesystem::path& path, const std::vector<ResultsRecord>& rows)
{
    write_atomic(path, to_json(rows).dump(2) + "\n");
}

mdp::Dataset make_dataset(const Json& config, const EnvBundle& bundle, std::uint64_t data_seed,
                          std::optional<std::size_t> transitions)
{
    const Json& d = config.at("data");
    const double frac = d.at("calibration_fraction");
    mdp::Dataset data(bundle.env->state_dim(), bundle.env->action_dim());
    if (!d.at("path").is_null()) {
        const std::filesystem::path path = d.at("path").get<std::string>();
        if (!std::filesystem::exists(path))
            throw ConfigError("dataset '" + path.string() + "' does not exist");
        data = mdp::read_jsonl(path);
        if (data.state_dim() != bundle.env->state_dim() || data.action_dim() != bundle.env->action_dim())
            throw ConfigError("dataset '" + path.string() + "' does not match environment " + bundle.name);
        if (transitions) {
            if (*transitions > data.size())
                throw ConfigError("dataset '" + path.string() + "' has fewer than " + std::to_string(*transitions) +
                                  " transitions");
            data = data.prefix(*transitions);
            data.set_tail_calibration(frac);
        } else if (data.calibration_split().empty()) {
            data.set_tail_calibration(frac);
        }
        return data;
    }
    const std::string mode = d.at("mode");
    if (mode == "uniform") {
        data = mdp::generate_uniform_dataset(*bundle.env, bundle.data_box, transitions.value_or(d.at("n")), data_seed);
    } else {
        const std::size_t T = static_cast<std::size_t>(bundle.env->horizon());
        const std::size_t episodes = transitions ? (*transitions + T - 1) / T : d.at("n").get<std::size_t>();
        data = mdp::generate_behavior_dataset(*bundle.env, bundle.behavior, episodes, d.at("action_noise"), data_seed);
        if (transitions)
            data = data.prefix(*transitions);
    }
    data.set_tail_calibration(frac);
    return data;
}

mdp::Dataset generate_dataset(const std::string& env_name, const std::string& mode, std::size_t n,
                              std::uint64_t seed)
{
    const Json config = resolve_config({{"env", {{"name", env_name}}}, {"data", {{"mode", mode}, {"n", n}}}});
    return make_dataset(config, make_env_bundle(config), seed);
}

gp::GPConfig gp_config(const Json& config, int state_dim, int action_dim)
{
    const Json& k = config.at("kernel");
    const Json& g = config.at("gp");
    gp::GPConfig c;
    c.kernel = gp::Kernel::from_name(k.at("name"), k.at("lengthscale"), k.at("nu"));
    c.sigma_eps = g.at("sigma_eps");
    c.B = g.at("B");
    c.delta = g.at("delta");
    c.gamma_mode = gp::parse_gamma_mode(g.at("gamma_mode"));
    c.rate_constant = g.at("rate_constant");
    c.target = mdp::parse_target_mode(config.at("model").at("target"));
    c.input_scale = vector_or_empty(config.at("model").at("input_scale"), state_dim + action_dim, "model.input_scale");
    return c;
}

bnn::SVGDConfig svgd_config(const Json& config, std::uint64_t seed)
{
    const Json& b = config.at("bnn");
    bnn::SVGDConfig c;
    c.K = b.at("K");
    c.hidden = b.at("hidden").get<std::vector<int>>();
    c.prior_temp = b.at("prior_temp");
    c.kernel_lengthscale = b.at("lengthscale");
    c.median_heuristic = b.at("median_heuristic");
    c.batch_size = b.at("batch");
    c.learning_rate = b.at("lr");
    c.max_epochs = b.at("max_epochs");
    c.patience = b.at("patience");
    c.validation_fraction = b.at("validation_fraction");
    c.target = mdp::parse_target_mode(config.at("model").at("target"));
    c.seed = seed;
    return c;
}

hambo::EstimatorConfig estimator_config(const Json& config, const EnvBundle& bundle, const SeedPlan& seeds)
{
    const int d_s = bundle.env->state_dim(), d_a = bundle.env->action_dim();
    const Json& o = config.at("opt");
    hambo::EstimatorConfig c;
    c.opt.method = opt::parse_method(o.at("method"));
    c.opt.population = o.at("pop");
    c.opt.elite_fraction = o.at("elite");
    c.opt.iterations = o.at("iters");
    c.opt.init_std = o.at("init_std");
    c.opt.std_floor = o.at("std_floor");
    c.opt.samples = o.at("samples");
    c.opt.common_random_numbers = o.at("common_random_numbers");
    c.opt.seed = seeds.optimizer;
    c.rollouts_per_candidate = o.at("rollouts_per_candidate");
    c.L = config.at("L");
    c.eval_seed = seeds.evaluation;

    const Json& a = config.at("adversary");
    const std::string kind = a.at("kind");
    if (kind == "mlp")
        c.adversary.kind = hambo::AdversarySpec::Kind::MLP;
    else if (kind == "grid")
        c.adversary.kind = hambo::AdversarySpec::Kind::Grid;
    else
        throw ConfigError("adversary.kind must be mlp or grid");
    c.adversary.hidden = a.at("hidden").get<std::vector<int>>();
    c.adversary.input_scale = vector_or_empty(a.at("input_scale"), d_s + d_a, "adversary.input_scale");
    c.adversary.param_bound = a.at("param_bound");
    if (c.adversary.kind == hambo::AdversarySpec::Kind::Grid) {
        Eigen::VectorXd lo(d_s + d_a), hi(d_s + d_a);
        lo << bundle.data_box.lo, bundle.env->task().action_box.lo;
        hi << bundle.data_box.hi, bundle.env->task().action_box.hi;
        c.adversary.grid_lo = a.at("grid_lo").is_null() ? lo : vector_or_empty(a.at("grid_lo"), d_s + d_a, "adversary.grid_lo");
        c.adversary.grid_hi = a.at("grid_hi").is_null() ? hi : vector_or_empty(a.at("grid_hi"), d_s + d_a, "adversary.grid_hi");
        c.adversary.grid_cells.assign(static_cast<std::size_t>(d_s + d_a), a.at("grid_cells").get<int>());
    }
    const Json& dd = config.at("discrete");
    c.discrete.input_scale = vector_or_empty(dd.at("input_scale"), d_s + d_a, "discrete.input_scale");
    c.discrete.param_bound = dd.at("param_bound");
    if (!config.at("dainf_quantile").is_null())
        c.dainf_quantile = config.at("dainf_quantile").get<double>();
    return c;
}

FittedModels fit_models(const Json& config, const EnvBundle& bundle, const mdp::Dataset& data, std::uint64_t seed)
{
    FittedModels out;
    const auto start = Clock::now();
    const mdp::StateTopology& topology = bundle.env->task().topology;
    try {
        if (config.at("model").at("type") == "gp") {
            auto model = std::make_shared<gp::GPModel>(
                gp::GPModel::fit(data, gp_config(config, data.state_dim(), data.action_dim()), topology));
            out.info = {{"beta", model->beta()},
                        {"gamma", model->gamma()},
                        {"jitter", model->regressor().jitter()},
                        {"train_size", model->regressor().size()}};
            out.gp = std::move(model);
        } else {
            bnn::TrainingReport report;
            auto ens = std::make_shared<bnn::Ensemble>(
                bnn::Ensemble::train(data, svgd_config(config, seed), topology, &report));
            if (!data.calibration_split().empty())
                ens->recalibrate(data, topology);
            out.info = {{"epochs", report.epochs},
                        {"best_epoch", report.best_epoch},
                        {"best_validation_ll", report.best_validation_ll},
                        {"calib_tau", vector_json(ens->calib_tau())}};
            out.ensemble = std::move(ens);
        }
    } catch (const std::exception& e) {
        out.error = std::string("model fit failed: ") + e.what();
    }
    out.seconds = seconds_since(start);
    return out;
}

std::vector<ResultsRecord> evaluate_block(const Json& config, const EnvBundle& bundle, const FittedModels& models,
                                          std::uint64_t seed, std::size_t n, const std::string& axis,
                                          std::optional<std::size_t> value, const Logger& log)
{
    const SeedPlan plan = SeedPlan::from_root(seed);
    const std::string digest = config_digest(config);
    const std::string model_type = config.at("model").at("type");

    auto t0 = Clock::now();
    const mdp::ReturnEstimate J_true =
        mdp::mc_return_estimate(*bundle.env, *bundle.policy, config.at("L_true"), plan.evaluation);
    const double true_seconds = seconds_since(t0);

    std::vector<ResultsRecord> rows;
    for (const auto& name_json : config.at("estimators")) {
        const std::string name = name_json;
        const hambo::Estimator e = hambo::parse_estimator(name);
        ResultsRecord r;
        r.env = bundle.name;
        r.estimator = name;
        r.model = model_type;
        r.seed = seed;
        r.sweep_axis = axis;
        r.sweep_value = value;
        r.n = n;
        r.horizon = bundle.env->horizon();
        r.config_digest = digest;
        r.J_true = J_true;
        r.J_true_normalized = mdp::normalize_return(J_true.mean, J_true.mean);
        r.model_info = models.info;
        r.timing.fit_seconds = models.seconds;
        r.timing.true_seconds = true_seconds;

        t0 = Clock::now();
        if (!models.error.empty()) {
            r.error = models.error;
        } else if (hambo::needs_ensemble(e) && !models.ensemble) {
            r.error = name + " requires model.type = ensemble";
        } else {
            try {
                std::shared_ptr<const mdp::StatisticalModel> model =
                    models.gp ? std::static_pointer_cast<const mdp::StatisticalModel>(models.gp)
                              : std::static_pointer_cast<const mdp::StatisticalModel>(models.ensemble);
                hambo::CopeReport rep = hambo::run_estimator(e, *bundle.env, *bundle.policy, model, models.ensemble,
                                                             estimator_config(config, bundle, plan));
                rep.config_digest = digest;
                rep.seed = seed;
                r.J_tilde_normalized = mdp::normalize_return(rep.J_tilde, J_true.mean);
                if (rep.neutral)
                    r.neutral_normalized = mdp::normalize_return(rep.neutral->mean, J_true.mean);
                r.lower_bound_holds = rep.J_tilde <= J_true.mean + 2.0 * J_true.std_error;
                r.report = std::move(rep);
            } catch (const std::exception& ex) {
                r.error = ex.what();
            }
        }
        r.timing.estimate_seconds = seconds_since(t0);
        std::ostringstream msg;
        msg << bundle.name << " seed=" << seed << " n=" << n << " T=" << r.horizon << " " << name << ": ";
        if (r.report)
            msg << "J~=" << r.report->J_tilde << " J_true=" << J_true.mean << " (" << r.timing.estimate_seconds
                << " s)";
        else
            msg << "error: " << r.error;
        say(log, msg.str());
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultsRecord> run_evaluate(const Json& config, const Logger& log)
{
    std::vector<ResultsRecord> rows;
    const EnvBundle bundle = make_env_bundle(config);
    for (const auto& s : config.at("seeds")) {
        const std::uint64_t seed = s;
        const SeedPlan plan = SeedPlan::from_root(seed);
        const mdp::Dataset data = make_dataset(config, bundle, plan.data);
        const FittedModels models = fit_models(config, bundle, data, plan.model);
        auto block = evaluate_block(config, bundle, models, seed, data.size(), "none", std::nullopt, log);
        rows.insert(rows.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
    }
    return rows;
}

std::vector<ResultsRecord> run_sweep(const Json& config, const Logger& log)
{
    const std::string axis = config.at("sweep").at("axis");
    if (axis == "none")
        return run_evaluate(config, log);
    const auto values = config.at("sweep").at("values").get<std::vector<std::size_t>>();
    const double frac = config.at("data").at("calibration_fraction");
    std::vector<ResultsRecord> rows;
    const EnvBundle base = make_env_bundle(config);
    for (const auto& s : config.at("seeds")) {
        const std::uint64_t seed = s;
        const SeedPlan plan = SeedPlan::from_root(seed);
        if (axis == "n") {
            const mdp::Dataset master = make_dataset(config, base, plan.data, values.back());
            for (std::size_t v : values) {
                mdp::Dataset data = master.prefix(v);
                data.set_tail_calibration(frac);
                const FittedModels models = fit_models(config, base, data, plan.model);
                auto block = evaluate_block(config, base, models, seed, v, axis, v, log);
                rows.insert(rows.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
            }
        } else {
            const mdp::Dataset data = make_dataset(config, base, plan.data);
            const FittedModels models = fit_models(config, base, data, plan.model);
            for (std::size_t v : values) {
                const EnvBundle bundle = make_env_bundle(config, static_cast<int>(v));
                auto block = evaluate_block(config, bundle, models, seed, data.size(), axis, v, log);
                rows.insert(rows.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
            }
        }
    }
    return rows;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows)
{
    std::ostringstream out;
    out.precision(17);
    out << "t,sx,sy,radius_x,radius_y,variant\n";
    for (const auto& r : rows)
        out << r.t << ',' << r.sx << ',' << r.sy << ',' << r.radius_x << ',' << r.radius_y << ',' << r.variant << '\n';
    return out.str();
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "t,sx,sy,radius_x,radius_y,variant")
        throw std::runtime_error("trajectory csv line 1: bad header");
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 6 || f[5].empty())
            throw std::runtime_error("trajectory csv line " + std::to_string(line_no) + ": expected 6 fields");
        try {
            std::size_t pos = 0;
            TrajectoryRow r;
            r.t = std::stoi(f[0], &pos);
            if (pos != f[0].size())
                throw std::invalid_argument("t");
            double* targets[] = {&r.sx, &r.sy, &r.radius_x, &r.radius_y};
            for (int k = 0; k < 4; ++k) {
                *targets[k] = std::stod(f[static_cast<std::size_t>(k + 1)], &pos);
                if (pos != f[static_cast<std::size_t>(k + 1)].size())
                    throw std::invalid_argument("number");
            }
            r.variant = f[5];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error("trajectory csv line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

Json toy_demo_config()
{
    return resolve_config(Json::parse(R"({
        "env": {"name": "point-safety"},
        "estimators": ["hambo-ca", "ope-ds"],
        "model": {"type": "gp"},
        "kernel": {"name": "rbf", "lengthscale": 1.0},
        "L": 1000,
        "L_true": 1000,
        "opt": {"pop": 32, "iters": 10, "rollouts_per_candidate": 4},
        "output": "toy-demo"
    })"));
}

namespace {

struct MeanPath {
    std::vector<TrajectoryRow> rows;
    double min_norm = std::numeric_limits<double>::infinity();
};

// Noise-free rollout of a deterministic policy through the CA mean of `henv`.
MeanPath mean_path(const hambo::HallucinatedEnv& henv, const mdp::StatisticalModel& model, const mdp::Policy& policy,
                   const std::string& variant)
{
    const mdp::Task& task = henv.task();
    Rng rng(0);
    StateVec s = task.initial(rng);
    const Eigen::VectorXd scale = model.confidence_scale();
    MeanPath out;
    for (int t = 0; t < task.horizon; ++t) {
        const ActionVec a = policy.act(s, rng);
        const Batch S = s.transpose();
        const Batch A = a.transpose();
        const Eigen::VectorXd radius = scale.cwiseProduct(model.predict(S, A).epistemic_std.row(0).transpose());
        out.rows.push_back({t, s[0], s[1], radius[0], radius[1], variant});
        out.min_norm = std::min(out.min_norm, s.norm());
        StateVec next = henv.hallucinated_mean(S, A).row(0).transpose();
        task.topology.canonicalize(next);
        s = next;
    }
    return out;
}

} // namespace

ToyDemoResult run_toy_demo(const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& overrides,
                           const Logger& log)
{
    Json user = toy_demo_config();
    user["seeds"] = seeds;
    ToyDemoResult result;
    result.config = resolve_config(user, overrides);
    const Json& config = result.config;
    if (config.at("env").at("name") != "point-safety")
        throw ConfigError("toy-demo runs on point-safety");
    if (config.at("model").at("type") != "gp")
        throw ConfigError("toy-demo uses a GP model");
    const EnvBundle bundle = make_env_bundle(config);
    const double radius = config.at("env").at("danger_radius");

    for (std::uint64_t seed : seeds) {
        const SeedPlan plan = SeedPlan::from_root(seed);
        const mdp::Dataset data = make_dataset(config, bundle, plan.data);
        const FittedModels models = fit_models(config, bundle, data, plan.model);
        if (!models.error.empty())
            throw std::runtime_error("toy-demo seed " + std::to_string(seed) + ": " + models.error);
        std::vector<ResultsRecord> rows =
            evaluate_block(config, bundle, models, seed, data.size(), "none", std::nullopt, log);

        const hambo::EstimatorConfig ecfg = estimator_config(config, bundle, plan);
        std::shared_ptr<const hambo::ContinuousAdversary> adversary;
        for (const auto& r : rows)
            if (r.estimator == "hambo-ca" && r.report && !r.report->adversary.null_selected &&
                !r.report->adversary.fallback)
                adversary = ecfg.adversary.make(r.report->adversary.best_params, bundle.env->state_dim(),
                                                bundle.env->action_dim());
        const auto neutral_env = hambo::make_gp_hallucinated_env(models.gp, nullptr, *bundle.env);
        const auto adv_env = hambo::make_gp_hallucinated_env(models.gp, adversary, *bundle.env);
        const MeanPath neutral = mean_path(*neutral_env, *models.gp, *bundle.policy, "neutral");
        const MeanPath adv = mean_path(*adv_env, *models.gp, *bundle.policy, "adversarial");

        ToyDemoSeed out;
        out.seed = seed;
        out.neutral_min_norm = neutral.min_norm;
        out.adversarial_min_norm = adv.min_norm;
        out.neutral_unsafe = neutral.min_norm <= radius;
        out.adversarial_unsafe = adv.min_norm <= radius;
        out.trajectories = neutral.rows;
        out.trajectories.insert(out.trajectories.end(), adv.rows.begin(), adv.rows.end());
        for (auto& r : rows) {
            if (r.estimator == "hambo-ca")
                r.verdict = out.adversarial_unsafe ? "unsafe" : "safe";
            else if (r.estimator == "ope-ds")
                r.verdict = out.neutral_unsafe ? "unsafe" : "safe";
        }
        say(log, "toy-demo seed=" + std::to_string(seed) + ": neutral min|s|=" + std::to_string(neutral.min_norm) +
                     " adversarial min|s|=" + std::to_string(adv.min_norm));
        result.records.insert(result.records.end(), rows.begin(), rows.end());
        result.seeds.push_back(std::move(out));
    }
    return result;
}

void write_toy_demo(const ToyDemoResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_results(dir / "results.json", result.records);
    for (const auto& s : result.seeds)
        write_atomic(dir / ("trajectories_seed" + std::to_string(s.seed) + ".csv"), trajectory_csv(s.trajectories));
}

} // namespace cope::harness
