#include "satsnet/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "satsnet/baseline_ar.hpp"
#include "satsnet/errors.hpp"

namespace satsnet {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kReportFormat = "satsnet-report-v1";
constexpr const char* kModelFormat = "satsnet-model-v1";
constexpr const char* kBenchFormat = "satsnet-bench-v1";

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ActivationSpec make_activation_spec(const ExperimentConfig& config) {
    switch (config.activation) {
    case ActivationKind::ArandaFree:
        return ActivationSpec::aranda_free(1.0, config.lambda_min, config.lambda_max);
    case ActivationKind::ArandaFixed:
        return ActivationSpec::aranda_fixed(config.lambda_min); // not reachable via CLI
    case ActivationKind::Logit:
        return ActivationSpec::logit();
    case ActivationKind::Cloglog:
        return ActivationSpec::cloglog();
    }
    throw std::invalid_argument("unknown activation kind");
}

std::vector<double> predict(const MlpParams& params, const Supervised& data) {
    std::vector<double> out(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        out[j] = forward(params, data.X.row(j)).output;
    }
    return out;
}

// Metrics in the modeled (inverse-scaled) space; a log transform is part of
// the modeled space and stays applied.
Metrics descaled_metrics(const MlpParams& params, const Supervised& data,
                         const ScaleInfo& scale) {
    const std::vector<double> scaled_pred = predict(params, data);
    std::vector<double> targets(data.size()), predictions(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        targets[j] = scale.invert(data.y[j]);
        predictions[j] = scale.invert(scaled_pred[j]);
    }
    return compute_metrics(targets, predictions);
}

Supervised concat(const Supervised& a, const Supervised& b) {
    if (b.empty()) return a;
    if (a.empty()) return b;
    Supervised out;
    out.X = RowMatrix(a.size() + b.size(), a.X.cols);
    out.y.reserve(a.size() + b.size());
    std::copy(a.X.data.begin(), a.X.data.end(), out.X.data.begin());
    std::copy(b.X.data.begin(), b.X.data.end(), out.X.data.begin() + a.X.data.size());
    out.y = a.y;
    out.y.insert(out.y.end(), b.y.begin(), b.y.end());
    return out;
}

ordered_json metrics_to_json(const Metrics& m) {
    ordered_json j;
    j["sse"] = m.sse;
    j["mse"] = m.mse;
    j["mae"] = m.mae;
    if (m.mape) {
        j["mape"] = *m.mape;
    } else {
        j["mape"] = nullptr;
    }
    return j;
}

ordered_json aggregate_to_json(const MetricsAggregate& agg) {
    ordered_json j;
    j["mean"] = metrics_to_json(agg.mean);
    if (agg.sd) {
        j["sd"] = metrics_to_json(*agg.sd);
    } else {
        j["sd"] = nullptr;
    }
    return j;
}

ordered_json scale_to_json(const ScaleInfo& scale) {
    return ordered_json{{"lo", scale.lo},
                        {"hi", scale.hi},
                        {"target_lo", scale.target_lo},
                        {"target_hi", scale.target_hi}};
}

ScaleInfo scale_from_json(const ordered_json& j) {
    ScaleInfo scale;
    scale.lo = j.at("lo").get<double>();
    scale.hi = j.at("hi").get<double>();
    scale.target_lo = j.at("target_lo").get<double>();
    scale.target_hi = j.at("target_hi").get<double>();
    return scale;
}

} // namespace

std::string pipeline_name(Pipeline pipeline) {
    switch (pipeline) {
    case Pipeline::Sats: return "sats";
    case Pipeline::SatsBpm: return "sats-bpm";
    case Pipeline::SatsLm: return "sats-lm";
    }
    throw std::invalid_argument("unknown pipeline");
}

Pipeline pipeline_from_name(const std::string& name) {
    if (name == "sats") return Pipeline::Sats;
    if (name == "sats-bpm") return Pipeline::SatsBpm;
    if (name == "sats-lm") return Pipeline::SatsLm;
    throw std::invalid_argument("unknown pipeline '" + name + "' (want sats|sats-bpm|sats-lm)");
}

std::string activation_cli_name(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::ArandaFree: return "aranda";
    case ActivationKind::ArandaFixed: return "aranda-fixed";
    case ActivationKind::Logit: return "logit";
    case ActivationKind::Cloglog: return "cloglog";
    }
    throw std::invalid_argument("unknown activation kind");
}

ActivationKind activation_from_cli_name(const std::string& name) {
    if (name == "aranda") return ActivationKind::ArandaFree;
    if (name == "aranda-fixed") return ActivationKind::ArandaFixed;
    if (name == "logit") return ActivationKind::Logit;
    if (name == "cloglog") return ActivationKind::Cloglog;
    throw std::invalid_argument("unknown activation '" + name + "' (want aranda|logit|cloglog)");
}

void ExperimentConfig::apply_paper_scale() {
    restarts = 100;
    inner_runs = 10;
    sats.max_iters = 10000;
}

void ExperimentConfig::validate() const {
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (inner_runs < 1) throw std::invalid_argument("inner_runs must be >= 1");
    if (!auto_lags && lags < 1) {
        throw std::invalid_argument("lags must be >= 1 (or enable auto lag selection)");
    }
    if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
    if (test_len < 1) throw std::invalid_argument("test_len must be >= 1");
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw std::invalid_argument("val_fraction must lie in [0, 1)");
    }
    sats.validate();
    bpm.validate();
    lm.validate();
}

std::string ExperimentConfig::variant_name() const {
    return pipeline_name(pipeline) + "_" + activation_cli_name(activation);
}

std::string config_to_json(const ExperimentConfig& config) {
    ordered_json j;
    j["data"] = config.data_path.string();
    j["name"] = config.dataset_name;
    j["transform"] = config.transform_log ? "log" : "none";
    if (config.auto_lags) {
        j["lags"] = "auto";
    } else {
        j["lags"] = config.lags;
    }
    j["max_auto_lags"] = config.max_auto_lags;
    j["hidden"] = config.hidden;
    j["activation"] = activation_cli_name(config.activation);
    j["lambda_min"] = config.lambda_min;
    j["lambda_max"] = config.lambda_max;
    j["pipeline"] = pipeline_name(config.pipeline);
    j["restarts"] = config.restarts;
    j["inner_runs"] = config.inner_runs;
    j["test_len"] = config.test_len;
    j["val_fraction"] = config.val_fraction;
    j["sats"] = {{"initial_temp", config.sats.initial_temp},
                 {"iters_per_temp", config.sats.iters_per_temp},
                 {"max_iters", config.sats.max_iters},
                 {"pool_size", config.sats.pool_size},
                 {"tabu_len", config.sats.tabu_len},
                 {"tabu_radius", config.sats.tabu_radius},
                 {"sigma_weights", config.sats.sigma_weights},
                 {"sigma_lambda", config.sats.sigma_lambda}};
    j["bpm"] = {{"learning_rate", config.bpm.learning_rate},
                {"momentum", config.bpm.momentum},
                {"max_epochs", config.bpm.max_epochs},
                {"patience", config.bpm.patience},
                {"gl_threshold", config.bpm.gl_threshold}};
    j["lm"] = {{"mu0", config.lm.mu0},
               {"mu_up", config.lm.mu_up},
               {"mu_down", config.lm.mu_down},
               {"mu_max", config.lm.mu_max},
               {"max_epochs", config.lm.max_epochs},
               {"patience", config.lm.patience},
               {"gl_threshold", config.lm.gl_threshold}};
    j["sa_gl_threshold"] = config.sa_gl_threshold;
    j["seed"] = config.master_seed;
    j["out"] = config.out_dir.string();
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw DataError(std::string("config JSON parse error: ") + e.what());
    }
    ExperimentConfig config;
    if (j.contains("data")) config.data_path = j.at("data").get<std::string>();
    if (j.contains("name")) config.dataset_name = j.at("name").get<std::string>();
    if (j.contains("transform")) {
        const auto t = j.at("transform").get<std::string>();
        if (t != "log" && t != "none") {
            throw DataError("config: transform must be 'log' or 'none'");
        }
        config.transform_log = t == "log";
    }
    if (j.contains("lags")) {
        if (j.at("lags").is_string()) {
            if (j.at("lags").get<std::string>() != "auto") {
                throw DataError("config: lags must be an integer or \"auto\"");
            }
            config.auto_lags = true;
        } else {
            config.lags = j.at("lags").get<int>();
            config.auto_lags = false;
        }
    }
    if (j.contains("max_auto_lags")) config.max_auto_lags = j.at("max_auto_lags").get<int>();
    if (j.contains("hidden")) config.hidden = j.at("hidden").get<int>();
    if (j.contains("activation")) {
        config.activation = activation_from_cli_name(j.at("activation").get<std::string>());
    }
    if (j.contains("lambda_min")) config.lambda_min = j.at("lambda_min").get<double>();
    if (j.contains("lambda_max")) config.lambda_max = j.at("lambda_max").get<double>();
    if (j.contains("pipeline")) {
        config.pipeline = pipeline_from_name(j.at("pipeline").get<std::string>());
    }
    if (j.contains("restarts")) config.restarts = j.at("restarts").get<int>();
    if (j.contains("inner_runs")) config.inner_runs = j.at("inner_runs").get<int>();
    if (j.contains("test_len")) config.test_len = j.at("test_len").get<int>();
    if (j.contains("val_fraction")) config.val_fraction = j.at("val_fraction").get<double>();
    if (j.contains("sats")) {
        const auto& s = j.at("sats");
        if (s.contains("initial_temp")) config.sats.initial_temp = s.at("initial_temp").get<double>();
        if (s.contains("iters_per_temp")) config.sats.iters_per_temp = s.at("iters_per_temp").get<int>();
        if (s.contains("max_iters")) config.sats.max_iters = s.at("max_iters").get<int>();
        if (s.contains("pool_size")) config.sats.pool_size = s.at("pool_size").get<int>();
        if (s.contains("tabu_len")) config.sats.tabu_len = s.at("tabu_len").get<std::size_t>();
        if (s.contains("tabu_radius")) config.sats.tabu_radius = s.at("tabu_radius").get<double>();
        if (s.contains("sigma_weights")) config.sats.sigma_weights = s.at("sigma_weights").get<double>();
        if (s.contains("sigma_lambda")) config.sats.sigma_lambda = s.at("sigma_lambda").get<double>();
    }
    if (j.contains("bpm")) {
        const auto& b = j.at("bpm");
        if (b.contains("learning_rate")) config.bpm.learning_rate = b.at("learning_rate").get<double>();
        if (b.contains("momentum")) config.bpm.momentum = b.at("momentum").get<double>();
        if (b.contains("max_epochs")) config.bpm.max_epochs = b.at("max_epochs").get<int>();
        if (b.contains("patience")) config.bpm.patience = b.at("patience").get<int>();
        if (b.contains("gl_threshold")) config.bpm.gl_threshold = b.at("gl_threshold").get<double>();
    }
    if (j.contains("lm")) {
        const auto& l = j.at("lm");
        if (l.contains("mu0")) config.lm.mu0 = l.at("mu0").get<double>();
        if (l.contains("mu_up")) config.lm.mu_up = l.at("mu_up").get<double>();
        if (l.contains("mu_down")) config.lm.mu_down = l.at("mu_down").get<double>();
        if (l.contains("mu_max")) config.lm.mu_max = l.at("mu_max").get<double>();
        if (l.contains("max_epochs")) config.lm.max_epochs = l.at("max_epochs").get<int>();
        if (l.contains("patience")) config.lm.patience = l.at("patience").get<int>();
        if (l.contains("gl_threshold")) config.lm.gl_threshold = l.at("gl_threshold").get<double>();
    }
    if (j.contains("sa_gl_threshold")) config.sa_gl_threshold = j.at("sa_gl_threshold").get<double>();
    if (j.contains("seed")) config.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
    return config;
}

RunReport run_pipeline(const ExperimentConfig& config_in) {
    ExperimentConfig config = config_in;
    config.validate();

    const auto t0 = std::chrono::steady_clock::now();

    Series series = load_csv(config.data_path);
    if (!config.dataset_name.empty()) {
        series.name = config.dataset_name;
    }
    if (config.transform_log) {
        series = apply_log(series);
    }

    int lags = config.lags;
    if (config.auto_lags) {
        if (series.values.size() <= static_cast<std::size_t>(config.test_len)) {
            throw DataError("series shorter than the test horizon");
        }
        const std::span<const double> pre_test(series.values.data(),
                                               series.values.size() -
                                                   static_cast<std::size_t>(config.test_len));
        lags = select_lags(pre_test, config.max_auto_lags);
    }

    PrepareConfig prep_config;
    prep_config.lags = lags;
    prep_config.test_len = config.test_len;
    prep_config.val_fraction = config.val_fraction;
    prep_config.log_transform = false; // already applied above
    const PreparedData prepared = prepare(series, prep_config);
    const Supervised fit_window = concat(prepared.train, prepared.val);

    Topology topology;
    topology.inputs = lags;
    topology.hidden = config.hidden;
    const ActivationSpec act_spec = make_activation_spec(config);
    const std::size_t dimension = param_count(topology, act_spec);

    SearchSpace space;
    space.dimension = dimension;
    if (act_spec.lambda_is_free()) {
        space.lambda = LambdaSlot{dimension - 1, config.lambda_min, config.lambda_max};
    }

    const CostFn cost_fn = [&](std::span<const double> v) {
        return cost(unflatten(topology, act_spec, v), prepared.train);
    };

    RunReport report;
    report.dataset = series.name;
    report.variant = config.variant_name();
    report.master_seed = config.master_seed;
    report.resolved_lags = lags;
    report.config = config;

    for (int r = 0; r < config.restarts; ++r) {
        RestartResult row;
        row.restart = r;
        row.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(r));
        try {
            Rng init_rng(row.seed);
            const MlpParams initial = init_params(topology, act_spec, init_rng);
            Solution init_solution{flatten(initial), 0.0};

            Solution best_solution;
            best_solution.cost = std::numeric_limits<double>::infinity();
            for (int chain = 0; chain < config.inner_runs; ++chain) {
                SaTsConfig sats = config.sats;
                sats.seed = derive_seed(row.seed, 1000 + static_cast<std::uint64_t>(chain));

                std::vector<double> val_trace;
                StopFn stop;
                if (!prepared.val.empty()) {
                    stop = [&](const Solution& best) {
                        const MlpParams p = unflatten(topology, act_spec, best.vector);
                        val_trace.push_back(cost(p, prepared.val));
                        return gl5(val_trace, config.sa_gl_threshold);
                    };
                }
                const OptimizeResult chain_result =
                    optimize(cost_fn, init_solution, sats, space, stop);
                row.inner_costs.push_back(chain_result.best.cost);
                if (chain_result.best.cost < best_solution.cost) {
                    best_solution = chain_result.best;
                }
            }
            row.sats_cost = best_solution.cost;

            MlpParams final_params = unflatten(topology, act_spec, best_solution.vector);
            if (config.pipeline == Pipeline::SatsBpm) {
                const TrainReport tr = bpm_train(final_params, prepared, config.bpm);
                final_params = tr.params;
                row.local_epochs = tr.epochs_run;
                row.local_stop_reason = stop_reason_name(tr.stop_reason);
            } else if (config.pipeline == Pipeline::SatsLm) {
                const TrainReport tr = lm_train(final_params, prepared, config.lm);
                final_params = tr.params;
                row.local_epochs = tr.epochs_run;
                row.local_stop_reason = stop_reason_name(tr.stop_reason);
            }

            if (act_spec.lambda_is_free()) {
                row.lambda = final_params.activation.lambda;
            }
            row.val_cost = prepared.val.empty() ? cost(final_params, prepared.train)
                                                : cost(final_params, prepared.val);
            row.train = descaled_metrics(final_params, fit_window, prepared.scale);
            row.test = descaled_metrics(final_params, prepared.test, prepared.scale);
            row.final_params = flatten(final_params);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
            ++report.failures;
        }
        report.restarts.push_back(std::move(row));
    }

    std::vector<Metrics> train_rows, test_rows;
    std::vector<double> lambdas;
    for (const RestartResult& row : report.restarts) {
        if (row.failed) continue;
        train_rows.push_back(row.train);
        test_rows.push_back(row.test);
        if (row.lambda) lambdas.push_back(*row.lambda);
    }
    if (train_rows.empty()) {
        throw NumericError("run_pipeline: every restart failed (first error: " +
                           report.restarts.front().error + ")");
    }
    report.train_agg = aggregate(train_rows);
    report.test_agg = aggregate(test_rows);
    if (!lambdas.empty()) {
        report.lambda_mean = sample_mean(lambdas);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string report_to_json(const RunReport& report) {
    ordered_json j;
    j["format"] = kReportFormat;
    j["dataset"] = report.dataset;
    j["variant"] = report.variant;
    j["master_seed"] = report.master_seed;
    j["resolved_lags"] = report.resolved_lags;
    j["config"] = ordered_json::parse(config_to_json(report.config));
    ordered_json rows = ordered_json::array();
    for (const RestartResult& row : report.restarts) {
        ordered_json r;
        r["restart"] = row.restart;
        r["seed"] = row.seed;
        r["failed"] = row.failed;
        if (row.failed) {
            r["error"] = row.error;
        } else {
            r["inner_costs"] = row.inner_costs;
            r["sats_cost"] = row.sats_cost;
            if (row.lambda) {
                r["lambda"] = *row.lambda;
            }
            if (!row.local_stop_reason.empty()) {
                r["local_epochs"] = row.local_epochs;
                r["local_stop_reason"] = row.local_stop_reason;
            }
            r["val_cost"] = row.val_cost;
            r["train"] = metrics_to_json(row.train);
            r["test"] = metrics_to_json(row.test);
        }
        rows.push_back(std::move(r));
    }
    j["restarts"] = std::move(rows);
    j["aggregate"] = {{"train", aggregate_to_json(report.train_agg)},
                      {"test", aggregate_to_json(report.test_agg)}};
    if (report.lambda_mean) {
        j["lambda_mean"] = *report.lambda_mean;
    }
    j["failures"] = report.failures;
    return j.dump(2) + "\n";
}

std::vector<double> report_metric_samples(const std::string& report_json,
                                          const std::string& split,
                                          const std::string& metric) {
    ordered_json j;
    try {
        j = ordered_json::parse(report_json);
    } catch (const ordered_json::parse_error& e) {
        throw DataError(std::string("report JSON parse error: ") + e.what());
    }
    if (!j.contains("restarts")) {
        throw DataError("not a run report (missing 'restarts')");
    }
    std::vector<double> samples;
    for (const auto& row : j.at("restarts")) {
        if (row.at("failed").get<bool>()) continue;
        const auto& m = row.at(split);
        if (!m.contains(metric) || m.at(metric).is_null()) continue;
        samples.push_back(m.at(metric).get<double>());
    }
    return samples;
}

BenchResult bench(const ExperimentConfig& base, std::span<const BenchVariant> variants) {
    if (variants.size() < 2) {
        throw std::invalid_argument("bench needs at least two variants");
    }
    BenchResult result;
    for (const BenchVariant& variant : variants) {
        ExperimentConfig config = base;
        config.pipeline = variant.pipeline;
        config.activation = variant.activation;
        // Seed stream keyed by the variant name: distinct variants get
        // independent samples, repeated variants reproduce each other.
        config.master_seed = derive_seed(base.master_seed, fnv1a(config.variant_name()));
        result.reports.push_back(run_pipeline(config));
    }

    const std::array<const char*, 2> splits{"train", "test"};
    const std::array<const char*, 4> metric_names{"sse", "mse", "mae", "mape"};
    auto samples_of = [](const RunReport& report, const std::string& split,
                         const std::string& metric) {
        std::vector<double> xs;
        for (const RestartResult& row : report.restarts) {
            if (row.failed) continue;
            const Metrics& m = split == "train" ? row.train : row.test;
            if (metric == "sse") xs.push_back(m.sse);
            else if (metric == "mse") xs.push_back(m.mse);
            else if (metric == "mae") xs.push_back(m.mae);
            else if (m.mape) xs.push_back(*m.mape);
        }
        return xs;
    };

    for (std::size_t a = 0; a < result.reports.size(); ++a) {
        for (std::size_t b = a + 1; b < result.reports.size(); ++b) {
            for (const char* split : splits) {
                for (const char* metric : metric_names) {
                    const auto xs = samples_of(result.reports[a], split, metric);
                    const auto ys = samples_of(result.reports[b], split, metric);
                    if (xs.size() < 2 || ys.size() < 2) continue; // mape absent or 1 restart
                    PairwiseComparison cmp;
                    cmp.variant_a = result.reports[a].variant;
                    cmp.variant_b = result.reports[b].variant;
                    cmp.split = split;
                    cmp.metric = metric;
                    cmp.ttest = t_test(xs, ys);
                    result.pairwise.push_back(std::move(cmp));
                }
            }
        }
    }
    return result;
}

std::string bench_to_json(const BenchResult& result) {
    ordered_json j;
    j["format"] = kBenchFormat;
    ordered_json reports = ordered_json::array();
    for (const RunReport& report : result.reports) {
        reports.push_back(ordered_json::parse(report_to_json(report)));
    }
    j["reports"] = std::move(reports);
    ordered_json pairwise = ordered_json::array();
    for (const PairwiseComparison& cmp : result.pairwise) {
        pairwise.push_back(ordered_json{{"variant_a", cmp.variant_a},
                                        {"variant_b", cmp.variant_b},
                                        {"split", cmp.split},
                                        {"metric", cmp.metric},
                                        {"t_stat", cmp.ttest.t_stat},
                                        {"df", cmp.ttest.df},
                                        {"p_value", cmp.ttest.p_value},
                                        {"significant_at_5pct", cmp.ttest.significant_at_5pct}});
    }
    j["pairwise"] = std::move(pairwise);
    return j.dump(2) + "\n";
}

void write_summary_csv(const BenchResult& result, const std::string& split, std::ostream& out) {
    out << "variant,sse_avg,sse_sd,mse_avg,mse_sd,mae_avg,mae_sd,mape_avg,mape_sd\n";
    auto cell = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << buf;
    };
    for (const RunReport& report : result.reports) {
        const MetricsAggregate& agg = split == "train" ? report.train_agg : report.test_agg;
        out << report.variant << ',';
        cell(agg.mean.sse);
        out << ',';
        if (agg.sd) cell(agg.sd->sse);
        out << ',';
        cell(agg.mean.mse);
        out << ',';
        if (agg.sd) cell(agg.sd->mse);
        out << ',';
        cell(agg.mean.mae);
        out << ',';
        if (agg.sd) cell(agg.sd->mae);
        out << ',';
        if (agg.mean.mape) cell(*agg.mean.mape);
        out << ',';
        if (agg.sd && agg.sd->mape) cell(*agg.sd->mape);
        out << '\n';
    }
}

void write_pvalues_csv(const BenchResult& result, const std::string& metric,
                       const std::string& split, std::ostream& out) {
    out << "variant_a,variant_b,t_stat,df,p_value,significant_at_5pct\n";
    auto cell = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << buf;
    };
    for (const PairwiseComparison& cmp : result.pairwise) {
        if (cmp.metric != metric || cmp.split != split) continue;
        out << cmp.variant_a << ',' << cmp.variant_b << ',';
        cell(cmp.ttest.t_stat);
        out << ',';
        cell(cmp.ttest.df);
        out << ',';
        cell(cmp.ttest.p_value);
        out << ',' << (cmp.ttest.significant_at_5pct ? 1 : 0) << '\n';
    }
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    ordered_json j;
    j["format"] = kModelFormat;
    j["dataset"] = model.dataset;
    j["transform_log"] = model.transform_log;
    j["lags"] = model.lags;
    j["test_len"] = model.test_len;
    j["scale"] = scale_to_json(model.scale);
    j["network"] = ordered_json::parse(params_to_json(model.params));
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write model file '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open model file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(buffer.str());
    } catch (const ordered_json::parse_error& e) {
        throw DataError("model file '" + path.string() + "': " + e.what());
    }
    if (!j.contains("format") || j.at("format").get<std::string>() != kModelFormat) {
        throw DataError("model file '" + path.string() + "' has an unexpected schema");
    }
    ModelFile model;
    try {
        model.dataset = j.at("dataset").get<std::string>();
        model.transform_log = j.at("transform_log").get<bool>();
        model.lags = j.at("lags").get<int>();
        model.test_len = j.at("test_len").get<int>();
        model.scale = scale_from_json(j.at("scale"));
        model.params = params_from_json(j.at("network").dump());
    } catch (const ordered_json::exception& e) {
        throw DataError("model file '" + path.string() + "': " + e.what());
    }
    if (model.params.topology.inputs != model.lags) {
        throw DataError("model file '" + path.string() + "': lag count " +
                        std::to_string(model.lags) + " does not match network inputs " +
                        std::to_string(model.params.topology.inputs));
    }
    return model;
}

ModelFile select_model(const RunReport& report, const PreparedData& prepared) {
    const RestartResult* best = nullptr;
    for (const RestartResult& row : report.restarts) {
        if (row.failed) continue;
        if (best == nullptr || row.val_cost < best->val_cost) {
            best = &row;
        }
    }
    if (best == nullptr) {
        throw NumericError("select_model: no successful restart");
    }
    Topology topology;
    topology.inputs = prepared.lags;
    topology.hidden = report.config.hidden;
    const ActivationSpec spec = make_activation_spec(report.config);

    ModelFile model;
    model.dataset = report.dataset;
    model.transform_log = prepared.log_applied;
    model.lags = prepared.lags;
    model.test_len = prepared.test_len;
    model.scale = prepared.scale;
    model.params = unflatten(topology, spec, best->final_params);
    return model;
}

ForecastResult forecast(const ModelFile& model, const Series& raw_series, int horizon) {
    if (horizon < 0) {
        throw DataError("forecast: horizon must be >= 0");
    }
    Series series = raw_series;
    if (model.transform_log && !series.transform_log) {
        series = apply_log(series);
    }
    const std::size_t p = static_cast<std::size_t>(model.lags);
    const std::size_t h = static_cast<std::size_t>(horizon);
    if (series.values.size() < h + p) {
        throw DataError("forecast: series of length " + std::to_string(series.values.size()) +
                        " cannot supply " + std::to_string(p) + " lags for " +
                        std::to_string(horizon) + " forecasts");
    }

    ForecastResult result;
    result.log_applied = model.transform_log;
    std::vector<double> window(p);
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t target = series.values.size() - h + i;
        for (std::size_t j = 0; j < p; ++j) {
            window[j] = model.scale.apply(series.values[target - p + j]);
        }
        const double scaled_pred = forward(model.params, window).output;
        result.indices.push_back(target);
        result.targets.push_back(series.values[target]);
        result.predictions.push_back(model.scale.invert(scaled_pred));
    }
    return result;
}

void write_forecast_csv(const ForecastResult& result, std::ostream& out) {
    auto cell = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    if (result.log_applied) {
        out << "index,target,prediction,target_raw,prediction_raw\n";
    } else {
        out << "index,target,prediction\n";
    }
    for (std::size_t i = 0; i < result.indices.size(); ++i) {
        out << result.indices[i] << ',';
        cell(result.targets[i]);
        out << ',';
        cell(result.predictions[i]);
        if (result.log_applied) {
            out << ',';
            cell(std::exp(result.targets[i]));
            out << ',';
            cell(std::exp(result.predictions[i]));
        }
        out << '\n';
    }
}

} // namespace satsnet
