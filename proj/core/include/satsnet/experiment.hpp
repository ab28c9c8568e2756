#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "satsnet/dataprep.hpp"
#include "satsnet/global_opt.hpp"
#include "satsnet/local_opt.hpp"
#include "satsnet/metrics.hpp"
#include "satsnet/network.hpp"

namespace satsnet {

/// Global search alone, or followed by the chosen local refiner with
/// lambda held fixed.
enum class Pipeline { Sats, SatsBpm, SatsLm };

std::string pipeline_name(Pipeline pipeline);           // sats / sats-bpm / sats-lm
Pipeline pipeline_from_name(const std::string& name);
std::string activation_cli_name(ActivationKind kind);   // aranda / logit / cloglog
ActivationKind activation_from_cli_name(const std::string& name);

/// One full experiment: dataset, preprocessing, topology, search variant,
/// restart protocol, and stage hyperparameters. Defaults are desk scale
/// (10 restarts, 3 inner chains, 1000 iterations); apply_paper_scale()
/// switches to the documented 100 / 10 / 10000.
struct ExperimentConfig {
    std::filesystem::path data_path;
    std::string dataset_name; // defaults to the file stem
    bool transform_log = false;
    int lags = 0;        // ignored when auto_lags is set
    bool auto_lags = true;
    int max_auto_lags = 12;
    int hidden = 2;
    ActivationKind activation = ActivationKind::ArandaFree;
    double lambda_min = 1e-3;
    double lambda_max = 10.0;
    Pipeline pipeline = Pipeline::SatsLm;
    int restarts = 10;
    int inner_runs = 3;
    int test_len = 12;
    double val_fraction = 0.2;
    SaTsConfig sats = desk_sats();
    BpmConfig bpm;
    LmConfig lm;
    double sa_gl_threshold = 5.0; // validation growth rule inside the SA stage
    std::uint64_t master_seed = 1;
    std::filesystem::path out_dir = "out";

    static SaTsConfig desk_sats() {
        SaTsConfig sats;
        sats.max_iters = 1000;
        return sats;
    }

    void apply_paper_scale();
    void validate() const;
    std::string variant_name() const; // e.g. "sats-lm_aranda"
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

struct RestartResult {
    int restart = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<double> inner_costs; // best cost of each inner SA+TS chain
    double sats_cost = 0.0;          // best-of-inner-chains training cost
    std::optional<double> lambda;    // present for the free-lambda family
    int local_epochs = 0;
    std::string local_stop_reason;   // empty for the pure SATS pipeline
    double val_cost = 0.0;           // final params on the validation set
    Metrics train;                   // fit window, original scale
    Metrics test;
    std::vector<double> final_params; // kept in memory for model selection
};

struct RunReport {
    std::string dataset;
    std::string variant;
    std::uint64_t master_seed = 0;
    int resolved_lags = 0;
    ExperimentConfig config;
    std::vector<RestartResult> restarts;
    MetricsAggregate train_agg;
    MetricsAggregate test_agg;
    std::optional<double> lambda_mean;
    int failures = 0;
    double wall_seconds = 0.0; // console diagnostics only, never serialized
};

/// Runs the multi-restart protocol: per restart, U(0,1) initialization,
/// inner SA+TS chains from that same initialization (best one carried
/// forward), optional local refinement with lambda frozen, one-step-ahead
/// evaluation, inverse-scaled metrics. Failed restarts are recorded and
/// skipped by the aggregates.
RunReport run_pipeline(const ExperimentConfig& config);

/// Canonical JSON (stable key order, no timing), byte-identical for
/// identical config + master seed.
std::string report_to_json(const RunReport& report);

/// Pulls the per-restart samples of one metric out of a report JSON.
/// split is "train" or "test"; metric is sse/mse/mae/mape.
std::vector<double> report_metric_samples(const std::string& report_json,
                                          const std::string& split, const std::string& metric);

struct BenchVariant {
    Pipeline pipeline;
    ActivationKind activation;
};

struct PairwiseComparison {
    std::string variant_a;
    std::string variant_b;
    std::string split;  // train / test
    std::string metric; // sse / mse / mae / mape
    TTestResult ttest;
};

struct BenchResult {
    std::vector<RunReport> reports;
    std::vector<PairwiseComparison> pairwise;
};

/// Runs every variant (each on its own seed stream derived from the master
/// seed and the variant name, so repeated variants reproduce each other
/// exactly) and computes all pairwise two-sample t-tests per metric and
/// split. Needs at least two variants.
BenchResult bench(const ExperimentConfig& base, std::span<const BenchVariant> variants);

std::string bench_to_json(const BenchResult& result);
void write_summary_csv(const BenchResult& result, const std::string& split, std::ostream& out);
void write_pvalues_csv(const BenchResult& result, const std::string& metric,
                       const std::string& split, std::ostream& out);

/// Everything needed to forecast with a fitted network later: the
/// preprocessing recipe plus the parameters.
struct ModelFile {
    std::string dataset;
    bool transform_log = false;
    int lags = 0;
    int test_len = 12;
    ScaleInfo scale;
    MlpParams params;
};

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Picks the restart whose parameters forecast best without looking at the
/// test set: lowest validation cost, falling back to training cost when
/// there is no validation split.
ModelFile select_model(const RunReport& report, const PreparedData& prepared);

struct ForecastResult {
    std::vector<std::size_t> indices; // positions in the input series
    std::vector<double> targets;      // model space (log kept when applied)
    std::vector<double> predictions;
    bool log_applied = false;
};

/// One-step-ahead predictions for the last `horizon` observations of a raw
/// series, using the model's stored preprocessing. Throws DataError on a
/// lag/schema mismatch or insufficient history.
ForecastResult forecast(const ModelFile& model, const Series& raw_series, int horizon);

/// index,target,prediction (plus raw-scale columns when a log transform
/// was active).
void write_forecast_csv(const ForecastResult& result, std::ostream& out);

} // namespace satsnet
