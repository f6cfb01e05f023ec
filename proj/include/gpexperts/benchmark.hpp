#pragma once

#include "gpexperts/ensemble.hpp"
#include "gpexperts/metrics.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gpexperts {

// Generate data instead of loading it from disk.
struct SyntheticSpec {
    int n_train = 2000;
    int n_test = 500;
    int d = 2;
    bool heteroscedastic = false;
    std::string kernel = "seard";
    double lengthscale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.1;
};

struct RunConfig {
    std::string train_path;
    std::string test_path;
    std::optional<SyntheticSpec> synthetic;

    Scheme scheme = Scheme::SoD;
    std::vector<CombineRule> rules = {CombineRule::gPoE, CombineRule::dLOP};
    int n_experts = 128;
    int subset_size = 512;
    std::uint64_t seed = 0;
    double lambda = 1.0;
    int dlop_steps = 1;
    std::string kernel_default = "seard";
    int threads = 0;  // 0 = all hardware threads
    std::string output_path;

    void validate() const;
};

struct RuleResult {
    MetricsReport metrics;
    double map_s = 0.0;     // shared expert-prediction time
    double reduce_s = 0.0;  // this rule's combination time
    int prediction_failures = 0;  // BCM/rBCM nonpositive-precision fallbacks
};

struct BenchmarkReport {
    RunConfig config;
    int n_train = 0;
    int n_test = 0;
    int input_dim = 0;
    std::vector<RuleResult> results;
};

// Train once, share the map phase across all requested rules, score each rule.
// Writes the JSON report to config.output_path when set.
BenchmarkReport run_benchmark(const RunConfig& config);

struct RuleAggregate {
    CombineRule rule = CombineRule::gPoE;
    double snlp_mean = 0.0, snlp_std = 0.0;
    double smse_mean = 0.0, smse_std = 0.0;
    double train_s_mean = 0.0, predict_s_mean = 0.0;
    int prediction_failures_total = 0;
};

struct AggregateReport {
    RunConfig config;
    int n_seeds = 0;
    std::vector<std::uint64_t> seeds_ok;
    std::vector<std::uint64_t> seeds_failed;
    std::vector<BenchmarkReport> per_seed;
    std::vector<RuleAggregate> aggregate;  // mean +/- sample std over seeds_ok
};

// run_benchmark across seeds seed..seed+n_seeds-1; failed seeds are recorded
// and excluded from the aggregate.
AggregateReport run_repeated(const RunConfig& config, int n_seeds);

nlohmann::json to_json(const BenchmarkReport& report);
nlohmann::json to_json(const AggregateReport& report);
void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace gpexperts
