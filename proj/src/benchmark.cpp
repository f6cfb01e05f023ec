#include "gpexperts/benchmark.hpp"

#include "gpexperts/parallel.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>

namespace gpexperts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

HyperParams synthetic_params(const SyntheticSpec& spec, const KernelSpec& kernel) {
    HyperParams p = HyperParams::zeros(kernel);
    p.log_lengthscales.setConstant(std::log(spec.lengthscale));
    p.log_signal_variance.setConstant(
        std::log(spec.signal_variance / kernel.n_members()));
    p.log_noise_variance = std::log(spec.noise_variance);
    return p;
}

// Combine one rule across all test points. BCM/rBCM nonpositive-precision
// points fall back to the (averaged) prior variance with the precision term
// clamped, and are counted instead of aborting the run.
std::vector<CombinedPrediction> reduce_rule(
    const std::vector<std::vector<ExpertPrediction>>& grid, CombineRule rule,
    double lambda, int dlop_steps, int n_threads, int* failures_out) {
    const int m = static_cast<int>(grid.size());
    std::vector<CombinedPrediction> out(m);
    std::atomic<int> failures{0};

    parallel_for(m, n_threads, [&](int j) {
        const auto& preds = grid[j];
        switch (rule) {
            case CombineRule::gPoE:
                out[j] = combine_gpoe(preds, entropy_change_weights(preds));
                break;
            case CombineRule::dLOP:
                out[j] = combine_dlop(preds, lambda, dlop_steps);
                break;
            case CombineRule::BCM:
            case CombineRule::rBCM: {
                double prior_precision = average_prior_precision(preds);
                try {
                    out[j] = rule == CombineRule::BCM
                                 ? combine_bcm(preds, prior_precision)
                                 : combine_rbcm(preds, prior_precision);
                } catch (const NumericalError&) {
                    failures.fetch_add(1, std::memory_order_relaxed);
                    CombinedPrediction fb;
                    fb.rule = rule;
                    fb.variance = 1.0 / prior_precision;
                    double weighted_mean = 0.0;
                    for (const auto& p : preds) {
                        double w = rule == CombineRule::BCM
                                       ? 1.0
                                       : std::max(0.0, 0.5 * (std::log(p.prior_variance) -
                                                              std::log(p.variance)));
                        weighted_mean += w * p.mean / p.variance;
                    }
                    fb.mean = weighted_mean * fb.variance;
                    out[j] = fb;
                }
                break;
            }
        }
    });
    if (failures_out) *failures_out = failures.load();
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (rules.empty()) throw InputError("RunConfig: rules must be nonempty");
    if (!synthetic && (train_path.empty() || test_path.empty())) {
        throw InputError("RunConfig: need train/test paths or a synthetic spec");
    }
    if (n_experts < 1) throw InputError("RunConfig: n_experts must be >= 1");
    if (subset_size < 2) throw InputError("RunConfig: subset_size must be >= 2");
    if (dlop_steps < 1) throw InputError("RunConfig: dlop_steps must be >= 1");
    parse_scheme(to_string(scheme));
    KernelSpec::parse(kernel_default, 1);
}

BenchmarkReport run_benchmark(const RunConfig& config) {
    config.validate();

    Dataset train_raw, test_raw;
    if (config.synthetic) {
        const SyntheticSpec& sp = *config.synthetic;
        KernelSpec gen_kernel = KernelSpec::parse(sp.kernel, sp.d);
        Dataset all = synthetic_gp_data(sp.n_train + sp.n_test, sp.d, gen_kernel,
                                        synthetic_params(sp, gen_kernel),
                                        sp.heteroscedastic, config.seed);
        std::tie(train_raw, test_raw) = split_dataset(all, sp.n_train, config.seed);
    } else {
        train_raw = load_csv(config.train_path);
        test_raw = load_csv(config.test_path);
    }
    auto [train, test] = standardize(train_raw, test_raw);

    // baseline moments in standardized space (0/1 up to rounding)
    const double y_mean = train.y.mean();
    const double y_var = (train.y.array() - y_mean).square().sum() / train.n();

    SchemeConfig scheme_config{config.scheme, config.subset_size, config.n_experts,
                               config.seed};
    KernelSpec kernel_default = KernelSpec::parse(config.kernel_default, train.dim());
    OptConfig opt;
    opt.seed = config.seed;

    BenchmarkReport report;
    report.config = config;
    report.n_train = train.n();
    report.n_test = test.n();
    report.input_dim = train.dim();

    auto t0 = Clock::now();
    ExpertEnsemble ensemble =
        train_ensemble(train, scheme_config, kernel_default, opt, config.threads);
    double train_s = seconds_since(t0);

    t0 = Clock::now();
    auto grid = expert_predictions(ensemble, test.X, config.threads);
    double map_s = seconds_since(t0);

    for (CombineRule rule : config.rules) {
        RuleResult rr;
        rr.map_s = map_s;

        t0 = Clock::now();
        auto combined = reduce_rule(grid, rule, config.lambda, config.dlop_steps,
                                    config.threads, &rr.prediction_failures);
        rr.reduce_s = seconds_since(t0);

        Vector means(test.n());
        for (int j = 0; j < test.n(); ++j) means(j) = combined[j].mean;

        rr.metrics.rule = rule;
        rr.metrics.scheme = config.scheme;
        rr.metrics.n_test = test.n();
        rr.metrics.snlp = snlp(combined, test.y, y_mean, y_var);
        rr.metrics.smse = smse(means, test.y, y_mean, y_var);
        rr.metrics.wall_times.train_s = train_s;
        rr.metrics.wall_times.predict_s = map_s + rr.reduce_s;
        report.results.push_back(std::move(rr));
    }

    if (!config.output_path.empty()) {
        write_json(to_json(report), config.output_path);
    }
    return report;
}

AggregateReport run_repeated(const RunConfig& config, int n_seeds) {
    if (n_seeds < 1) throw InputError("run_repeated: n_seeds must be >= 1");
    config.validate();

    AggregateReport agg;
    agg.config = config;
    agg.n_seeds = n_seeds;

    for (int s = 0; s < n_seeds; ++s) {
        RunConfig cfg = config;
        cfg.seed = config.seed + static_cast<std::uint64_t>(s);
        cfg.output_path.clear();  // only the aggregate document is persisted
        try {
            agg.per_seed.push_back(run_benchmark(cfg));
            agg.seeds_ok.push_back(cfg.seed);
        } catch (const std::exception&) {
            agg.seeds_failed.push_back(cfg.seed);
        }
    }

    const int ok = static_cast<int>(agg.seeds_ok.size());
    if (ok > 0) {
        for (std::size_t r = 0; r < config.rules.size(); ++r) {
            RuleAggregate ra;
            ra.rule = config.rules[r];
            Vector snlps(ok), smses(ok);
            for (int s = 0; s < ok; ++s) {
                const RuleResult& rr = agg.per_seed[s].results[r];
                snlps(s) = rr.metrics.snlp;
                smses(s) = rr.metrics.smse;
                ra.train_s_mean += rr.metrics.wall_times.train_s;
                ra.predict_s_mean += rr.metrics.wall_times.predict_s;
                ra.prediction_failures_total += rr.prediction_failures;
            }
            ra.train_s_mean /= ok;
            ra.predict_s_mean /= ok;
            ra.snlp_mean = snlps.mean();
            ra.smse_mean = smses.mean();
            if (ok > 1) {
                ra.snlp_std = std::sqrt((snlps.array() - ra.snlp_mean).square().sum() / (ok - 1));
                ra.smse_std = std::sqrt((smses.array() - ra.smse_mean).square().sum() / (ok - 1));
            }
            agg.aggregate.push_back(ra);
        }
    }

    if (!config.output_path.empty()) {
        write_json(to_json(agg), config.output_path);
    }
    return agg;
}

namespace {

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j{
        {"train", c.train_path},
        {"test", c.test_path},
        {"scheme", to_string(c.scheme)},
        {"experts", c.n_experts},
        {"subset_size", c.subset_size},
        {"seed", c.seed},
        {"lambda", c.lambda},
        {"dlop_steps", c.dlop_steps},
        {"kernel", c.kernel_default},
        {"threads", c.threads},
        {"out", c.output_path},
    };
    nlohmann::json rules = nlohmann::json::array();
    for (CombineRule r : c.rules) rules.push_back(to_string(r));
    j["rules"] = rules;
    if (c.synthetic) {
        const SyntheticSpec& sp = *c.synthetic;
        j["synthetic"] = {
            {"n_train", sp.n_train},         {"n_test", sp.n_test},
            {"d", sp.d},                     {"heteroscedastic", sp.heteroscedastic},
            {"kernel", sp.kernel},           {"lengthscale", sp.lengthscale},
            {"signal_variance", sp.signal_variance},
            {"noise_variance", sp.noise_variance},
        };
    }
    return j;
}

nlohmann::json result_to_json(const RuleResult& rr) {
    return {
        {"rule", to_string(rr.metrics.rule)},
        {"scheme", to_string(rr.metrics.scheme)},
        {"snlp", rr.metrics.snlp},
        {"smse", rr.metrics.smse},
        {"n_test", rr.metrics.n_test},
        {"train_s", rr.metrics.wall_times.train_s},
        {"predict_s", rr.metrics.wall_times.predict_s},
        {"map_s", rr.map_s},
        {"reduce_s", rr.reduce_s},
        {"prediction_failures", rr.prediction_failures},
    };
}

}  // namespace

nlohmann::json to_json(const BenchmarkReport& report) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& rr : report.results) results.push_back(result_to_json(rr));
    return {
        {"schema_version", 1},
        {"kind", "benchmark"},
        {"config", config_to_json(report.config)},
        {"dataset",
         {{"n_train", report.n_train},
          {"n_test", report.n_test},
          {"input_dim", report.input_dim}}},
        {"results", results},
    };
}

nlohmann::json to_json(const AggregateReport& report) {
    nlohmann::json aggregate = nlohmann::json::array();
    for (const auto& ra : report.aggregate) {
        aggregate.push_back({
            {"rule", to_string(ra.rule)},
            {"snlp_mean", ra.snlp_mean},
            {"snlp_std", ra.snlp_std},
            {"smse_mean", ra.smse_mean},
            {"smse_std", ra.smse_std},
            {"train_s_mean", ra.train_s_mean},
            {"predict_s_mean", ra.predict_s_mean},
            {"prediction_failures_total", ra.prediction_failures_total},
        });
    }
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& rep : report.per_seed) per_seed.push_back(to_json(rep));
    return {
        {"schema_version", 1},
        {"kind", "aggregate"},
        {"config", config_to_json(report.config)},
        {"n_seeds", report.n_seeds},
        {"seeds_ok", report.seeds_ok},
        {"seeds_failed", report.seeds_failed},
        {"aggregate", aggregate},
        {"per_seed", per_seed},
    };
}

void write_json(const nlohmann::json& doc, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("write_json: cannot open " + path + " for writing");
    f << doc.dump(2) << '\n';
    if (!f) throw InputError("write_json: write failed for " + path);
}

}  // namespace gpexperts
