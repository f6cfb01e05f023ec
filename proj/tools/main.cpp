#include "gpexperts/benchmark.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<gpexperts::CombineRule> parse_rules(const std::string& csv) {
    std::vector<gpexperts::CombineRule> rules;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) rules.push_back(gpexperts::parse_rule(token));
    }
    if (rules.empty()) throw gpexperts::InputError("no combination rules given");
    return rules;
}

void print_results(const gpexperts::BenchmarkReport& report) {
    for (const auto& rr : report.results) {
        std::printf("%-5s  snlp=%+.4f  smse=%.4f  train=%.2fs  predict=%.2fs",
                    gpexperts::to_string(rr.metrics.rule).c_str(), rr.metrics.snlp,
                    rr.metrics.smse, rr.metrics.wall_times.train_s,
                    rr.metrics.wall_times.predict_s);
        if (rr.prediction_failures > 0) {
            std::printf("  [%d precision fallbacks]", rr.prediction_failures);
        }
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transductive combination of Gaussian process experts"};
    app.require_subcommand(1);

    // ---- benchmark ----
    auto* bench = app.add_subcommand("benchmark", "train experts, combine, score");
    bench->set_config("--config");

    std::string train_path, test_path, scheme = "sod", rules_csv = "gpoe,dlop";
    std::string kernel = "seard", out_path;
    int experts = 128, subset_size = 512, dlop_steps = 1, threads = 0, n_seeds = 1;
    std::uint64_t seed = 0;
    double lambda = 1.0;
    bool use_synth = false;
    gpexperts::SyntheticSpec synth;

    bench->add_option("--train", train_path, "training CSV (target = last column)");
    bench->add_option("--test", test_path, "test CSV");
    bench->add_option("--scheme", scheme,
                      "ds | sod-shared-hyp | sod | tree | tree-rand-kern");
    bench->add_option("--rules", rules_csv, "comma list of bcm,rbcm,gpoe,dlop");
    bench->add_option("--experts", experts, "number of experts");
    bench->add_option("--subset-size", subset_size, "points per expert");
    bench->add_option("--seed", seed, "base RNG seed");
    bench->add_option("--lambda", lambda, "dLOP gradient step size");
    bench->add_option("--dlop-steps", dlop_steps, "dLOP gradient step count");
    bench->add_option("--kernel", kernel, "default kernel, e.g. seard or seard+matern32");
    bench->add_option("--threads", threads, "worker threads (0 = all cores)");
    bench->add_option("--seeds", n_seeds, "repeat over this many consecutive seeds");
    bench->add_option("--out", out_path, "write JSON report here");
    bench->add_flag("--synthetic", use_synth, "generate data instead of loading");
    bench->add_option("--synth-n", synth.n_train, "synthetic training points");
    bench->add_option("--synth-test-n", synth.n_test, "synthetic test points");
    bench->add_option("--synth-d", synth.d, "synthetic input dimension");
    bench->add_flag("--synth-hetero", synth.heteroscedastic,
                    "heteroscedastic synthetic noise");
    bench->add_option("--synth-kernel", synth.kernel, "generating kernel");
    bench->add_option("--synth-lengthscale", synth.lengthscale, "generating lengthscale");
    bench->add_option("--synth-signal-var", synth.signal_variance,
                      "generating signal variance");
    bench->add_option("--synth-noise-var", synth.noise_variance,
                      "generating noise variance");

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic GP dataset as CSV");
    int s_n = 2000, s_test_n = 0, s_d = 2;
    bool s_hetero = false;
    std::uint64_t s_seed = 0;
    std::string s_out, s_test_out, s_kernel = "seard";
    double s_ell = 1.0, s_sv = 1.0, s_nv = 0.1;

    synth_cmd->add_option("--n", s_n, "number of points")->required();
    synth_cmd->add_option("--d", s_d, "input dimension");
    synth_cmd->add_flag("--hetero", s_hetero, "heteroscedastic noise");
    synth_cmd->add_option("--out", s_out, "output CSV path")->required();
    synth_cmd->add_option("--test-n", s_test_n,
                          "also draw this many test points from the same function");
    synth_cmd->add_option("--test-out", s_test_out, "test CSV path (with --test-n)");
    synth_cmd->add_option("--kernel", s_kernel, "generating kernel");
    synth_cmd->add_option("--lengthscale", s_ell, "lengthscale");
    synth_cmd->add_option("--signal-var", s_sv, "signal variance");
    synth_cmd->add_option("--noise-var", s_nv, "noise variance");
    synth_cmd->add_option("--seed", s_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            gpexperts::RunConfig config;
            config.train_path = train_path;
            config.test_path = test_path;
            if (use_synth) config.synthetic = synth;
            config.scheme = gpexperts::parse_scheme(scheme);
            config.rules = parse_rules(rules_csv);
            config.n_experts = experts;
            config.subset_size = subset_size;
            config.seed = seed;
            config.lambda = lambda;
            config.dlop_steps = dlop_steps;
            config.kernel_default = kernel;
            config.threads = threads;
            config.output_path = out_path;

            if (n_seeds > 1) {
                auto agg = gpexperts::run_repeated(config, n_seeds);
                for (const auto& ra : agg.aggregate) {
                    std::printf("%-5s  snlp=%+.4f +/- %.4f  smse=%.4f +/- %.4f\n",
                                gpexperts::to_string(ra.rule).c_str(), ra.snlp_mean,
                                ra.snlp_std, ra.smse_mean, ra.smse_std);
                }
                if (!agg.seeds_failed.empty()) {
                    std::fprintf(stderr, "warning: %zu seed(s) failed\n",
                                 agg.seeds_failed.size());
                }
            } else {
                print_results(gpexperts::run_benchmark(config));
            }
        } else if (synth_cmd->parsed()) {
            gpexperts::KernelSpec kspec = gpexperts::KernelSpec::parse(s_kernel, s_d);
            gpexperts::HyperParams params = gpexperts::HyperParams::zeros(kspec);
            params.log_lengthscales.setConstant(std::log(s_ell));
            params.log_signal_variance.setConstant(std::log(s_sv / kspec.n_members()));
            params.log_noise_variance = std::log(s_nv);

            if (s_test_n > 0 && s_test_out.empty()) {
                throw gpexperts::InputError("--test-n requires --test-out");
            }
            gpexperts::Dataset all = gpexperts::synthetic_gp_data(
                s_n + s_test_n, s_d, kspec, params, s_hetero, s_seed);
            if (s_test_n > 0) {
                auto [train, test] = gpexperts::split_dataset(all, s_n, s_seed);
                gpexperts::save_csv(train, s_out);
                gpexperts::save_csv(test, s_test_out);
            } else {
                gpexperts::save_csv(all, s_out);
            }
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
