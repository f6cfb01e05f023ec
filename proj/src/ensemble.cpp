#include "gpexperts/ensemble.hpp"

#include "gpexperts/parallel.hpp"
#include "gpexperts/rng.hpp"

#include <algorithm>
#include <sstream>

namespace gpexperts {

namespace {

Matrix gather_rows(const Matrix& X, const IndexSet& idx) {
    Matrix out(static_cast<int>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<int>(i)) = X.row(idx[i]);
    return out;
}

Vector gather(const Vector& y, const IndexSet& idx) {
    Vector out(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<int>(i)) = y(idx[i]);
    return out;
}

// Optimize on the subset; fall back to the data-scaled default when every
// restart fails, so the expert count stays fixed.
GPModel fit_expert(const Matrix& Xs, const Vector& ys, const KernelSpec& spec,
                   const OptConfig& opt, int expert_idx) {
    HyperParams init = default_init(Xs, ys, spec);
    try {
        HyperParams tuned = optimize_hypers(Xs, ys, spec, init, opt);
        return fit(Xs, ys, spec, tuned);
    } catch (const NumericalError&) {
        try {
            return fit(Xs, ys, spec, init);
        } catch (const NumericalError& err) {
            std::ostringstream msg;
            msg << "train_ensemble: expert " << expert_idx << " failed: " << err.what();
            throw NumericalError(msg.str());
        }
    }
}

}  // namespace

ExpertEnsemble train_ensemble(const Dataset& dataset, const SchemeConfig& config,
                              const KernelSpec& kernel_default, const OptConfig& opt,
                              int n_threads) {
    config.validate();
    kernel_default.validate();
    const int n = dataset.n();
    if (config.scheme != Scheme::DS && n < config.subset_size) {
        throw InputError("train_ensemble: dataset smaller than subset_size");
    }

    // expert subsets per scheme
    std::vector<IndexSet> subsets;
    std::vector<KernelSpec> specs;
    switch (config.scheme) {
        case Scheme::DS:
            subsets = partition_disjoint(n, config.subset_size, config.seed);
            break;
        case Scheme::SoDSharedHyp:
        case Scheme::SoD:
            subsets = sample_subsets(n, config.n_experts, config.subset_size, config.seed);
            break;
        case Scheme::Tree:
        case Scheme::TreeRandKern: {
            BallTree tree = build_ball_tree(dataset.X, 2 * config.subset_size, config.seed);
            subsets = tree_expert_subsets(tree, config.n_experts, config.subset_size,
                                          config.seed);
            break;
        }
    }
    const int n_experts = static_cast<int>(subsets.size());
    specs.assign(n_experts, kernel_default);
    if (config.scheme == Scheme::TreeRandKern) {
        specs = assign_random_kernels(n_experts, dataset.dim(), config.seed);
    }

    ExpertEnsemble ensemble;
    ensemble.scheme_config = config;
    ensemble.shared_hypers =
        config.scheme == Scheme::DS || config.scheme == Scheme::SoDSharedHyp;
    ensemble.experts.resize(n_experts);

    if (ensemble.shared_hypers) {
        // learn once on a random subset, copy everywhere
        Rng rng(mix_seed(config.seed, 0x68797065ULL));
        int take = std::min(config.subset_size, n);
        IndexSet hyper_subset = rng.sample_without_replacement(n, take);
        Matrix Xh = gather_rows(dataset.X, hyper_subset);
        Vector yh = gather(dataset.y, hyper_subset);

        OptConfig hyper_opt = opt;
        hyper_opt.seed = mix_seed(config.seed, 0x6f707453ULL);
        HyperParams init = default_init(Xh, yh, kernel_default);
        HyperParams shared;
        try {
            shared = optimize_hypers(Xh, yh, kernel_default, init, hyper_opt);
        } catch (const NumericalError&) {
            shared = init;
        }

        parallel_for(n_experts, n_threads, [&](int e) {
            ensemble.experts[e] = fit(gather_rows(dataset.X, subsets[e]),
                                      gather(dataset.y, subsets[e]),
                                      kernel_default, shared);
        });
    } else {
        parallel_for(n_experts, n_threads, [&](int e) {
            OptConfig expert_opt = opt;
            expert_opt.seed = mix_seed(config.seed, 0x10000ULL + e);
            ensemble.experts[e] = fit_expert(gather_rows(dataset.X, subsets[e]),
                                             gather(dataset.y, subsets[e]),
                                             specs[e], expert_opt, e);
        });
    }
    return ensemble;
}

std::vector<std::vector<ExpertPrediction>> expert_predictions(
    const ExpertEnsemble& ensemble, const Matrix& Xstar, int n_threads) {
    if (ensemble.experts.empty()) throw InputError("expert_predictions: empty ensemble");
    if (Xstar.cols() != ensemble.experts.front().input_dim()) {
        throw InputError("expert_predictions: test dimension mismatch");
    }
    const int m = static_cast<int>(Xstar.rows());
    const int k = ensemble.n_experts();

    std::vector<std::vector<ExpertPrediction>> grid(m);
    for (auto& row : grid) row.resize(k);

    parallel_for(k, n_threads, [&](int e) {
        std::vector<ExpertPrediction> col = predict(ensemble.experts[e], Xstar);
        for (int j = 0; j < m; ++j) grid[j][e] = col[j];
    });
    return grid;
}

}  // namespace gpexperts
