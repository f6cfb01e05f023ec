#pragma once

#include "gpexperts/data_io.hpp"
#include "gpexperts/gp.hpp"
#include "gpexperts/partition.hpp"

#include <vector>

namespace gpexperts {

struct ExpertEnsemble {
    std::vector<GPModel> experts;
    SchemeConfig scheme_config;
    bool shared_hypers = false;

    int n_experts() const { return static_cast<int>(experts.size()); }
};

// Build the expert collection for a scheme. DS and SoD-Shared-Hyp learn one
// set of hyperparameters on a random subset and copy it to every expert;
// the other schemes optimize each expert independently. Experts whose
// optimization fails after all restarts are refitted with data-scaled default
// hyperparameters rather than dropped. Training is parallel across experts;
// results do not depend on the schedule.
ExpertEnsemble train_ensemble(const Dataset& dataset, const SchemeConfig& config,
                              const KernelSpec& kernel_default,
                              const OptConfig& opt = {}, int n_threads = 1);

// The map phase: grid[j][i] is expert i's Gaussian at test row j.
std::vector<std::vector<ExpertPrediction>> expert_predictions(
    const ExpertEnsemble& ensemble, const Matrix& Xstar, int n_threads = 1);

}  // namespace gpexperts
