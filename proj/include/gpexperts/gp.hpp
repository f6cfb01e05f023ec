#pragma once

#include "gpexperts/kernel.hpp"

#include <cstdint>
#include <vector>

namespace gpexperts {

// Per-expert Gaussian at one test point. Both variances include observation
// noise, so the entropy change is exactly zero where data had no influence.
struct ExpertPrediction {
    double mean = 0.0;
    double variance = 0.0;        // posterior variance of y*
    double prior_variance = 0.0;  // k(x*, x*) + sigma_n^2
};

// One exact-GP expert. Immutable after fit(); safe to share across threads.
struct GPModel {
    Matrix X;
    Vector y;
    KernelSpec spec;
    HyperParams params;
    Matrix chol;       // lower-triangular factor of K + sigma_n^2 I (+ jitter)
    Vector solve_vec;  // (K + sigma_n^2 I)^-1 y
    double jitter = 0.0;

    int n() const { return static_cast<int>(X.rows()); }
    int input_dim() const { return static_cast<int>(X.cols()); }
};

GPModel fit(const Matrix& X, const Vector& y, const KernelSpec& spec,
            const HyperParams& params);

std::vector<ExpertPrediction> predict(const GPModel& model, const Matrix& Xstar);

double log_marginal_likelihood(const GPModel& model);

// d LML / d theta over all packed log hyperparameters (pack() order).
Vector lml_grad(const GPModel& model);

struct OptConfig {
    int max_iters = 200;
    double grad_tol = 1e-5;  // infinity norm of the LML gradient
    int restarts = 2;        // random restarts in addition to the given init
    std::uint64_t seed = 0;
};

// Maximize the LML starting from init. Returns the best parameters found
// across init and all restarts; never worse than init.
HyperParams optimize_hypers(const Matrix& X, const Vector& y, const KernelSpec& spec,
                            const HyperParams& init, const OptConfig& config = {});

// Data-scaled starting point: log ell_d = log std(X_d), log s2 = log var(y),
// log sigma_n^2 = log(0.1 var(y)).
HyperParams default_init(const Matrix& X, const Vector& y, const KernelSpec& spec);

}  // namespace gpexperts
