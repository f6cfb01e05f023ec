#pragma once

#include "gpexperts/gp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gpexperts {

enum class CombineRule { BCM, rBCM, gPoE, dLOP };

CombineRule parse_rule(const std::string& name);  // "bcm", "rbcm", "gpoe", "dlop"
std::string to_string(CombineRule rule);

// Per-expert reliability weights at one test point; normalized to the simplex.
struct WeightVector {
    Vector alphas;

    int size() const { return static_cast<int>(alphas.size()); }
    void validate() const;  // nonnegative, sums to 1 within 1e-9
};

struct CombinedPrediction {
    double mean = 0.0;
    double variance = 0.0;
    CombineRule rule = CombineRule::gPoE;
    std::optional<WeightVector> weights;  // absent for BCM
};

// Pairwise symmetric KL divergences between expert predictive Gaussians.
struct KLMatrix {
    Matrix Q;  // symmetric, zero diagonal, nonnegative
};

// KL(N(mean_p, var_p) || N(mean_q, var_q)).
double gaussian_kl(double mean_p, double var_p, double mean_q, double var_q);

// Normalized entropy-change weights: raw dH_i = (log prior_var_i - log var_i)/2,
// alphas = dH / sum(dH); uniform 1/K when no expert was informed by data.
WeightVector entropy_change_weights(const std::vector<ExpertPrediction>& preds);

CombinedPrediction combine_gpoe(const std::vector<ExpertPrediction>& preds,
                                const WeightVector& weights);

// prior_precision is 1/prior variance of the common prior (or the averaged
// prior, see average_prior_precision). Throws NumericalError when the combined
// precision is nonpositive; callers decide how to fall back.
CombinedPrediction combine_bcm(const std::vector<ExpertPrediction>& preds,
                               double prior_precision);

CombinedPrediction combine_rbcm(const std::vector<ExpertPrediction>& preds,
                                double prior_precision);

KLMatrix sym_kl_matrix(const std::vector<ExpertPrediction>& preds);

// One (or `steps`) normalized gradient ascent step(s) on C = alpha Q alpha^T / 4,
// renormalized back to the simplex after each step. Returns the input weights
// when the gradient vanishes.
WeightVector dlop_weights(const KLMatrix& kl, const WeightVector& gpoe_weights,
                          double lambda = 1.0, int steps = 1);
WeightVector dlop_weights(const std::vector<ExpertPrediction>& preds,
                          const WeightVector& gpoe_weights, double lambda = 1.0,
                          int steps = 1);

// entropy_change_weights -> dlop_weights -> combine_gpoe, tagged dLOP.
CombinedPrediction combine_dlop(const std::vector<ExpertPrediction>& preds,
                                double lambda = 1.0, int steps = 1);

// 1 / mean(prior_variance_i): the prior precision BCM/rBCM use when experts do
// not share a prior.
double average_prior_precision(const std::vector<ExpertPrediction>& preds);

}  // namespace gpexperts
