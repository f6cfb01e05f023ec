#include "gpexperts/combine.hpp"

#include <cmath>

namespace gpexperts {

namespace {

void check_preds(const std::vector<ExpertPrediction>& preds, const char* what) {
    if (preds.empty()) throw InputError(std::string(what) + ": no expert predictions");
    for (const auto& p : preds) {
        if (!(p.variance > 0.0) || !(p.prior_variance > 0.0)) {
            throw InputError(std::string(what) + ": nonpositive expert variance");
        }
    }
}

// Unnormalized entropy change of each expert, floored at zero.
Vector entropy_changes(const std::vector<ExpertPrediction>& preds) {
    Vector dh(static_cast<int>(preds.size()));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double v = 0.5 * (std::log(preds[i].prior_variance) - std::log(preds[i].variance));
        dh(static_cast<int>(i)) = std::max(0.0, v);
    }
    return dh;
}

}  // namespace

CombineRule parse_rule(const std::string& name) {
    if (name == "bcm") return CombineRule::BCM;
    if (name == "rbcm") return CombineRule::rBCM;
    if (name == "gpoe") return CombineRule::gPoE;
    if (name == "dlop") return CombineRule::dLOP;
    throw InputError("parse_rule: unknown combination rule \"" + name + "\"");
}

std::string to_string(CombineRule rule) {
    switch (rule) {
        case CombineRule::BCM: return "bcm";
        case CombineRule::rBCM: return "rbcm";
        case CombineRule::gPoE: return "gpoe";
        case CombineRule::dLOP: return "dlop";
    }
    return "?";
}

void WeightVector::validate() const {
    if (alphas.size() < 1) throw InputError("WeightVector: empty");
    if ((alphas.array() < 0.0).any()) throw InputError("WeightVector: negative weight");
    if (std::abs(alphas.sum() - 1.0) > 1e-9) {
        throw InputError("WeightVector: weights do not sum to 1");
    }
}

double gaussian_kl(double mean_p, double var_p, double mean_q, double var_q) {
    if (!(var_p > 0.0) || !(var_q > 0.0)) {
        throw InputError("gaussian_kl: variances must be positive");
    }
    double dm = mean_p - mean_q;
    return 0.5 * std::log(var_q / var_p) + (var_p + dm * dm) / (2.0 * var_q) - 0.5;
}

WeightVector entropy_change_weights(const std::vector<ExpertPrediction>& preds) {
    check_preds(preds, "entropy_change_weights");
    const int k = static_cast<int>(preds.size());
    Vector dh = entropy_changes(preds);
    double total = dh.sum();
    WeightVector w;
    if (total < 1e-12) {
        w.alphas = Vector::Constant(k, 1.0 / k);  // nobody saw data here
    } else {
        w.alphas = dh / total;
    }
    return w;
}

CombinedPrediction combine_gpoe(const std::vector<ExpertPrediction>& preds,
                                const WeightVector& weights) {
    check_preds(preds, "combine_gpoe");
    weights.validate();
    if (weights.size() != static_cast<int>(preds.size())) {
        throw InputError("combine_gpoe: weight/prediction count mismatch");
    }
    double precision = 0.0;
    double weighted_mean = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double t = weights.alphas(static_cast<int>(i)) / preds[i].variance;
        precision += t;
        weighted_mean += t * preds[i].mean;
    }
    CombinedPrediction out;
    out.rule = CombineRule::gPoE;
    out.variance = 1.0 / precision;
    out.mean = weighted_mean * out.variance;
    out.weights = weights;
    return out;
}

CombinedPrediction combine_bcm(const std::vector<ExpertPrediction>& preds,
                               double prior_precision) {
    check_preds(preds, "combine_bcm");
    if (!(prior_precision > 0.0)) throw InputError("combine_bcm: prior precision <= 0");
    const int k = static_cast<int>(preds.size());
    double precision = (1.0 - k) * prior_precision;
    double weighted_mean = 0.0;
    for (const auto& p : preds) {
        precision += 1.0 / p.variance;
        weighted_mean += p.mean / p.variance;
    }
    if (!(precision > 0.0)) {
        throw NumericalError("combine_bcm: nonpositive combined precision");
    }
    CombinedPrediction out;
    out.rule = CombineRule::BCM;
    out.variance = 1.0 / precision;
    out.mean = weighted_mean / precision;
    return out;
}

CombinedPrediction combine_rbcm(const std::vector<ExpertPrediction>& preds,
                                double prior_precision) {
    check_preds(preds, "combine_rbcm");
    if (!(prior_precision > 0.0)) throw InputError("combine_rbcm: prior precision <= 0");
    Vector beta = entropy_changes(preds);  // unnormalized
    double precision = (1.0 - beta.sum()) * prior_precision;
    double weighted_mean = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double bt = beta(static_cast<int>(i)) / preds[i].variance;
        precision += bt;
        weighted_mean += bt * preds[i].mean;
    }
    if (!(precision > 0.0)) {
        throw NumericalError("combine_rbcm: nonpositive combined precision");
    }
    CombinedPrediction out;
    out.rule = CombineRule::rBCM;
    out.variance = 1.0 / precision;
    out.mean = weighted_mean / precision;
    return out;
}

KLMatrix sym_kl_matrix(const std::vector<ExpertPrediction>& preds) {
    check_preds(preds, "sym_kl_matrix");
    const int k = static_cast<int>(preds.size());
    KLMatrix kl;
    kl.Q = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            double q = gaussian_kl(preds[i].mean, preds[i].variance,
                                   preds[j].mean, preds[j].variance) +
                       gaussian_kl(preds[j].mean, preds[j].variance,
                                   preds[i].mean, preds[i].variance);
            kl.Q(i, j) = q;
            kl.Q(j, i) = q;
        }
    }
    return kl;
}

WeightVector dlop_weights(const KLMatrix& kl, const WeightVector& gpoe_weights,
                          double lambda, int steps) {
    gpoe_weights.validate();
    if (kl.Q.rows() != gpoe_weights.size() || kl.Q.cols() != gpoe_weights.size()) {
        throw InputError("dlop_weights: KL matrix size mismatch");
    }
    if (steps < 1) throw InputError("dlop_weights: steps must be >= 1");

    Vector alpha = gpoe_weights.alphas;
    for (int s = 0; s < steps; ++s) {
        Vector grad = 0.5 * (kl.Q * alpha);  // gradient of alpha Q alpha^T / 4
        double norm = grad.norm();
        if (norm < 1e-12) break;  // normalized step undefined; keep current weights
        Vector ahat = alpha + (lambda / norm) * grad;
        alpha = ahat / ahat.sum();
    }
    WeightVector out;
    out.alphas = alpha;
    return out;
}

WeightVector dlop_weights(const std::vector<ExpertPrediction>& preds,
                          const WeightVector& gpoe_weights, double lambda, int steps) {
    return dlop_weights(sym_kl_matrix(preds), gpoe_weights, lambda, steps);
}

CombinedPrediction combine_dlop(const std::vector<ExpertPrediction>& preds,
                                double lambda, int steps) {
    WeightVector w = dlop_weights(preds, entropy_change_weights(preds), lambda, steps);
    CombinedPrediction out = combine_gpoe(preds, w);
    out.rule = CombineRule::dLOP;
    return out;
}

double average_prior_precision(const std::vector<ExpertPrediction>& preds) {
    check_preds(preds, "average_prior_precision");
    double sum = 0.0;
    for (const auto& p : preds) sum += p.prior_variance;
    return preds.size() / sum;
}

}  // namespace gpexperts
