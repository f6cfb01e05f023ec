#include "gpexperts/metrics.hpp"

#include <cmath>
#include <numbers>

namespace gpexperts {

double smse(const Vector& means, const Vector& y_test, double y_train_mean,
            double /*y_train_var*/) {
    const int m = static_cast<int>(y_test.size());
    if (m < 1) throw InputError("smse: no test points");
    if (means.size() != m) throw InputError("smse: means/targets size mismatch");

    double mse = (means - y_test).squaredNorm() / m;
    double baseline = (y_test.array() - y_train_mean).square().sum() / m;
    return mse / baseline;
}

double snlp(const std::vector<CombinedPrediction>& preds, const Vector& y_test,
            double y_train_mean, double y_train_var) {
    const int m = static_cast<int>(y_test.size());
    if (m < 1) throw InputError("snlp: no test points");
    if (static_cast<int>(preds.size()) != m) {
        throw InputError("snlp: predictions/targets size mismatch");
    }
    if (!(y_train_var > 0.0)) throw InputError("snlp: y_train_var must be positive");

    const double log2pi = std::log(2.0 * std::numbers::pi);
    double nlp_model = 0.0;
    double nlp_baseline = 0.0;
    for (int i = 0; i < m; ++i) {
        if (!(preds[i].variance > 0.0)) {
            throw InputError("snlp: nonpositive predictive variance");
        }
        double r = y_test(i) - preds[i].mean;
        nlp_model += 0.5 * (log2pi + std::log(preds[i].variance)) +
                     r * r / (2.0 * preds[i].variance);
        double rb = y_test(i) - y_train_mean;
        nlp_baseline += 0.5 * (log2pi + std::log(y_train_var)) +
                        rb * rb / (2.0 * y_train_var);
    }
    return (nlp_model - nlp_baseline) / m;
}

}  // namespace gpexperts
