#pragma once

#include "gpexperts/combine.hpp"
#include "gpexperts/partition.hpp"

#include <vector>

namespace gpexperts {

// Mean squared error of `means` against y_test, normalized by the error of
// the constant train-mean predictor on y_test.
double smse(const Vector& means, const Vector& y_test, double y_train_mean,
            double y_train_var);

// Mean negative log predictive density minus that of the trivial Gaussian
// baseline N(y_train_mean, y_train_var). Negative = better than baseline.
double snlp(const std::vector<CombinedPrediction>& preds, const Vector& y_test,
            double y_train_mean, double y_train_var);

struct WallTimes {
    double train_s = 0.0;
    double predict_s = 0.0;
};

struct MetricsReport {
    double snlp = 0.0;
    double smse = 0.0;
    int n_test = 0;
    CombineRule rule = CombineRule::gPoE;
    Scheme scheme = Scheme::SoD;
    WallTimes wall_times;
};

}  // namespace gpexperts
