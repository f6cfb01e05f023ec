#pragma once

#include "gpexperts/kernel.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace gpexperts {

struct Dataset {
    Matrix X;
    Vector y;
    // Standardization statistics (identity until standardize() is applied).
    Vector feature_means;
    Vector feature_stds;
    double target_mean = 0.0;
    double target_std = 1.0;
    bool standardized = false;

    int n() const { return static_cast<int>(X.rows()); }
    int dim() const { return static_cast<int>(X.cols()); }
};

// Comma-delimited numeric file, target in the last column. A non-numeric first
// line is treated as a header. Files ending in ".gz" are decompressed on the fly.
Dataset load_csv(const std::string& path);

// Plain CSV, no header; pairs with load_csv.
void save_csv(const Dataset& ds, const std::string& path);

// Standardize features and target using train statistics only; near-constant
// columns pass through unscaled.
std::pair<Dataset, Dataset> standardize(const Dataset& train, const Dataset& test);

// Invert standardize() using the statistics stored in the dataset.
Dataset destandardize(const Dataset& ds);

// X uniform on [-3,3]^d, y drawn from the GP prior plus observation noise.
// heteroscedastic scales the noise std by (1 + |x_1|).
Dataset synthetic_gp_data(int n, int d, const KernelSpec& kernel,
                          const HyperParams& params, bool heteroscedastic,
                          std::uint64_t seed);

// Random train/test split (shuffle by seed, first n_train rows go to train).
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, int n_train,
                                          std::uint64_t seed);

}  // namespace gpexperts
