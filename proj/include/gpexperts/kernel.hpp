#pragma once

#include "gpexperts/types.hpp"

#include <string>
#include <vector>

namespace gpexperts {

enum class KernelFamily { SEard, Matern32, Matern52 };

std::string to_string(KernelFamily family);

// A stationary covariance: a single base family or a flat sum of them.
// members.size() == 1 means a plain kernel; > 1 means a sum. Sums of sums
// cannot be represented, which keeps the structure flat by construction.
struct KernelSpec {
    std::vector<KernelFamily> members;
    int input_dim = 1;

    int n_members() const { return static_cast<int>(members.size()); }
    bool is_sum() const { return members.size() > 1; }

    void validate() const;

    // Grammar: "seard", "matern32", "matern52", joined by '+', e.g. "seard+matern32".
    static KernelSpec parse(const std::string& text, int input_dim);
    std::string to_string() const;
};

// Log-space hyperparameters matching a KernelSpec, plus one model-level noise
// variance shared across sum members.
struct HyperParams {
    Matrix log_lengthscales;     // n_members x input_dim (ARD, per member)
    Vector log_signal_variance;  // n_members
    double log_noise_variance = 0.0;

    static HyperParams zeros(const KernelSpec& spec);

    void validate(const KernelSpec& spec) const;

    double noise_variance() const;
    // sum over members of exp(log_signal_variance), i.e. k(x, x) without noise
    double total_signal_variance() const;

    // Flat layout (the optimizer's view): for each member its d lengthscales
    // then its signal variance, finally the noise variance.
    int n_params() const;
    Vector pack() const;
    static HyperParams unpack(const KernelSpec& spec, const Vector& theta);
};

// Noise-free covariance matrix k(X1_i, X2_j), n x m.
Matrix eval_kernel(const KernelSpec& spec, const HyperParams& params,
                   const Matrix& X1, const Matrix& X2);

// diag(eval_kernel(X, X)) without forming the matrix.
Vector eval_kernel_diag(const KernelSpec& spec, const HyperParams& params, const Matrix& X);

// dK/dtheta on X for every packed log hyperparameter, in pack() order.
// The last matrix is the noise gradient sigma_n^2 * I.
std::vector<Matrix> kernel_grad(const KernelSpec& spec, const HyperParams& params,
                                const Matrix& X);

}  // namespace gpexperts
