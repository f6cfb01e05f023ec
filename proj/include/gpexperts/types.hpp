#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace gpexperts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Caller violated an operation's contract (bad dimensions, bad values, bad files).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation failed numerically (Cholesky breakdown, nonpositive precision, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gpexperts
