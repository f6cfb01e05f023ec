#include "gpexperts/kernel.hpp"

#include <cmath>
#include <sstream>

namespace gpexperts {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);

void check_inputs(const KernelSpec& spec, const HyperParams& params,
                  const Matrix& X, const char* what) {
    spec.validate();
    params.validate(spec);
    if (X.cols() != spec.input_dim) {
        std::ostringstream msg;
        msg << what << ": X has " << X.cols() << " columns, kernel expects "
            << spec.input_dim;
        throw InputError(msg.str());
    }
    if (!X.allFinite()) throw InputError(std::string(what) + ": non-finite entries in X");
}

// Squared ARD distances between scaled inputs: D_ij = sum_d ((x1_id - x2_jd)/ell_d)^2.
Matrix scaled_sq_dist(const Matrix& X1, const Matrix& X2, const Vector& inv_ell) {
    Matrix A = X1 * inv_ell.asDiagonal();
    Matrix B = X2 * inv_ell.asDiagonal();
    Vector a2 = A.rowwise().squaredNorm();
    Vector b2 = B.rowwise().squaredNorm();
    Matrix D = a2.replicate(1, B.rows()) + b2.transpose().replicate(A.rows(), 1)
               - 2.0 * A * B.transpose();
    return D.cwiseMax(0.0);  // guard against cancellation
}

Matrix eval_member(KernelFamily family, double s2, const Matrix& D2) {
    switch (family) {
        case KernelFamily::SEard:
            return s2 * (-0.5 * D2.array()).exp().matrix();
        case KernelFamily::Matern32: {
            Eigen::ArrayXXd r = D2.array().sqrt();
            return (s2 * (1.0 + kSqrt3 * r) * (-kSqrt3 * r).exp()).matrix();
        }
        case KernelFamily::Matern52: {
            Eigen::ArrayXXd r = D2.array().sqrt();
            return (s2 * (1.0 + kSqrt5 * r + (5.0 / 3.0) * D2.array())
                    * (-kSqrt5 * r).exp()).matrix();
        }
    }
    throw InputError("eval_member: unknown kernel family");
}

}  // namespace

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::SEard: return "seard";
        case KernelFamily::Matern32: return "matern32";
        case KernelFamily::Matern52: return "matern52";
    }
    return "?";
}

void KernelSpec::validate() const {
    if (members.empty()) throw InputError("KernelSpec: needs at least one member");
    if (input_dim < 1) throw InputError("KernelSpec: input_dim must be >= 1");
}

KernelSpec KernelSpec::parse(const std::string& text, int input_dim) {
    KernelSpec spec;
    spec.input_dim = input_dim;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, '+')) {
        if (token == "seard") {
            spec.members.push_back(KernelFamily::SEard);
        } else if (token == "matern32") {
            spec.members.push_back(KernelFamily::Matern32);
        } else if (token == "matern52") {
            spec.members.push_back(KernelFamily::Matern52);
        } else {
            throw InputError("KernelSpec::parse: unknown kernel \"" + token + "\"");
        }
    }
    spec.validate();
    return spec;
}

std::string KernelSpec::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0) out += '+';
        out += gpexperts::to_string(members[i]);
    }
    return out;
}

HyperParams HyperParams::zeros(const KernelSpec& spec) {
    spec.validate();
    HyperParams p;
    p.log_lengthscales = Matrix::Zero(spec.n_members(), spec.input_dim);
    p.log_signal_variance = Vector::Zero(spec.n_members());
    p.log_noise_variance = 0.0;
    return p;
}

void HyperParams::validate(const KernelSpec& spec) const {
    if (log_lengthscales.rows() != spec.n_members() ||
        log_lengthscales.cols() != spec.input_dim ||
        log_signal_variance.size() != spec.n_members()) {
        throw InputError("HyperParams: shape does not match KernelSpec");
    }
    if (!log_lengthscales.allFinite() || !log_signal_variance.allFinite() ||
        !std::isfinite(log_noise_variance)) {
        throw InputError("HyperParams: non-finite values");
    }
}

double HyperParams::noise_variance() const { return std::exp(log_noise_variance); }

double HyperParams::total_signal_variance() const {
    return log_signal_variance.array().exp().sum();
}

int HyperParams::n_params() const {
    return static_cast<int>(log_lengthscales.size() + log_signal_variance.size()) + 1;
}

Vector HyperParams::pack() const {
    const int m = static_cast<int>(log_signal_variance.size());
    const int d = static_cast<int>(log_lengthscales.cols());
    Vector theta(n_params());
    int at = 0;
    for (int i = 0; i < m; ++i) {
        theta.segment(at, d) = log_lengthscales.row(i).transpose();
        at += d;
        theta(at++) = log_signal_variance(i);
    }
    theta(at) = log_noise_variance;
    return theta;
}

HyperParams HyperParams::unpack(const KernelSpec& spec, const Vector& theta) {
    const int m = spec.n_members();
    const int d = spec.input_dim;
    if (theta.size() != m * (d + 1) + 1) {
        throw InputError("HyperParams::unpack: wrong parameter count");
    }
    HyperParams p = zeros(spec);
    int at = 0;
    for (int i = 0; i < m; ++i) {
        p.log_lengthscales.row(i) = theta.segment(at, d).transpose();
        at += d;
        p.log_signal_variance(i) = theta(at++);
    }
    p.log_noise_variance = theta(at);
    return p;
}

Matrix eval_kernel(const KernelSpec& spec, const HyperParams& params,
                   const Matrix& X1, const Matrix& X2) {
    check_inputs(spec, params, X1, "eval_kernel");
    if (X2.cols() != spec.input_dim) {
        throw InputError("eval_kernel: X2 column count does not match input_dim");
    }
    if (!X2.allFinite()) throw InputError("eval_kernel: non-finite entries in X2");

    Matrix K = Matrix::Zero(X1.rows(), X2.rows());
    for (int i = 0; i < spec.n_members(); ++i) {
        Vector inv_ell = (-params.log_lengthscales.row(i)).array().exp();
        double s2 = std::exp(params.log_signal_variance(i));
        K += eval_member(spec.members[i], s2, scaled_sq_dist(X1, X2, inv_ell));
    }
    return K;
}

Vector eval_kernel_diag(const KernelSpec& spec, const HyperParams& params, const Matrix& X) {
    check_inputs(spec, params, X, "eval_kernel_diag");
    // all supported families are stationary: k(x, x) = total signal variance
    return Vector::Constant(X.rows(), params.total_signal_variance());
}

std::vector<Matrix> kernel_grad(const KernelSpec& spec, const HyperParams& params,
                                const Matrix& X) {
    check_inputs(spec, params, X, "kernel_grad");
    const int n = static_cast<int>(X.rows());
    const int d = spec.input_dim;

    std::vector<Matrix> grads;
    grads.reserve(params.n_params());

    for (int m = 0; m < spec.n_members(); ++m) {
        Vector inv_ell = (-params.log_lengthscales.row(m)).array().exp();
        double s2 = std::exp(params.log_signal_variance(m));
        Matrix D2 = scaled_sq_dist(X, X, inv_ell);
        Matrix Km = eval_member(spec.members[m], s2, D2);

        // Per-dimension factor U_d with entries u_d^2 = ((x_id - x_jd)/ell_d)^2.
        // d k / d log ell_d:
        //   SEard:    k * u_d^2
        //   Matern32: 3 s2 u_d^2 exp(-sqrt3 r)
        //   Matern52: (5/3) s2 (1 + sqrt5 r) u_d^2 exp(-sqrt5 r)
        Matrix base;  // multiplies u_d^2 elementwise
        switch (spec.members[m]) {
            case KernelFamily::SEard:
                base = Km;
                break;
            case KernelFamily::Matern32: {
                Eigen::ArrayXXd r = D2.array().sqrt();
                base = (3.0 * s2 * (-kSqrt3 * r).exp()).matrix();
                break;
            }
            case KernelFamily::Matern52: {
                Eigen::ArrayXXd r = D2.array().sqrt();
                base = ((5.0 / 3.0) * s2 * (1.0 + kSqrt5 * r) * (-kSqrt5 * r).exp()).matrix();
                break;
            }
        }
        for (int dim = 0; dim < d; ++dim) {
            Vector col = X.col(dim) * inv_ell(dim);
            Matrix diff = col.replicate(1, n) - col.transpose().replicate(n, 1);
            grads.push_back(base.cwiseProduct(diff.cwiseProduct(diff)));
        }
        // d k / d log s2 = the member's own covariance
        grads.push_back(Km);
    }

    grads.push_back(params.noise_variance() * Matrix::Identity(n, n));
    return grads;
}

}  // namespace gpexperts
