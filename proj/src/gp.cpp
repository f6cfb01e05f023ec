#include "gpexperts/gp.hpp"

#include "gpexperts/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gpexperts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower Cholesky factor of K + jitter*I, escalating jitter from
// 1e-10*trace/n by factors of 10 up to 1e-4*trace/n.
Matrix chol_with_jitter(const Matrix& K, double* jitter_used, const std::string& context) {
    const int n = static_cast<int>(K.rows());
    const double scale = K.trace() / n;
    double jitter = 0.0;
    for (;;) {
        Matrix A = K;
        if (jitter > 0.0) A.diagonal().array() += jitter;
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() == Eigen::Success) {
            if (jitter_used) *jitter_used = jitter;
            return llt.matrixL();
        }
        if (jitter == 0.0) {
            jitter = 1e-10 * scale;
        } else if (jitter < 1e-4 * scale) {
            jitter *= 10.0;
        } else {
            throw NumericalError("fit: Cholesky failed at max jitter (" + context + ")");
        }
    }
}

}  // namespace

GPModel fit(const Matrix& X, const Vector& y, const KernelSpec& spec,
            const HyperParams& params) {
    if (X.rows() < 1) throw InputError("fit: need at least one data point");
    if (y.size() != X.rows()) throw InputError("fit: X and y row counts differ");
    if (!y.allFinite()) throw InputError("fit: non-finite targets");

    Matrix K = eval_kernel(spec, params, X, X);
    K.diagonal().array() += params.noise_variance();
    if (!K.allFinite()) {
        throw NumericalError("fit: kernel matrix has non-finite entries (" +
                             spec.to_string() + ")");
    }

    GPModel model;
    model.X = X;
    model.y = y;
    model.spec = spec;
    model.params = params;
    model.chol = chol_with_jitter(K, &model.jitter,
                                  spec.to_string() + ", n=" + std::to_string(X.rows()));
    model.solve_vec = model.chol.triangularView<Eigen::Lower>().solve(y);
    model.chol.transpose().triangularView<Eigen::Upper>().solveInPlace(model.solve_vec);
    return model;
}

std::vector<ExpertPrediction> predict(const GPModel& model, const Matrix& Xstar) {
    if (Xstar.cols() != model.input_dim()) {
        throw InputError("predict: test points have wrong dimension");
    }
    const int m = static_cast<int>(Xstar.rows());
    std::vector<ExpertPrediction> out(m);
    if (m == 0) return out;

    const double prior_var =
        model.params.total_signal_variance() + model.params.noise_variance();
    Matrix kstar = eval_kernel(model.spec, model.params, model.X, Xstar);  // n x m
    Vector mean = kstar.transpose() * model.solve_vec;
    Matrix v = model.chol.triangularView<Eigen::Lower>().solve(kstar);
    for (int j = 0; j < m; ++j) {
        out[j].mean = mean(j);
        out[j].variance = prior_var - v.col(j).squaredNorm();
        out[j].prior_variance = prior_var;
    }
    return out;
}

double log_marginal_likelihood(const GPModel& model) {
    const int n = model.n();
    double log_det_half = model.chol.diagonal().array().log().sum();
    return -0.5 * model.y.dot(model.solve_vec) - log_det_half
           - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Vector lml_grad(const GPModel& model) {
    const int n = model.n();
    Matrix Kinv = Matrix::Identity(n, n);
    model.chol.triangularView<Eigen::Lower>().solveInPlace(Kinv);
    model.chol.transpose().triangularView<Eigen::Upper>().solveInPlace(Kinv);

    const Vector& alpha = model.solve_vec;
    std::vector<Matrix> dK = kernel_grad(model.spec, model.params, model.X);
    Vector grad(static_cast<int>(dK.size()));
    for (std::size_t j = 0; j < dK.size(); ++j) {
        grad(static_cast<int>(j)) =
            0.5 * (alpha.dot(dK[j] * alpha) - Kinv.cwiseProduct(dK[j]).sum());
    }
    return grad;
}

HyperParams default_init(const Matrix& X, const Vector& y, const KernelSpec& spec) {
    spec.validate();
    const int n = static_cast<int>(X.rows());
    const int m = spec.n_members();

    HyperParams p = HyperParams::zeros(spec);
    double y_var = 1.0;
    if (n > 1) {
        double mean = y.mean();
        y_var = (y.array() - mean).square().sum() / (n - 1);
    }
    if (y_var < 1e-12) y_var = 1.0;

    for (int d = 0; d < spec.input_dim; ++d) {
        double sd = 1.0;
        if (n > 1) {
            double mean = X.col(d).mean();
            sd = std::sqrt((X.col(d).array() - mean).square().sum() / (n - 1));
        }
        if (sd < 1e-12) sd = 1.0;
        p.log_lengthscales.col(d).setConstant(std::log(sd));
    }
    // split the target variance across sum members
    p.log_signal_variance.setConstant(std::log(y_var / m));
    p.log_noise_variance = std::log(0.1 * y_var);
    return p;
}

namespace {

// Objective for the optimizer: f = -LML(theta), with gradient. Evaluation
// failures (Cholesky breakdown, overflowed kernels) surface as +inf so the
// line search backs off instead of aborting the whole restart.
struct LmlObjective {
    const Matrix& X;
    const Vector& y;
    const KernelSpec& spec;

    double value_and_grad(const Vector& theta, Vector* grad) const {
        if (!theta.allFinite()) return kInf;
        try {
            GPModel model = fit(X, y, spec, HyperParams::unpack(spec, theta));
            double f = -log_marginal_likelihood(model);
            if (!std::isfinite(f)) return kInf;
            if (grad) {
                *grad = -lml_grad(model);
                if (!grad->allFinite()) return kInf;
            }
            return f;
        } catch (const NumericalError&) {
            return kInf;
        } catch (const InputError&) {
            return kInf;
        }
    }
};

struct LbfgsResult {
    Vector theta;
    double f = kInf;
    double grad_inf_norm = kInf;
    bool evaluated = false;  // objective was finite at least once
};

// L-BFGS with Armijo backtracking; falls back to a halved-step gradient
// move when the quasi-Newton line search fails.
LbfgsResult lbfgs_minimize(const LmlObjective& obj, const Vector& init,
                           int max_iters, double grad_tol) {
    constexpr int kHistory = 8;
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 30;

    LbfgsResult best;
    best.theta = init;

    Vector theta = init;
    Vector grad(init.size());
    double f = obj.value_and_grad(theta, &grad);
    if (!std::isfinite(f)) return best;

    best.f = f;
    best.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    best.evaluated = true;

    std::vector<Vector> s_hist, y_hist;
    std::vector<double> rho_hist;

    for (int iter = 0; iter < max_iters; ++iter) {
        double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= grad_tol) break;

        // two-loop recursion
        Vector dir = -grad;
        if (!s_hist.empty()) {
            std::vector<double> a(s_hist.size());
            for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
                a[i] = rho_hist[i] * s_hist[i].dot(dir);
                dir -= a[i] * y_hist[i];
            }
            double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            dir *= gamma;
            for (std::size_t i = 0; i < s_hist.size(); ++i) {
                double b = rho_hist[i] * y_hist[i].dot(dir);
                dir += (a[i] - b) * s_hist[i];
            }
        }
        if (dir.dot(grad) >= 0.0) {  // not a descent direction; reset
            dir = -grad;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        auto backtrack = [&](const Vector& d, double t0, Vector* theta_out,
                             Vector* grad_out, double* f_out) {
            double dg = d.dot(grad);
            double t = t0;
            for (int k = 0; k < kMaxBacktracks; ++k) {
                Vector cand = theta + t * d;
                Vector g_cand(cand.size());
                double f_cand = obj.value_and_grad(cand, &g_cand);
                if (std::isfinite(f_cand) && f_cand <= f + kArmijo * t * dg) {
                    *theta_out = cand;
                    *grad_out = g_cand;
                    *f_out = f_cand;
                    return true;
                }
                t *= 0.5;
            }
            return false;
        };

        Vector theta_new, grad_new(init.size());
        double f_new;
        bool ok = backtrack(dir, 1.0, &theta_new, &grad_new, &f_new);
        if (!ok) {
            // steepest-descent fallback with a halved initial step
            Vector sd = -grad;
            double t0 = 0.5 / std::max(1.0, grad.norm());
            ok = backtrack(sd, t0, &theta_new, &grad_new, &f_new);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        if (!ok) break;  // no progress possible

        Vector s = theta_new - theta;
        Vector yv = grad_new - grad;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > kHistory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }

        theta = theta_new;
        grad = grad_new;
        f = f_new;
        if (f < best.f) {
            best.theta = theta;
            best.f = f;
            best.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
        }
    }
    return best;
}

}  // namespace

HyperParams optimize_hypers(const Matrix& X, const Vector& y, const KernelSpec& spec,
                            const HyperParams& init, const OptConfig& config) {
    if (X.rows() < 2) throw InputError("optimize_hypers: need n >= 2");
    init.validate(spec);

    LmlObjective obj{X, y, spec};
    Vector theta0 = init.pack();

    // already stationary: keep the caller's parameters untouched
    {
        Vector g(theta0.size());
        double f0 = obj.value_and_grad(theta0, &g);
        if (std::isfinite(f0) && g.lpNorm<Eigen::Infinity>() <= config.grad_tol) {
            return init;
        }
    }

    LbfgsResult best;
    for (int run = 0; run <= config.restarts; ++run) {
        Vector start = theta0;
        if (run > 0) {
            Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(run)));
            for (int i = 0; i < start.size(); ++i) start(i) += 0.5 * rng.normal();
        }
        LbfgsResult res = lbfgs_minimize(obj, start, config.max_iters, config.grad_tol);
        if (res.evaluated && res.f < best.f) best = res;
    }
    if (!best.evaluated) {
        throw NumericalError("optimize_hypers: all restarts failed on kernel " +
                             spec.to_string());
    }
    return HyperParams::unpack(spec, best.theta);
}

}  // namespace gpexperts
