#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "downscale/logistic.hpp"
#include "downscale/weights.hpp"

namespace downscale {

struct SolverSettings {
    double rho = 1.0;        // ADMM penalty
    double admm_tol = 1e-4;  // primal/dual residual tolerance
    int max_admm_iter = 500;
    double outer_tol = 1e-5;  // relative objective change
    int max_outer_iter = 50;

    void validate() const {
        if (rho <= 0 || admm_tol <= 0 || outer_tol <= 0 || max_admm_iter <= 0 || max_outer_iter <= 0)
            throw std::invalid_argument("solver settings must be positive");
    }
};

enum class MsslLoss { Squared, Logistic };

namespace detail {

inline void soft_threshold_inplace(Mat& m, double thr) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double v = m(i, j);
            m(i, j) = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
        }
}

inline double l1_norm(const Mat& m) { return m.cwiseAbs().sum(); }

// l1 over penalized rows only (the intercept row is exempt)
inline double l1_norm_masked(const Mat& m, Eigen::Index unpenalized_row) {
    double s = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i == unpenalized_row) continue;
        s += m.row(i).cwiseAbs().sum();
    }
    return s;
}

inline double log_det_pd(const Mat& omega, bool* ok = nullptr) {
    Eigen::LLT<Mat> llt(omega);
    if (llt.info() != Eigen::Success) {
        if (ok) {
            *ok = false;
            return 0;
        }
        throw std::invalid_argument("precision matrix is not positive definite");
    }
    if (ok) *ok = true;
    double ld = 0;
    const Mat l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) ld += std::log(l(i, i));
    return 2.0 * ld;
}

}  // namespace detail

// squared or per-task logistic data term + the structure terms:
//   loss(X, Y, W) - (K/2) log|Omega| + Tr(W Omega W') + lambda ||Omega||_1
//   + gamma ||W||_1
// with ||Omega||_1 the entrywise sum including the diagonal
inline double mssl_objective(const Mat& x, const Mat& y, const Mat& w, const Mat& omega, double lambda,
                             double gamma, MsslLoss loss = MsslLoss::Squared,
                             Eigen::Index unpenalized_row = -1) {
    const double k = static_cast<double>(y.cols());
    double data = 0;
    if (loss == MsslLoss::Squared) {
        data = 0.5 * (x * w - y).squaredNorm();
    } else {
        const Mat z = x * w;
        for (Eigen::Index j = 0; j < z.cols(); ++j)
            for (Eigen::Index i = 0; i < z.rows(); ++i) data += log1pexp(z(i, j)) - y(i, j) * z(i, j);
    }
    const double logdet = detail::log_det_pd(omega);
    const double trace = (w * omega).cwiseProduct(w).sum();
    const double w_l1 =
        unpenalized_row < 0 ? detail::l1_norm(w) : detail::l1_norm_masked(w, unpenalized_row);
    return data - 0.5 * k * logdet + trace + lambda * detail::l1_norm(omega) + gamma * w_l1;
}

struct WStepResult {
    Mat w;  // d x K, exact zeros from the splitting variable
    bool converged = false;
    int iterations = 0;
};

struct OmegaStepResult {
    Mat omega;  // K x K symmetric positive definite
    bool converged = false;
    int iterations = 0;
    double min_eigenvalue = 0;
};

namespace detail {

// cached pieces reused across every ADMM iteration and outer iteration
struct WStepContext {
    Mat p;       // eigenvectors of X'X
    Vec d_eigs;  // eigenvalues of X'X
    Mat xty;
    double y_sq = 0;

    WStepContext(const Mat& x, const Mat& y) {
        Eigen::SelfAdjointEigenSolver<Mat> eig(x.transpose() * x);
        if (eig.info() != Eigen::Success) throw std::runtime_error("w_step: eigendecomposition failed");
        p = eig.eigenvectors();
        d_eigs = eig.eigenvalues();
        xty = x.transpose() * y;
        y_sq = y.squaredNorm();
    }

    // 1/2||XW - Y||^2 from the cached factors
    double data_term(const Mat& w) const {
        const Mat pw = p.transpose() * w;
        const double quad = (d_eigs.asDiagonal() * pw).cwiseProduct(pw).sum();
        return 0.5 * (quad - 2.0 * w.cwiseProduct(xty).sum() + y_sq);
    }
};

struct AdmmState {
    Mat z, u;
};

// Eq. 6 subproblem by ADMM with the splitting W = Z. The quadratic update
// solves (X'X + rho I) W + 2 W Omega = X'Y + rho (Z - U) exactly through the
// two eigenbases.
inline WStepResult w_step_admm(const WStepContext& ctx, const Mat& omega, double gamma,
                               const SolverSettings& settings, Eigen::Index unpenalized_row,
                               AdmmState* warm) {
    const Eigen::Index d = ctx.p.rows();
    const Eigen::Index k = omega.rows();
    const double rho = settings.rho;

    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (omega + omega.transpose()));
    if (eig.info() != Eigen::Success) throw std::runtime_error("w_step: omega eigendecomposition failed");
    if (eig.eigenvalues()(0) <= 0) throw std::invalid_argument("w_step: omega must be positive definite");
    const Mat q = eig.eigenvectors();
    const Vec mu = eig.eigenvalues();

    Mat z = warm && warm->z.rows() == d ? warm->z : Mat::Zero(d, k);
    Mat u = warm && warm->u.rows() == d ? warm->u : Mat::Zero(d, k);

    auto subproblem_objective = [&](const Mat& w) {
        return ctx.data_term(w) + (w * omega).cwiseProduct(w).sum() +
               gamma * (unpenalized_row < 0 ? l1_norm(w) : l1_norm_masked(w, unpenalized_row));
    };

    WStepResult res;
    Mat w(d, k);
    Mat best = z;
    double best_obj = subproblem_objective(z);
    for (int it = 0; it < settings.max_admm_iter; ++it) {
        res.iterations = it + 1;

        // W-update in the rotated bases
        Mat rhs = (ctx.xty + rho * (z - u)) * q;           // d x k, task-rotated
        rhs.applyOnTheLeft(ctx.p.transpose());             // feature-rotated
        for (Eigen::Index j = 0; j < k; ++j)
            rhs.col(j).array() /= (ctx.d_eigs.array() + rho + 2.0 * mu(j));
        w.noalias() = ctx.p * rhs * q.transpose();

        // Z-update: entrywise soft threshold at gamma / rho
        const Mat z_prev = z;
        z = w + u;
        Vec saved_row;
        if (unpenalized_row >= 0) saved_row = z.row(unpenalized_row);
        soft_threshold_inplace(z, gamma / rho);
        if (unpenalized_row >= 0) z.row(unpenalized_row) = saved_row;

        u += w - z;

        const double obj = subproblem_objective(z);
        if (obj < best_obj) {
            best_obj = obj;
            best = z;
        }

        const double primal = (w - z).norm();
        const double dual = rho * (z - z_prev).norm();
        const double scale = std::max({1.0, w.norm(), z.norm()});
        if (primal <= settings.admm_tol * scale && dual <= settings.admm_tol * scale) {
            res.converged = true;
            break;
        }
    }
    if (warm) {
        warm->z = z;
        warm->u = u;
    }
    res.w = subproblem_objective(z) <= best_obj ? z : best;
    return res;
}

// Eq. 7 subproblem by ADMM with the splitting Omega = Phi. S = W'W plus the
// lambda-diagonal contribution; the per-eigenvalue quadratic root keeps the
// Omega iterate positive definite.
inline OmegaStepResult omega_step_admm(const Mat& w, double lambda, const SolverSettings& settings,
                                       AdmmState* warm) {
    const Eigen::Index k = w.cols();
    const double rho = settings.rho;
    const double kk = static_cast<double>(k);
    const Mat s = w.transpose() * w + lambda * Mat::Identity(k, k);

    Mat phi = warm && warm->z.rows() == k ? warm->z : Mat::Identity(k, k);
    Mat u = warm && warm->u.rows() == k ? warm->u : Mat::Zero(k, k);

    auto subproblem_objective = [&](const Mat& omega) {
        bool pd = true;
        const double ld = log_det_pd(omega, &pd);
        if (!pd) return std::numeric_limits<double>::infinity();
        double off = 0;
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                if (i != j) off += std::abs(omega(i, j));
        return s.cwiseProduct(omega).sum() - 0.5 * kk * ld + lambda * off;
    };

    OmegaStepResult res;
    Mat omega(k, k);
    Mat best = Mat::Identity(k, k);
    double best_obj = subproblem_objective(best);
    Vec eigs(k);
    for (int it = 0; it < settings.max_admm_iter; ++it) {
        res.iterations = it + 1;

        Mat m = rho * (phi - u) - s;
        m = (0.5 * (m + m.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Mat> eig(m);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double di = eig.eigenvalues()(i);
            eigs(i) = (di + std::sqrt(di * di + 2.0 * kk * rho)) / (2.0 * rho);
        }
        omega.noalias() = eig.eigenvectors() * eigs.asDiagonal() * eig.eigenvectors().transpose();
        omega = (0.5 * (omega + omega.transpose())).eval();

        // Phi-update: off-diagonal soft threshold at lambda / rho
        const Mat phi_prev = phi;
        phi = omega + u;
        const Vec diag = phi.diagonal();
        soft_threshold_inplace(phi, lambda / rho);
        phi.diagonal() = diag;

        u += omega - phi;

        // both iterates are candidates: omega is surely PD, phi carries the
        // exact zeros (objective is +inf when phi loses definiteness)
        for (const Mat* cand : {&omega, &phi}) {
            const double obj = subproblem_objective(*cand);
            if (obj < best_obj) {
                best_obj = obj;
                best = *cand;
            }
        }

        const double primal = (omega - phi).norm();
        const double dual = rho * (phi - phi_prev).norm();
        const double scale = std::max({1.0, omega.norm(), phi.norm()});
        if (primal <= settings.admm_tol * scale && dual <= settings.admm_tol * scale) {
            res.converged = true;
            break;
        }
    }
    if (warm) {
        warm->z = phi;
        warm->u = u;
    }
    res.omega = best;
    Eigen::SelfAdjointEigenSolver<Mat> check(res.omega);
    res.min_eigenvalue = check.eigenvalues()(0);
    return res;
}

}  // namespace detail

inline WStepResult w_step(const Mat& x, const Mat& y, const Mat& omega, double gamma,
                          const SolverSettings& settings = {}, Eigen::Index unpenalized_row = -1) {
    settings.validate();
    if (x.rows() != y.rows()) throw std::invalid_argument("w_step: row count mismatch");
    const detail::WStepContext ctx(x, y);
    return detail::w_step_admm(ctx, omega, gamma, settings, unpenalized_row, nullptr);
}

inline OmegaStepResult omega_step(const Mat& w, double lambda, const SolverSettings& settings = {}) {
    settings.validate();
    return detail::omega_step_admm(w, lambda, settings, nullptr);
}

namespace detail {

// masked squared / logistic data term (mask entries are 0/1 weights)
inline double mssl_data_term(const Mat& x, const Mat& y, const Mat& w, MsslLoss loss, const Mat* mask) {
    const Mat z = x * w;
    double data = 0;
    if (loss == MsslLoss::Squared) {
        if (!mask) return 0.5 * (z - y).squaredNorm();
        return 0.5 * (z - y).cwiseProduct(mask->cwiseSqrt()).squaredNorm();
    }
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double m = mask ? (*mask)(i, j) : 1.0;
            if (m != 0.0) data += m * (log1pexp(z(i, j)) - y(i, j) * z(i, j));
        }
    return data;
}

inline Mat mssl_data_grad(const Mat& x, const Mat& y, const Mat& w, MsslLoss loss, const Mat* mask) {
    Mat r = x * w;
    if (loss == MsslLoss::Squared) {
        r -= y;
    } else {
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, j) = sigmoid(r(i, j)) - y(i, j);
    }
    if (mask) r = r.cwiseProduct(*mask);
    return x.transpose() * r;
}

// Eq. 6 subproblem for the logistic / masked variants: FISTA on the smooth
// part (data + trace) with the entrywise l1 prox
inline WStepResult w_step_prox(const Mat& x, const Mat& y, const Mat& omega, double gamma,
                               const SolverSettings& settings, Eigen::Index unpenalized_row,
                               MsslLoss loss, const Mat* mask, const Mat* warm_w) {
    const Eigen::Index d = x.cols(), k = y.cols();

    Eigen::SelfAdjointEigenSolver<Mat> om_eig(0.5 * (omega + omega.transpose()));
    if (om_eig.eigenvalues()(0) <= 0) throw std::invalid_argument("w_step: omega must be positive definite");
    Eigen::SelfAdjointEigenSolver<Mat> xtx_eig(x.transpose() * x);
    const double loss_factor = loss == MsslLoss::Squared ? 1.0 : 0.25;
    const double lip =
        loss_factor * xtx_eig.eigenvalues()(d - 1) + 2.0 * om_eig.eigenvalues()(k - 1);
    const double step = 1.0 / std::max(lip, 1e-12);

    auto objective = [&](const Mat& w) {
        return mssl_data_term(x, y, w, loss, mask) + (w * omega).cwiseProduct(w).sum() +
               gamma * (unpenalized_row < 0 ? l1_norm(w) : l1_norm_masked(w, unpenalized_row));
    };

    Mat w = warm_w && warm_w->rows() == d ? *warm_w : Mat::Zero(d, k);
    Mat w_prev = w, v = w;
    double t_acc = 1.0;

    WStepResult res;
    Mat best = w;
    double best_obj = objective(w);
    const int max_iter = settings.max_admm_iter * 4;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        const Mat grad = mssl_data_grad(x, y, v, loss, mask) + 2.0 * (v * omega);
        Mat w_new = v - step * grad;
        Vec saved_row;
        if (unpenalized_row >= 0) saved_row = w_new.row(unpenalized_row);
        soft_threshold_inplace(w_new, step * gamma);
        if (unpenalized_row >= 0) w_new.row(unpenalized_row) = saved_row;

        const double obj = objective(w_new);
        if (obj < best_obj) {
            best_obj = obj;
            best = w_new;
        }

        const double move = (w_new - v).norm() / step;
        if (move <= settings.admm_tol * std::max(1.0, w_new.norm())) {
            res.converged = true;
            w = w_new;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        if ((w_new - w).cwiseProduct(w - w_prev).sum() < 0) {
            t_acc = 1.0;
            v = w_new;
        } else {
            v = w_new + ((t_acc - 1.0) / t_next) * (w_new - w);
            t_acc = t_next;
        }
        w_prev = w;
        w = w_new;
    }
    res.w = best_obj <= objective(w) ? best : w;
    return res;
}

}  // namespace detail

struct MsslFit {
    WeightMatrix weights;  // coefficient rows with the intercept row split off
    Mat omega;             // K x K symmetric positive definite
    bool converged = false;
    bool objective_monotone = true;
    bool inner_converged = true;
    int outer_iterations = 0;
    std::vector<double> objective_log;
    std::vector<double> min_eigenvalue_log;
};

// Eq. 5 alternating minimization from Omega = I, W = 0. An intercept column
// is appended to X and exempted from the gamma penalty. Each step returns
// its best-objective iterate, so the logged objective cannot increase beyond
// float roundoff.
inline MsslFit mssl_fit(const Mat& x, const Mat& y, double lambda, double gamma,
                        const SolverSettings& settings = {}, MsslLoss loss = MsslLoss::Squared,
                        const Mat* row_mask = nullptr) {
    settings.validate();
    if (lambda < 0 || gamma < 0) throw std::invalid_argument("mssl_fit: penalties must be >= 0");
    if (x.rows() != y.rows()) throw std::invalid_argument("mssl_fit: row count mismatch");
    if (loss == MsslLoss::Logistic)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
            for (Eigen::Index i = 0; i < y.rows(); ++i)
                if (y(i, j) != 0.0 && y(i, j) != 1.0)
                    throw std::invalid_argument("mssl_fit: logistic loss needs 0/1 targets");

    const Eigen::Index n = x.rows(), d = x.cols(), k = y.cols();
    Mat xi(n, d + 1);
    xi << x, Vec::Ones(n);
    const Eigen::Index intercept_row = d;

    const bool closed_form = loss == MsslLoss::Squared && row_mask == nullptr;
    std::optional<detail::WStepContext> ctx;
    if (closed_form) ctx.emplace(xi, y);

    Mat w = Mat::Zero(d + 1, k);
    Mat omega = Mat::Identity(k, k);
    detail::AdmmState w_warm, omega_warm;

    MsslFit fit;
    double prev_obj = mssl_objective(xi, y, w, omega, lambda, gamma, loss, intercept_row);
    if (row_mask)  // masked data term replaces the plain one in the monitor
        prev_obj += detail::mssl_data_term(xi, y, w, loss, row_mask) -
                    detail::mssl_data_term(xi, y, w, loss, nullptr);

    auto monitored_objective = [&](const Mat& wq, const Mat& om) {
        double o = mssl_objective(xi, y, wq, om, lambda, gamma, loss, intercept_row);
        if (row_mask)
            o += detail::mssl_data_term(xi, y, wq, loss, row_mask) -
                 detail::mssl_data_term(xi, y, wq, loss, nullptr);
        return o;
    };

    for (int t = 0; t < settings.max_outer_iter; ++t) {
        fit.outer_iterations = t + 1;

        WStepResult ws;
        if (closed_form) {
            if (t == 0) w_warm = {w, Mat::Zero(d + 1, k)};
            ws = detail::w_step_admm(*ctx, omega, gamma, settings, intercept_row, &w_warm);
        } else {
            ws = detail::w_step_prox(xi, y, omega, gamma, settings, intercept_row, loss, row_mask, &w);
        }
        // the previous w is always a feasible candidate
        if (monitored_objective(ws.w, omega) > monitored_objective(w, omega)) ws.w = w;
        w = ws.w;

        if (t == 0) omega_warm = {omega, Mat::Zero(k, k)};
        OmegaStepResult os = detail::omega_step_admm(w, lambda, settings, &omega_warm);
        // the previous omega is a feasible candidate; keep it if the ADMM
        // stopped short of it
        {
            const double cand = monitored_objective(w, omega);
            const double got = monitored_objective(w, os.omega);
            if (got > cand) {
                os.omega = omega;
                os.min_eigenvalue = fit.min_eigenvalue_log.empty()
                                        ? 1.0
                                        : fit.min_eigenvalue_log.back();
            }
        }
        omega = os.omega;
        fit.inner_converged = fit.inner_converged && ws.converged && os.converged;

        const double obj = monitored_objective(w, omega);
        fit.objective_log.push_back(obj);
        fit.min_eigenvalue_log.push_back(os.min_eigenvalue);
        if (obj > prev_obj + 1e-8) fit.objective_monotone = false;

        const double rel = std::abs(prev_obj - obj) / std::max(1.0, std::abs(prev_obj));
        prev_obj = obj;
        if (rel < settings.outer_tol) {
            fit.converged = true;
            break;
        }
    }

    fit.weights = WeightMatrix(d, k);
    fit.weights.coef = w.topRows(d);
    fit.weights.intercepts = w.row(intercept_row).transpose();
    fit.omega = omega;
    return fit;
}

}  // namespace downscale
