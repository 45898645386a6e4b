#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "downscale/weights.hpp"

namespace downscale {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
inline double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct LogisticModel {
    Vec w;
    double b = 0;
    bool converged = false;
    int iterations = 0;
};

inline Vec logistic_proba(const Mat& x, const LogisticModel& m) {
    Vec p = (x * m.w).array() + m.b;
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(p(i));
    return p;
}

// penalized negative log-likelihood; the tiny ridge keeps separable
// problems identified, the intercept stays unpenalized
inline double logistic_objective(const Mat& x, const Vec& y, const Vec& w, double b, double ridge) {
    double nll = 0;
    const Vec z = (x * w).array() + b;
    for (Eigen::Index i = 0; i < y.size(); ++i) nll += log1pexp(z(i)) - y(i) * z(i);
    return nll + 0.5 * ridge * w.squaredNorm();
}

// Newton iterations with step halving; converged when the gradient
// infinity-norm drops below tol
inline LogisticModel logistic_fit(const Mat& x, const Vec& y, double ridge = 1e-6, double tol = 1e-6,
                                  int max_iter = 200) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (y.size() != n) throw std::invalid_argument("logistic_fit: label count mismatch");
    double pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw std::invalid_argument("logistic_fit: labels must be 0/1");
        pos += y(i);
    }
    if (pos == 0 || pos == static_cast<double>(n))
        throw std::invalid_argument("logistic_fit: both classes must be present");

    LogisticModel m;
    m.w = Vec::Zero(d);
    m.b = std::log(pos / (n - pos));  // class-prior start

    double f = logistic_objective(x, y, m.w, m.b, ridge);
    for (int it = 0; it < max_iter; ++it) {
        m.iterations = it + 1;
        const Vec z = (x * m.w).array() + m.b;
        Vec p(n), s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = sigmoid(z(i));
            s(i) = std::max(p(i) * (1.0 - p(i)), 1e-10);
        }
        Vec grad_w = x.transpose() * (p - y) + ridge * m.w;
        const double grad_b = (p - y).sum();

        const double gnorm = std::max(grad_w.cwiseAbs().maxCoeff(), std::abs(grad_b));
        if (gnorm < tol) {
            m.converged = true;
            return m;
        }

        // Newton system over (w, b)
        Mat h(d + 1, d + 1);
        h.topLeftCorner(d, d) = x.transpose() * s.asDiagonal() * x;
        h.topLeftCorner(d, d).diagonal().array() += ridge;
        const Vec xs = x.transpose() * s;
        h.topRightCorner(d, 1) = xs;
        h.bottomLeftCorner(1, d) = xs.transpose();
        h(d, d) = s.sum();

        Vec g(d + 1);
        g.head(d) = grad_w;
        g(d) = grad_b;
        const Vec step = h.ldlt().solve(g);

        double alpha = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
            const Vec w_try = m.w - alpha * step.head(d);
            const double b_try = m.b - alpha * step(d);
            const double f_try = logistic_objective(x, y, w_try, b_try, ridge);
            if (f_try <= f - 1e-4 * alpha * g.dot(step) || f_try < f) {
                m.w = w_try;
                m.b = b_try;
                f = f_try;
                break;
            }
            alpha *= 0.5;
        }
    }
    // gradient check once more before giving up
    const Vec z = (x * m.w).array() + m.b;
    Vec p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(z(i));
    const Vec grad_w = x.transpose() * (p - y) + ridge * m.w;
    m.converged = std::max(grad_w.cwiseAbs().maxCoeff(), std::abs((p - y).sum())) < tol;
    return m;
}

// L1-penalized logistic regression by proximal gradient (FISTA with
// restart); the same ridge/intercept conventions as logistic_fit so
// lambda1 = 0 reproduces it
struct L1LogisticModel {
    Vec w;
    double b = 0;
    bool converged = false;
    int iterations = 0;
};

inline L1LogisticModel l1_logistic_fit(const Mat& x, const Vec& y, double lambda1, double ridge = 1e-6,
                                       double tol = 1e-6, int max_iter = 5000) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (y.size() != n) throw std::invalid_argument("l1_logistic_fit: label count mismatch");
    double pos = y.sum();
    if (pos == 0 || pos == static_cast<double>(n))
        throw std::invalid_argument("l1_logistic_fit: both classes must be present");
    if (lambda1 < 0) throw std::invalid_argument("l1_logistic_fit: lambda1 must be >= 0");

    // Lipschitz bound for the logistic gradient over (w, b): the implicit
    // intercept column of ones contributes n to the Frobenius norm
    const double lip = 0.25 * (x.squaredNorm() + static_cast<double>(n)) + ridge;

    Vec w = Vec::Zero(d), w_prev = w, v = w;
    double b = std::log(pos / (n - pos)), b_prev = b, vb = b;
    double t_acc = 1.0;

    auto smooth_grad = [&](const Vec& wk, double bk, Vec& gw, double& gb) {
        const Vec z = (x * wk).array() + bk;
        Vec p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(z(i));
        gw = x.transpose() * (p - y) + ridge * wk;
        gb = (p - y).sum();
    };

    L1LogisticModel m;
    Vec gw(d);
    double gb = 0;
    const double step = 1.0 / lip;
    for (int it = 0; it < max_iter; ++it) {
        m.iterations = it + 1;
        smooth_grad(v, vb, gw, gb);
        Vec w_new = v - step * gw;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double thr = step * lambda1;
            w_new(j) = w_new(j) > thr ? w_new(j) - thr : (w_new(j) < -thr ? w_new(j) + thr : 0.0);
        }
        const double b_new = vb - step * gb;  // intercept unpenalized

        // KKT residual on the proximal point, checked periodically
        if (it % 5 == 4 || it == max_iter - 1) {
            smooth_grad(w_new, b_new, gw, gb);
            double kkt = std::abs(gb);
            for (Eigen::Index j = 0; j < d; ++j) {
                if (w_new(j) != 0.0)
                    kkt = std::max(kkt, std::abs(gw(j) + lambda1 * (w_new(j) > 0 ? 1.0 : -1.0)));
                else
                    kkt = std::max(kkt, std::max(0.0, std::abs(gw(j)) - lambda1));
            }
            if (kkt < tol) {
                m.w = w_new;
                m.b = b_new;
                m.converged = true;
                return m;
            }
        }

        // FISTA momentum with restart on non-monotone steps
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        const double mom = (t_acc - 1.0) / t_next;
        if ((w_new - w).dot(w - w_prev) + (b_new - b) * (b - b_prev) < 0) {
            t_acc = 1.0;
            v = w_new;
            vb = b_new;
        } else {
            v = w_new + mom * (w_new - w);
            vb = b_new + mom * (b_new - b);
            t_acc = t_next;
        }
        w_prev = w;
        b_prev = b;
        w = w_new;
        b = b_new;
    }
    m.w = w;
    m.b = b;
    return m;
}

inline Vec l1_logistic_proba(const Mat& x, const L1LogisticModel& m) {
    Vec p = (x * m.w).array() + m.b;
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(p(i));
    return p;
}

}  // namespace downscale
