#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "downscale/weights.hpp"

namespace downscale {

// Linear epsilon-insensitive support vector regression solved in the dual by
// coordinate descent. The bias rides along as an appended unit feature, so
// it picks up the same (weak) regularization liblinear applies.
struct SvrModel {
    Vec w;
    double b = 0;
    int sweeps = 0;
    bool converged = false;
};

inline double svr_primal_objective(const Mat& x, const Vec& y, const Vec& w, double b, double c,
                                   double epsilon) {
    double loss = 0;
    const Vec f = (x * w).array() + b;
    for (Eigen::Index i = 0; i < y.size(); ++i) loss += std::max(0.0, std::abs(y(i) - f(i)) - epsilon);
    return 0.5 * (w.squaredNorm() + b * b) + c * loss;
}

inline SvrModel svr_fit(const Mat& x, const Vec& y, double c = 1.0, double epsilon = 0.1,
                        double tol = 1e-10, int max_sweeps = 20000) {
    if (c <= 0) throw std::invalid_argument("svr_fit: C must be > 0");
    if (epsilon < 0) throw std::invalid_argument("svr_fit: epsilon must be >= 0");
    const Eigen::Index n = x.rows(), d = x.cols();
    if (y.size() != n) throw std::invalid_argument("svr_fit: row count mismatch");

    Vec qii(n);
    for (Eigen::Index i = 0; i < n; ++i) qii(i) = x.row(i).squaredNorm() + 1.0;  // +1 for the bias feature

    SvrModel m;
    m.w = Vec::Zero(d);
    Vec beta = Vec::Zero(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        m.sweeps = sweep + 1;
        double max_change = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = x.row(i).dot(m.w) + m.b - y(i);
            // minimizer of the one-variable dual piece: soft-threshold then box
            const double v = qii(i) * beta(i) - g;
            double u = 0;
            if (v > epsilon)
                u = (v - epsilon) / qii(i);
            else if (v < -epsilon)
                u = (v + epsilon) / qii(i);
            u = std::clamp(u, -c, c);
            const double delta = u - beta(i);
            if (delta != 0.0) {
                m.w += delta * x.row(i).transpose();
                m.b += delta;
                beta(i) = u;
                max_change = std::max(max_change, std::abs(delta) * std::sqrt(qii(i)));
            }
        }
        if (max_change < tol) {
            m.converged = true;
            break;
        }
    }
    return m;
}

inline Vec svr_predict(const Mat& x, const SvrModel& m) { return (x * m.w).array() + m.b; }

// L1-loss linear support vector classifier (labels 0/1), same dual
// coordinate descent scheme
struct SvcModel {
    Vec w;
    double b = 0;
    int sweeps = 0;
    bool converged = false;
};

inline SvcModel svc_fit(const Mat& x, const Vec& y01, double c = 1.0, double tol = 1e-10,
                        int max_sweeps = 20000) {
    if (c <= 0) throw std::invalid_argument("svc_fit: C must be > 0");
    const Eigen::Index n = x.rows(), d = x.cols();
    if (y01.size() != n) throw std::invalid_argument("svc_fit: label count mismatch");
    double pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y01(i) != 0.0 && y01(i) != 1.0) throw std::invalid_argument("svc_fit: labels must be 0/1");
        pos += y01(i);
    }
    if (pos == 0 || pos == static_cast<double>(n))
        throw std::invalid_argument("svc_fit: both classes must be present");

    Vec qii(n), sign(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        qii(i) = x.row(i).squaredNorm() + 1.0;
        sign(i) = y01(i) > 0.5 ? 1.0 : -1.0;
    }

    SvcModel m;
    m.w = Vec::Zero(d);
    Vec alpha = Vec::Zero(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        m.sweeps = sweep + 1;
        double max_change = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = sign(i) * (x.row(i).dot(m.w) + m.b) - 1.0;
            const double a_new = std::clamp(alpha(i) - g / qii(i), 0.0, c);
            const double delta = a_new - alpha(i);
            if (delta != 0.0) {
                m.w += delta * sign(i) * x.row(i).transpose();
                m.b += delta * sign(i);
                alpha(i) = a_new;
                max_change = std::max(max_change, std::abs(delta) * std::sqrt(qii(i)));
            }
        }
        if (max_change < tol) {
            m.converged = true;
            break;
        }
    }
    return m;
}

inline Vec svc_decision(const Mat& x, const SvcModel& m) { return (x * m.w).array() + m.b; }

}  // namespace downscale
