#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "downscale/weights.hpp"

namespace downscale {

// 1/2 ||y - b0 - X beta||^2 + lambda1 ||beta||_1 + lambda2/2 ||beta||^2.
// The 1/2 scalings make the full-shrinkage threshold max|x_j' y| and the
// zero-coefficient condition |x_j' r| <= lambda1; dropping them only
// rescales the lambda grid.
inline double elasticnet_objective(const Mat& x, const Vec& y, const Vec& beta, double intercept,
                                   double lambda1, double lambda2) {
    const Vec r = y - (x * beta).array().matrix() - Vec::Constant(y.size(), intercept);
    return 0.5 * r.squaredNorm() + lambda1 * beta.lpNorm<1>() + 0.5 * lambda2 * beta.squaredNorm();
}

struct ElasticNetResult {
    Vec coef;
    double intercept = 0;
    int sweeps = 0;
    bool converged = false;
    double kkt_violation = 0;
};

// cyclic coordinate descent on centered data; sweeps continue until both the
// largest coefficient change and the KKT residual are below tolerance
inline ElasticNetResult elasticnet_fit(const Mat& x, const Vec& y, double lambda1, double lambda2,
                                       double tol = 1e-6, int max_sweeps = 100000,
                                       const Vec* warm_start = nullptr, double kkt_tol = 1e-8) {
    if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("elasticnet_fit: penalties must be >= 0");
    if (x.rows() != y.size()) throw std::invalid_argument("elasticnet_fit: row count mismatch");

    const Eigen::Index n = x.rows(), d = x.cols();
    const Vec xmean = x.colwise().mean();
    const double ymean = y.mean();
    const Mat xc = x.rowwise() - xmean.transpose();
    const Vec yc = y.array() - ymean;

    Vec col_sq(d);
    for (Eigen::Index j = 0; j < d; ++j) col_sq(j) = xc.col(j).squaredNorm();

    ElasticNetResult res;
    res.coef = (warm_start && warm_start->size() == d) ? *warm_start : Vec::Zero(d);
    Vec r = yc - xc * res.coef;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        res.sweeps = sweep + 1;
        double max_change = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double old = res.coef(j);
            const double z = xc.col(j).dot(r) + col_sq(j) * old;
            const double denom = col_sq(j) + lambda2;
            double bj = 0;  // constant columns (denom 0) pin to zero
            if (denom > 0) {
                if (z > lambda1)
                    bj = (z - lambda1) / denom;
                else if (z < -lambda1)
                    bj = (z + lambda1) / denom;
            }
            if (bj != old) {
                r -= (bj - old) * xc.col(j);
                res.coef(j) = bj;
                max_change = std::max(max_change, std::abs(bj - old));
            }
        }
        if (max_change >= tol) continue;

        // stationarity check; keep sweeping if any coordinate still violates
        double viol = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double g = xc.col(j).dot(r);
            if (res.coef(j) == 0.0)
                viol = std::max(viol, std::max(0.0, std::abs(g) - lambda1));
            else
                viol = std::max(viol,
                                std::abs(g - lambda2 * res.coef(j) -
                                         lambda1 * (res.coef(j) > 0 ? 1.0 : -1.0)));
        }
        res.kkt_violation = viol;
        if (viol <= kkt_tol) {
            res.converged = true;
            break;
        }
    }
    res.intercept = ymean - xmean.dot(res.coef);
    return res;
}

inline Vec elasticnet_predict(const Mat& x, const ElasticNetResult& r) {
    return (x * r.coef).array() + r.intercept;
}

}  // namespace downscale
