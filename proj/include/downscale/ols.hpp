#pragma once

#include <Eigen/Dense>

#include "downscale/weights.hpp"

namespace downscale {

struct OlsResult {
    Vec coef;
    double intercept = 0;
    bool rank_deficient = false;  // minimum-norm solution was returned
};

// least squares through a rank-revealing orthogonal factorization; the
// intercept is handled by centering so it never enters the penalty-free
// normal equations
inline OlsResult ols_fit(const Mat& x, const Vec& y) {
    if (x.rows() != y.size()) throw std::invalid_argument("ols_fit: row count mismatch");
    if (x.rows() < 2) throw std::invalid_argument("ols_fit: need at least 2 rows");

    const Vec xmean = x.colwise().mean();
    const double ymean = y.mean();
    const Mat xc = x.rowwise() - xmean.transpose();
    const Vec yc = y.array() - ymean;

    Eigen::CompleteOrthogonalDecomposition<Mat> cod(xc);
    cod.setThreshold(1e-10);

    OlsResult r;
    r.coef = cod.solve(yc);
    r.intercept = ymean - xmean.dot(r.coef);
    r.rank_deficient = cod.rank() < x.cols();
    return r;
}

inline Vec ols_predict(const Mat& x, const OlsResult& r) {
    return (x * r.coef).array() + r.intercept;
}

}  // namespace downscale
