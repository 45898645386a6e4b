#pragma once

#include <Eigen/Dense>

namespace downscale {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Linear-model coefficients for K tasks over d covariates. Single-response
// fits use K = 1.
struct WeightMatrix {
    Mat coef;        // d x K
    Vec intercepts;  // K

    WeightMatrix() = default;
    WeightMatrix(Eigen::Index d, Eigen::Index k) : coef(Mat::Zero(d, k)), intercepts(Vec::Zero(k)) {}

    Eigen::Index n_features() const { return coef.rows(); }
    Eigen::Index n_tasks() const { return coef.cols(); }

    // X (n x d) -> predictions (n x K)
    Mat predict(const Mat& x) const { return (x * coef).rowwise() + intercepts.transpose(); }
};

}  // namespace downscale
