#pragma once

#include <Eigen/Dense>

#include "zdt/common.hpp"

namespace zdt {

// Column-wise min/max, the anomaly-detector normalization regime.
struct MinMaxParams {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
};

MinMaxParams fit_minmax(const Eigen::MatrixXd& data);

// (x - min) / (max - min), clipped to [0,1]; a constant feature maps to 0.
Eigen::MatrixXd transform_minmax(const Eigen::MatrixXd& x, const MinMaxParams& p);

// Yeo-Johnson power transform. Continuous in both arguments; |lambda| and
// |2 - lambda| below 1e-8 take the log branches.
double yeo_johnson(double x, double lambda);

// Gaussian profile log-likelihood of a column under the transform.
double yeo_johnson_log_likelihood(const Eigen::VectorXd& column, double lambda);

// Maximum-likelihood lambda via golden-section search over [-5, 5]
// (tolerance 1e-5). A constant column yields lambda = 1.
double fit_yeo_johnson_lambda(const Eigen::VectorXd& column);

// Novelty-detector regime: standard scaler, then Yeo-Johnson per
// standardized column. Population standard deviation throughout.
struct NdNormalizerParams {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
    Eigen::VectorXd lambda;
};

NdNormalizerParams fit_nd_normalizer(const Eigen::MatrixXd& data);

// Standardize then transform; a zero-std column passes 0 through.
Eigen::MatrixXd transform_nd(const Eigen::MatrixXd& x, const NdNormalizerParams& p);

}  // namespace zdt
