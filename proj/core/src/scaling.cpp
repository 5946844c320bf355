#include "zdt/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zdt {

MinMaxParams fit_minmax(const Eigen::MatrixXd& data) {
    if (data.rows() < 1) throw DataError("fit_minmax: empty data");
    return {data.colwise().minCoeff(), data.colwise().maxCoeff()};
}

Eigen::MatrixXd transform_minmax(const Eigen::MatrixXd& x, const MinMaxParams& p) {
    if (x.cols() != p.min.size()) throw DataError("transform_minmax: feature count mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double lo = p.min(j);
        const double range = p.max(j) - lo;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            double v = range > 0.0 ? (x(i, j) - lo) / range : 0.0;
            out(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

double yeo_johnson(double x, double lambda) {
    constexpr double kBranchTol = 1e-8;
    if (x >= 0.0) {
        if (std::abs(lambda) < kBranchTol) return std::log1p(x);
        return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
    }
    const double two_minus = 2.0 - lambda;
    if (std::abs(two_minus) < kBranchTol) return -std::log1p(-x);
    return -(std::pow(1.0 - x, two_minus) - 1.0) / two_minus;
}

double yeo_johnson_log_likelihood(const Eigen::VectorXd& column, double lambda) {
    const Eigen::Index n = column.size();
    if (n < 2) throw DataError("yeo_johnson_log_likelihood: need at least 2 values");
    double sum = 0.0, sum_sq = 0.0, jacobian = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = column(i);
        const double t = yeo_johnson(x, lambda);
        sum += t;
        sum_sq += t * t;
        jacobian += (x >= 0.0 ? 1.0 : -1.0) * std::log1p(std::abs(x));
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
    return -0.5 * n * std::log(var) + (lambda - 1.0) * jacobian;
}

double fit_yeo_johnson_lambda(const Eigen::VectorXd& column) {
    if (column.size() < 2) throw DataError("fit_yeo_johnson_lambda: need at least 2 values");
    if (column.maxCoeff() == column.minCoeff()) return 1.0;

    // Golden-section search for the maximum over [-5, 5].
    constexpr double kInvPhi = 0.6180339887498949;
    double a = -5.0, b = 5.0;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = yeo_johnson_log_likelihood(column, c);
    double fd = yeo_johnson_log_likelihood(column, d);
    while (b - a > 1e-5) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = yeo_johnson_log_likelihood(column, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = yeo_johnson_log_likelihood(column, d);
        }
    }
    const double lambda = 0.5 * (a + b);
    return std::isfinite(yeo_johnson_log_likelihood(column, lambda)) ? lambda : 1.0;
}

NdNormalizerParams fit_nd_normalizer(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw DataError("fit_nd_normalizer: need at least 2 rows");
    const Eigen::Index n = data.rows(), m = data.cols();
    NdNormalizerParams p;
    p.mean.resize(m);
    p.std.resize(m);
    p.lambda.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mean = data.col(j).mean();
        const double var = (data.col(j).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        p.mean(j) = mean;
        p.std(j) = sd;
        if (sd > 0.0) {
            Eigen::VectorXd standardized = (data.col(j).array() - mean) / sd;
            p.lambda(j) = fit_yeo_johnson_lambda(standardized);
        } else {
            p.lambda(j) = 1.0;
        }
    }
    return p;
}

Eigen::MatrixXd transform_nd(const Eigen::MatrixXd& x, const NdNormalizerParams& p) {
    if (x.cols() != p.mean.size()) throw DataError("transform_nd: feature count mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = p.mean(j), sd = p.std(j), lambda = p.lambda(j);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (sd > 0.0)
                out(i, j) = yeo_johnson((x(i, j) - mean) / sd, lambda);
            else
                out(i, j) = 0.0;
        }
    }
    return out;
}

}  // namespace zdt
