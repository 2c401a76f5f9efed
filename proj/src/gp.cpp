#include "vrec/gp.hpp"

#include <cmath>
#include <string>

#include "vrec/errors.hpp"
#include "vrec/log.hpp"

namespace vrec {

void GPHyperparams::validate() const {
    if (theta2 < 0) throw ParameterError("gp: theta2 must be >= 0");
    if (theta3 < 0) throw ParameterError("gp: theta3 must be >= 0");
    if (beta_inv < 0) throw ParameterError("gp: beta_inv must be >= 0");
}

double gp_kernel(const Point2& xi, const Point2& xj, const GPHyperparams& h) {
    return h.theta0 + h.theta1 * xi.dot(xj) +
           h.theta2 * std::exp(-0.5 * h.theta3 * (xi - xj).squaredNorm());
}

GPModel::GPModel(const std::vector<Point2>& train_inputs_b,
                 const std::vector<Point2>& train_outputs_a, const GPHyperparams& hyper)
    : hyper_(hyper), inputs_(train_inputs_b) {
    hyper_.validate();
    const int n = static_cast<int>(inputs_.size());
    if (n < 1) throw ParameterError("gp: need at least one training pair");
    if (train_outputs_a.size() != inputs_.size())
        throw ParameterError("gp: input/output count mismatch");

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double k = gp_kernel(inputs_[i], inputs_[j], hyper_);
            gram(i, j) = k;
            gram(j, i) = k;
        }
        gram(i, i) += hyper_.beta_inv;
    }

    chol_ = gram.llt();
    if (chol_.info() != Eigen::Success) {
        if (hyper_.beta_inv == 0.0) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j)
                    if ((inputs_[i] - inputs_[j]).norm() < 1e-12)
                        throw ConditioningError(
                            "gp: Gram matrix not SPD; duplicate training inputs " +
                            std::to_string(j) + " and " + std::to_string(i) +
                            " with beta_inv = 0");
        }
        throw ConditioningError("gp: Gram matrix is not positive definite");
    }

    Eigen::MatrixXd outputs(n, 2);
    for (int i = 0; i < n; ++i) outputs.row(i) = train_outputs_a[i].transpose();
    weights_ = chol_.solve(outputs);
}

GPPrediction GPModel::predict(const Point2& query_b) const {
    const int n = train_size();
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k(i) = gp_kernel(inputs_[i], query_b, hyper_);

    GPPrediction out;
    out.mean = (k.transpose() * weights_).transpose();
    double var = gp_kernel(query_b, query_b, hyper_) + hyper_.beta_inv - k.dot(chol_.solve(k));
    if (var < -1e-9)
        log::warn("gp: predictive variance " + std::to_string(var) + " clamped to 0");
    out.variance = std::max(0.0, var);
    return out;
}

}  // namespace vrec
