#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vrec/affine.hpp"

namespace vrec {

/// Kernel weights for k(xi, xj) = t0 + t1 xi'xj + t2 exp(-(t3/2)||xi-xj||^2),
/// plus the measurement noise variance beta_inv added on the Gram diagonal.
struct GPHyperparams {
    double theta0 = 0.0;
    double theta1 = 1.0;    // linear term carries the global affine trend
    double theta2 = 25.0;
    double theta3 = 2e-4;   // RBF lengthscale ~70 px at detector scale
    double beta_inv = 1.0;

    void validate() const;
};

double gp_kernel(const Point2& xi, const Point2& xj, const GPHyperparams& h);

struct GPPrediction {
    Point2 mean;      // predicted warped-image location
    double variance;  // predictive sigma^2, clamped at 0
};

/// Gaussian-process regression of warped-image coordinates against
/// target-image coordinates: mean(x) = k' C^-1 X_train_out with
/// C_ij = k(x_i, x_j) + beta_inv * delta_ij over the target-image inputs,
/// var(x) = k(x,x) + beta_inv - k' C^-1 k.
class GPModel {
public:
    /// Fit from paired points: inputs in target-image (B) space, outputs in
    /// warped-image (A) space. O(N^3); predictions are O(N) afterwards.
    /// A numerically non-SPD Gram matrix raises ConditioningError, naming
    /// duplicate inputs when beta_inv is 0.
    GPModel(const std::vector<Point2>& train_inputs_b, const std::vector<Point2>& train_outputs_a,
            const GPHyperparams& hyper);

    GPPrediction predict(const Point2& query_b) const;
    int train_size() const { return static_cast<int>(inputs_.size()); }
    const GPHyperparams& hyper() const { return hyper_; }

private:
    GPHyperparams hyper_;
    std::vector<Point2> inputs_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::MatrixXd weights_;  // C^-1 * outputs, N x 2
};

}  // namespace vrec
