#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ontomatch/string_features.hpp"

namespace ontomatch {

// Logistic regression over the engineered pair features.
struct LrModel {
  FeatureVector weights = FeatureVector::Zero();
  double bias = 0.0;
  double l2_lambda = 1e-4;

  bool operator==(const LrModel&) const = default;
};

struct LrTrainConfig {
  double l2_lambda = 1e-4;
  double gradient_tolerance = 1e-6;  // stop once the gradient's max-norm drops below this
  int max_iterations = 10000;
};

struct LrTrainReport {
  int iterations = 0;
  bool converged = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> loss_history;  // loss after every accepted step
};

// Rows of `features` are examples; labels are 0/1.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;

// Mean BCE plus (lambda/2)|w|^2; the bias is not regularized.
double lr_objective(const LrModel& model, const FeatureMatrix& features, const Eigen::VectorXd& labels);
// Gradient of lr_objective: first 32 entries for the weights, last for the bias.
Eigen::VectorXd lr_gradient(const LrModel& model, const FeatureMatrix& features, const Eigen::VectorXd& labels);

// Full-batch gradient descent with Armijo backtracking from a zero start.
// Throws ValidationError unless both labels are present.
LrModel train_lr(const FeatureMatrix& features, const Eigen::VectorXd& labels, const LrTrainConfig& config = {},
                 LrTrainReport* report = nullptr);
LrModel train_lr(std::span<const FeatureVector> features, std::span<const int> labels,
                 const LrTrainConfig& config = {}, LrTrainReport* report = nullptr);

double predict_lr(const LrModel& model, const FeatureVector& features);
// Throws ValidationError unless the vector has exactly 32 entries.
double predict_lr(const LrModel& model, std::span<const double> features);

// JSON: {"weights": [32 numbers], "bias": b, "l2_lambda": l}
std::string lr_to_json(const LrModel& model);
LrModel lr_from_json(const std::string& text);
void save_lr(const LrModel& model, const std::string& path);
LrModel load_lr(const std::string& path);

}  // namespace ontomatch
